"""Network description: layer types, precision pairs and network configurations.

A network is a linear chain of layers. Each layer carries a :class:`LayerType`
(everything that parametrizes the kernel invocation) and a
:class:`PrecisionPair` (input-activation and weight bit-widths). Layer types
are the keys of latency dictionaries, so equality is plain field equality and
:func:`canonical_key` gives a stable string form of it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Iterable

from .errors import ParseError, ValidationError

BIT_WIDTHS = (2, 4, 8)


class OpKind(str, Enum):
    CONV2D = "conv2d"
    DEPTHWISE_CONV2D = "depthwise_conv2d"
    POINTWISE_CONV2D = "pointwise_conv2d"
    LINEAR = "linear"
    ADD = "add"

    @property
    def doc_name(self) -> str:
        return _DOC_NAMES[self]


_DOC_NAMES = {
    OpKind.CONV2D: "conv2d",
    OpKind.DEPTHWISE_CONV2D: "dw_conv2d",
    OpKind.POINTWISE_CONV2D: "pw_conv2d",
    OpKind.LINEAR: "linear",
    OpKind.ADD: "add",
}
_OPS_BY_DOC_NAME = {v: k for k, v in _DOC_NAMES.items()}


@dataclass(frozen=True, order=True)
class PrecisionPair:
    b_in: int
    b_wt: int

    def __post_init__(self):
        for name in ("b_in", "b_wt"):
            v = getattr(self, name)
            if isinstance(v, bool) or v not in BIT_WIDTHS:
                raise ValidationError(f"{name} must be one of {BIT_WIDTHS}, got {v!r}")

    @property
    def bits(self) -> int:
        return self.b_in + self.b_wt

    @property
    def is_matched(self) -> bool:
        return self.b_in == self.b_wt

    def __str__(self):
        return f"({self.b_in},{self.b_wt})"


FULL_SET = frozenset(PrecisionPair(a, w) for a in BIT_WIDTHS for w in BIT_WIDTHS)
LOCKED_SET = frozenset(PrecisionPair(b, b) for b in BIT_WIDTHS)


def precision_set(name: str) -> frozenset:
    """Return the named allowed-precision set: ``"full"`` or ``"locked"``."""
    try:
        return {"full": FULL_SET, "locked": LOCKED_SET}[name]
    except KeyError:
        raise ValueError(f"unknown precision set {name!r}; expected 'full' or 'locked'") from None


@dataclass(frozen=True)
class LayerType:
    op_kind: OpKind
    in_height: int
    in_width: int
    in_channels: int
    out_channels: int
    kernel_h: int = 1
    kernel_w: int = 1
    stride_h: int = 1
    stride_w: int = 1
    groups: int = 1
    padding_h: int = 0
    padding_w: int = 0

    def __post_init__(self):
        object.__setattr__(self, "op_kind", OpKind(self.op_kind))
        for f in fields(self)[1:]:
            v = getattr(self, f.name)
            lower = 0 if f.name.startswith("padding") else 1
            if isinstance(v, bool) or not isinstance(v, int) or v < lower:
                raise ValidationError(f"{f.name} must be an integer >= {lower}, got {v!r}")
        self._check_structure()

    def _check_structure(self):
        op = self.op_kind
        if self.in_channels % self.groups:
            raise ValidationError(
                f"in_channels={self.in_channels} not divisible by groups={self.groups}")
        if op is OpKind.DEPTHWISE_CONV2D:
            if self.groups != self.in_channels or self.out_channels != self.in_channels:
                raise ValidationError(
                    "depthwise conv requires groups == in_channels == out_channels, got "
                    f"groups={self.groups}, c_in={self.in_channels}, c_out={self.out_channels}")
        elif op is OpKind.POINTWISE_CONV2D:
            if (self.kernel_h, self.kernel_w) != (1, 1) or self.groups != 1:
                raise ValidationError("pointwise conv requires a 1x1 kernel and groups == 1")
        elif op is OpKind.ADD:
            if ((self.kernel_h, self.kernel_w, self.stride_h, self.stride_w, self.groups)
                    != (1, 1, 1, 1, 1)):
                raise ValidationError("add requires kernel 1x1, stride 1 and groups 1")
            if self.in_channels != self.out_channels:
                raise ValidationError("add requires in_channels == out_channels")
        if self.in_height + 2 * self.padding_h < self.kernel_h:
            raise ValidationError("kernel_h exceeds the padded input height")
        if self.in_width + 2 * self.padding_w < self.kernel_w:
            raise ValidationError("kernel_w exceeds the padded input width")

    @property
    def out_height(self) -> int:
        return (self.in_height + 2 * self.padding_h - self.kernel_h) // self.stride_h + 1

    @property
    def out_width(self) -> int:
        return (self.in_width + 2 * self.padding_w - self.kernel_w) // self.stride_w + 1

    @property
    def in_elems(self) -> int:
        return self.in_height * self.in_width * self.in_channels

    @property
    def out_elems(self) -> int:
        return self.out_height * self.out_width * self.out_channels

    @property
    def weight_elems(self) -> int:
        # the second summand of an add occupies the weight operand slot
        if self.op_kind is OpKind.ADD:
            return self.in_elems
        return self.kernel_h * self.kernel_w * (self.in_channels // self.groups) * self.out_channels


def canonical_key(lt: LayerType) -> str:
    """Injective string encoding of a layer type, used as latency table key.

    >>> canonical_key(LayerType("pointwise_conv2d", 8, 8, 16, 32))
    'pw_conv2d:i8x8:c16-32:k1x1:s1x1:g1:p0x0'
    """
    return (f"{lt.op_kind.doc_name}:i{lt.in_height}x{lt.in_width}"
            f":c{lt.in_channels}-{lt.out_channels}:k{lt.kernel_h}x{lt.kernel_w}"
            f":s{lt.stride_h}x{lt.stride_w}:g{lt.groups}:p{lt.padding_h}x{lt.padding_w}")


@dataclass(frozen=True)
class Layer:
    id: str
    index: int
    layer_type: LayerType
    precision: PrecisionPair

    def with_precision(self, pp: PrecisionPair) -> "Layer":
        return replace(self, precision=pp)


@dataclass(frozen=True)
class NetworkConfig:
    name: str
    layers: tuple
    accuracy_annotation: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValidationError(f"network {self.name!r} has no layers")
        seen = set()
        for pos, layer in enumerate(self.layers, start=1):
            if layer.id in seen:
                raise ValidationError(f"duplicate layer id {layer.id!r}")
            seen.add(layer.id)
            if layer.index != pos:
                raise ValidationError(
                    f"layer {layer.id!r} has index {layer.index}, expected {pos}")
            if layer.layer_type.op_kind is OpKind.ADD and not layer.precision.is_matched:
                raise ValidationError(
                    f"layer {layer.id!r}: add layers have no weights, b_wt must equal b_in")
        acc = self.accuracy_annotation
        if acc is not None and not 0 <= acc <= 100:
            raise ValidationError(f"accuracy annotation {acc} outside [0, 100]")

    def __len__(self):
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def with_precisions(self, pairs: Iterable[PrecisionPair]) -> "NetworkConfig":
        layers = [layer.with_precision(pp) for layer, pp in zip(self.layers, pairs, strict=True)]
        return replace(self, layers=tuple(layers))

    def precisions(self) -> list:
        return [layer.precision for layer in self.layers]


def build_network(name, specs, accuracy=None) -> NetworkConfig:
    """Build a network from ``(id, LayerType, PrecisionPair)`` triples, indexing in order."""
    layers = [Layer(lid, i, lt, pp) for i, (lid, lt, pp) in enumerate(specs, start=1)]
    return NetworkConfig(name, tuple(layers), accuracy)


def unique_layer_types(net: NetworkConfig) -> frozenset:
    return frozenset(layer.layer_type for layer in net.layers)


# --- JSON document ------------------------------------------------------------

_LAYER_FIELDS = {
    # document field -> LayerType field
    "in_h": "in_height", "in_w": "in_width", "c_in": "in_channels", "c_out": "out_channels",
    "k_h": "kernel_h", "k_w": "kernel_w", "s_h": "stride_h", "s_w": "stride_w",
    "groups": "groups", "pad_h": "padding_h", "pad_w": "padding_w",
}
_LAYER_KEYS = ["id", "op", *_LAYER_FIELDS, "b_in", "b_wt"]
_TOP_KEYS = ["name", "accuracy", "layers"]


def _check_keys(obj, expected, where):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - set(expected))
    if unknown:
        raise ParseError(f"{where}: unknown field {unknown[0]!r}")
    for key in expected:
        if key not in obj:
            raise ParseError(f"{where}: missing field {key!r}")


def _int_field(obj, key, where):
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{where}: field {key!r} must be an integer, got {v!r}")
    return v


def _parse_layer(obj, pos):
    where = f"layers[{pos - 1}]"
    _check_keys(obj, _LAYER_KEYS, where)
    lid = obj["id"]
    if not isinstance(lid, str) or not lid:
        raise ParseError(f"{where}: field 'id' must be a non-empty string")
    where = f"layer {lid!r}"
    op = obj["op"]
    if op not in _OPS_BY_DOC_NAME:
        raise ParseError(f"{where}: field 'op' has unknown value {op!r}")
    dims = {lt_name: _int_field(obj, key, where) for key, lt_name in _LAYER_FIELDS.items()}
    b_in, b_wt = _int_field(obj, "b_in", where), _int_field(obj, "b_wt", where)
    for key, v in (("b_in", b_in), ("b_wt", b_wt)):
        if v not in BIT_WIDTHS:
            raise ParseError(f"{where}: field {key!r} must be one of {BIT_WIDTHS}, got {v}")
    try:
        lt = LayerType(_OPS_BY_DOC_NAME[op], **dims)
    except ValidationError as e:
        raise ValidationError(f"{where}: {e}") from None
    return Layer(lid, pos, lt, PrecisionPair(b_in, b_wt))


def network_from_dict(doc) -> NetworkConfig:
    _check_keys(doc, _TOP_KEYS, "network")
    name = doc["name"]
    if not isinstance(name, str):
        raise ParseError("network: field 'name' must be a string")
    acc = doc["accuracy"]
    if acc is not None and (isinstance(acc, bool) or not isinstance(acc, (int, float))):
        raise ParseError(f"network: field 'accuracy' must be a number or null, got {acc!r}")
    if not isinstance(doc["layers"], list):
        raise ParseError("network: field 'layers' must be a list")
    layers = [_parse_layer(obj, pos) for pos, obj in enumerate(doc["layers"], start=1)]
    return NetworkConfig(name, tuple(layers), acc)


def parse_network(text: str) -> NetworkConfig:
    """Parse and validate a network description document.

    Raises :class:`ParseError` for malformed documents and
    :class:`ValidationError` (naming the layer) for invariant violations.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    return network_from_dict(doc)


def network_to_dict(net: NetworkConfig) -> dict:
    layers = []
    for layer in net.layers:
        lt = layer.layer_type
        obj = {"id": layer.id, "op": lt.op_kind.doc_name}
        obj.update({key: getattr(lt, lt_name) for key, lt_name in _LAYER_FIELDS.items()})
        obj["b_in"] = layer.precision.b_in
        obj["b_wt"] = layer.precision.b_wt
        layers.append(obj)
    return {"name": net.name, "accuracy": net.accuracy_annotation, "layers": layers}


def serialize_network(net: NetworkConfig) -> str:
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def load_network(path) -> NetworkConfig:
    with open(path, encoding="utf-8") as f:
        return parse_network(f.read())
