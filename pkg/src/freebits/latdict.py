"""Latency dictionaries: profiled tables and a synthetic tiled-MCU latency model.

A :class:`LatencyDictionary` maps ``(canonical layer-type key, PrecisionPair)``
to a positive cycle count. Tables come either from a CSV file of profiled
latencies (:func:`load_latency_dict`) or from :func:`generate_dict`, which
evaluates :func:`synth_latency` for a :class:`HardwareProfile`.

The synthetic model is a sum of three integer terms:

* compute: MACs spread over all cores at the SIMD rate of the wider operand
  (or always the 8-bit rate on targets without sub-byte SIMD);
* unpack: software widening of the narrower operand when the SIMD unit needs
  equal operand widths and the hardware does not do it transparently;
* movement: per-tile overhead times the number of L1 tiles, plus DMA transfer
  of the layer's full footprint.

Narrow data shrinks the footprint, so fewer and larger tiles are needed; this
is why sub-byte layers can be faster even without sub-byte arithmetic.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, fields
from fractions import Fraction
from importlib import resources
from types import MappingProxyType

from .errors import NotProfiledError, ParseError, ValidationError
from .metrics import macs
from .netmodel import BIT_WIDTHS, LayerType, PrecisionPair, canonical_key, unique_layer_types

CSV_HEADER = ["lt_key", "b_in", "b_wt", "cycles"]
BUILTIN_PROFILES = ("xpulpv2", "xpulpnnv1", "xpulpnnv2")


class LatencyDictionary:
    """Immutable map from (layer type, precision pair) to cycles."""

    def __init__(self, entries, source="profiled", profile_name=""):
        if source not in ("profiled", "synthetic"):
            raise ValueError(f"source must be 'profiled' or 'synthetic', got {source!r}")
        table = {}
        for (key, pp), cycles in entries.items():
            if isinstance(cycles, bool) or not isinstance(cycles, int) or cycles <= 0:
                raise ValidationError(f"latency for {key} at {pp} must be a positive integer, "
                                      f"got {cycles!r}")
            table[(key, pp)] = cycles
        self._entries = MappingProxyType(table)
        pairs = {}
        for key, pp in table:
            pairs.setdefault(key, set()).add(pp)
        self._pairs = MappingProxyType({k: frozenset(v) for k, v in pairs.items()})
        self.source = source
        self.profile_name = profile_name

    @property
    def entries(self):
        return self._entries

    def __len__(self):
        return len(self._entries)

    def __eq__(self, other):
        if not isinstance(other, LatencyDictionary):
            return NotImplemented
        return (dict(self._entries) == dict(other._entries) and self.source == other.source
                and self.profile_name == other.profile_name)

    def __contains__(self, item):
        lt, pp = item
        return (canonical_key(lt), pp) in self._entries

    def lookup(self, lt: LayerType, pp: PrecisionPair) -> int:
        """Stored cycles for ``(lt, pp)``; raises :class:`NotProfiledError` if absent."""
        key = canonical_key(lt)
        try:
            return self._entries[(key, pp)]
        except KeyError:
            raise NotProfiledError(key, pp) from None

    def get(self, lt: LayerType, pp: PrecisionPair, default=None):
        return self._entries.get((canonical_key(lt), pp), default)

    def pairs(self, lt: LayerType) -> frozenset:
        """Precision pairs recorded for ``lt`` (empty if the layer type is unknown)."""
        return self._pairs.get(canonical_key(lt), frozenset())

    def keys(self):
        return self._pairs.keys()

    def __repr__(self):
        return (f"LatencyDictionary({len(self)} entries, source={self.source!r}, "
                f"profile_name={self.profile_name!r})")


def lookup(ld: LatencyDictionary, lt: LayerType, pp: PrecisionPair) -> int:
    return ld.lookup(lt, pp)


def _parse_row_int(value, column, rowno):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ParseError(f"row {rowno}: column {column!r} is not an integer: {value!r}") from None


def load_latency_dict(text: str, profile_name: str = "") -> LatencyDictionary:
    """Parse a ``lt_key,b_in,b_wt,cycles`` CSV table.

    Row numbers in error messages count data rows from 1 (the header is row 0).
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ParseError(f"latency table header must be {','.join(CSV_HEADER)}, got {header}")
    entries = {}
    for rowno, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"row {rowno}: expected 4 columns, got {len(row)}")
        key = row[0]
        b_in, b_wt, cycles = (_parse_row_int(v, c, rowno) for v, c in zip(row[1:], CSV_HEADER[1:]))
        if b_in not in BIT_WIDTHS or b_wt not in BIT_WIDTHS:
            raise ParseError(f"row {rowno}: bit-widths must be in {BIT_WIDTHS}")
        if cycles <= 0:
            raise ValidationError(f"row {rowno}: latency must be positive, got {cycles}")
        pp = PrecisionPair(b_in, b_wt)
        if (key, pp) in entries:
            raise ValidationError(f"row {rowno}: duplicate entry for {key} at {pp}")
        entries[(key, pp)] = cycles
    return LatencyDictionary(entries, "profiled", profile_name)


def dump_latency_dict(ld: LatencyDictionary) -> str:
    """Serialize to CSV, rows sorted by key then precision pair."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for (key, pp), cycles in sorted(ld.entries.items()):
        writer.writerow([key, pp.b_in, pp.b_wt, cycles])
    return out.getvalue()


def read_latency_dict(path, profile_name=None) -> LatencyDictionary:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return load_latency_dict(text, profile_name if profile_name is not None else str(path))


# --- hardware profiles -----------------------------------------------------------

@dataclass(frozen=True)
class HardwareProfile:
    """Parameters of the synthetic latency model for one cluster/ISA variant.

    Rational parameters are held as :class:`~fractions.Fraction` so that the
    ceilings in :func:`synth_latency` are exact.
    """

    name: str
    n_cores: int
    l1_bytes: int
    macs_per_cycle_per_core: dict
    sw_unpack_cycles_per_elem: Fraction = Fraction(1, 4)
    hw_unpack: bool = False
    sub_byte_simd: bool = True
    tile_overhead_cycles: int = 1500
    dma_bytes_per_cycle: Fraction = Fraction(8)
    l1_fill_factor: Fraction = Fraction(85, 100)

    def __post_init__(self):
        conv = {int(k): Fraction(v) for k, v in self.macs_per_cycle_per_core.items()}
        object.__setattr__(self, "macs_per_cycle_per_core", MappingProxyType(conv))
        for name in ("sw_unpack_cycles_per_elem", "dma_bytes_per_cycle", "l1_fill_factor"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        self._validate()

    def _validate(self):
        for name in ("n_cores", "l1_bytes"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
        t = self.tile_overhead_cycles
        if isinstance(t, bool) or not isinstance(t, int) or t < 0:
            raise ValidationError(f"tile_overhead_cycles must be a non-negative integer, got {t!r}")
        for name in ("hw_unpack", "sub_byte_simd"):
            if not isinstance(getattr(self, name), bool):
                raise ValidationError(f"{name} must be a boolean")
        mpc = self.macs_per_cycle_per_core
        if sorted(mpc) != list(BIT_WIDTHS):
            raise ValidationError(f"macs_per_cycle_per_core needs exactly the keys {BIT_WIDTHS}")
        if any(v <= 0 for v in mpc.values()):
            raise ValidationError("macs_per_cycle_per_core values must be positive")
        if self.sub_byte_simd:
            if not mpc[2] >= mpc[4] >= mpc[8]:
                raise ValidationError("with sub_byte_simd, MAC rate must not drop at lower bit-width")
        elif len(set(mpc.values())) != 1:
            raise ValidationError("without sub_byte_simd, MAC rate must be equal for all bit-widths")
        if self.sw_unpack_cycles_per_elem < 0:
            raise ValidationError("sw_unpack_cycles_per_elem must be non-negative")
        if self.dma_bytes_per_cycle <= 0:
            raise ValidationError("dma_bytes_per_cycle must be positive")
        if not 0 < self.l1_fill_factor <= 1:
            raise ValidationError("l1_fill_factor must lie in (0, 1]")

    def replace(self, **changes) -> "HardwareProfile":
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        kw.update(changes)
        return HardwareProfile(**kw)


_PROFILE_KEYS = [f.name for f in fields(HardwareProfile)]


def _json_number(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else float(x)


def parse_profile(text: str) -> HardwareProfile:
    try:
        # exact decimal values; 0.85 stays 17/20
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ParseError("hardware profile must be a JSON object")
    unknown = sorted(set(doc) - set(_PROFILE_KEYS))
    if unknown:
        raise ParseError(f"hardware profile: unknown field {unknown[0]!r}")
    missing = [k for k in _PROFILE_KEYS if k not in doc]
    if missing:
        raise ParseError(f"hardware profile: missing field {missing[0]!r}")
    mpc = doc["macs_per_cycle_per_core"]
    if not isinstance(mpc, dict) or sorted(mpc) != sorted(str(b) for b in BIT_WIDTHS):
        raise ParseError("hardware profile: macs_per_cycle_per_core must map '2', '4', '8'")
    if not isinstance(doc["name"], str):
        raise ParseError("hardware profile: field 'name' must be a string")
    for key in ("n_cores", "l1_bytes", "tile_overhead_cycles"):
        if isinstance(doc[key], Fraction):
            raise ParseError(f"hardware profile: field {key!r} must be an integer")
    try:
        return HardwareProfile(**doc)
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ParseError(f"hardware profile: {e}") from None


def profile_to_json(hp: HardwareProfile) -> str:
    doc = {}
    for name in _PROFILE_KEYS:
        v = getattr(hp, name)
        if name == "macs_per_cycle_per_core":
            v = {str(b): _json_number(v[b]) for b in sorted(v)}
        elif isinstance(v, Fraction):
            v = _json_number(v)
        doc[name] = v
    return json.dumps(doc, indent=2) + "\n"


def load_profile(path) -> HardwareProfile:
    with open(path, encoding="utf-8") as f:
        return parse_profile(f.read())


def builtin_profile(name: str) -> HardwareProfile:
    if name not in BUILTIN_PROFILES:
        raise KeyError(f"no built-in profile {name!r}; available: {', '.join(BUILTIN_PROFILES)}")
    text = resources.files("freebits.profiles").joinpath(f"{name}.json").read_text("utf-8")
    return parse_profile(text)


# --- synthetic model ---------------------------------------------------------------

def _bytes(elems, bits):
    return -(-elems * bits // 8)


def footprint_bytes(lt: LayerType, pp: PrecisionPair) -> int:
    # output activations are stored at the layer's input precision
    return (_bytes(lt.in_elems, pp.b_in) + _bytes(lt.out_elems, pp.b_in)
            + _bytes(lt.weight_elems, pp.b_wt))


def latency_terms(hp: HardwareProfile, lt: LayerType, pp: PrecisionPair) -> dict:
    """The compute/unpack/movement breakdown behind :func:`synth_latency`."""
    n_macs = macs(lt)
    b_c = max(pp.b_in, pp.b_wt) if hp.sub_byte_simd else 8
    compute = math.ceil(Fraction(n_macs) / (hp.n_cores * hp.macs_per_cycle_per_core[b_c]))

    if (pp.is_matched and hp.sub_byte_simd) or hp.hw_unpack:
        unpack = 0
    else:
        narrow_operands = (pp.b_in < b_c) + (pp.b_wt < b_c)
        unpack = math.ceil(hp.sw_unpack_cycles_per_elem * n_macs * narrow_operands)

    fp = footprint_bytes(lt, pp)
    n_tiles = max(1, math.ceil(fp / (hp.l1_fill_factor * hp.l1_bytes)))
    movement = n_tiles * hp.tile_overhead_cycles + math.ceil(fp / hp.dma_bytes_per_cycle)
    return {"compute": compute, "unpack": unpack, "movement": movement,
            "footprint_bytes": fp, "n_tiles": n_tiles}


def synth_latency(hp: HardwareProfile, lt: LayerType, pp: PrecisionPair) -> int:
    t = latency_terms(hp, lt, pp)
    return t["compute"] + t["unpack"] + t["movement"]


def generate_dict(hp: HardwareProfile, net, p_all) -> LatencyDictionary:
    """Synthetic dictionary over ``unique_layer_types(net) x p_all``."""
    entries = {(canonical_key(lt), pp): synth_latency(hp, lt, pp)
               for lt in unique_layer_types(net) for pp in p_all}
    return LatencyDictionary(entries, "synthetic", hp.name)
