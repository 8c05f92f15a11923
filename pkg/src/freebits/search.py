"""Candidate configurations and Pareto analysis.

The sweep stands in for a differentiable precision search: every layer gets an
additive accuracy-loss proxy (the sensitivity penalty) and the scalarized
objective ``penalty + lambda * latency`` is minimized. The objective is
separable across layers, so a per-layer argmin is a global optimum; the
exhaustive :func:`brute_force_best` exists to check exactly that.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import NotProfiledError, ParseError, SearchSpaceError, UnprofiledConfigError
from .heuristic import admissible_pairs
from .netmodel import NetworkConfig, OpKind, PrecisionPair

BRUTE_FORCE_LIMIT = 10**7


def homogeneous_config(net: NetworkConfig, pp: PrecisionPair,
                       first_input_bits: int | None = None) -> NetworkConfig:
    """Every layer at ``pp``; add layers get ``(pp.b_in, pp.b_in)``.

    ``first_input_bits`` optionally keeps the first layer's input precision
    fixed (e.g. 8 for raw image data).
    """
    pairs = [PrecisionPair(pp.b_in, pp.b_in) if layer.layer_type.op_kind is OpKind.ADD else pp
             for layer in net.layers]
    if first_input_bits is not None:
        first = PrecisionPair(first_input_bits, pairs[0].b_wt)
        if net.layers[0].layer_type.op_kind is OpKind.ADD:
            first = PrecisionPair(first_input_bits, first_input_bits)
        pairs[0] = first
    return net.with_precisions(pairs)


class SensitivityModel:
    """Per-layer additive penalty standing in for accuracy loss.

    The default penalty of a layer is ``s * ((8 - b_in) + (8 - b_wt))`` with a
    per-layer scale ``s`` (1 unless given).
    """

    def __init__(self, table):
        self._table = {(lid, pp): Fraction(v) for (lid, pp), v in table.items()}
        self._check()

    def _check(self):
        by_layer = {}
        for (lid, pp), v in self._table.items():
            if v < 0:
                raise ValueError(f"negative penalty for layer {lid!r} at {pp}")
            by_layer.setdefault(lid, {})[pp] = v
        for lid, pens in by_layer.items():
            if pens.get(PrecisionPair(8, 8), 0) != 0:
                raise ValueError(f"penalty of layer {lid!r} at (8,8) must be 0")
            for a, va in pens.items():
                for b, vb in pens.items():
                    if b.b_in >= a.b_in and b.b_wt >= a.b_wt and vb > va:
                        raise ValueError(f"penalty of layer {lid!r} increases from {a} to {b}")

    @classmethod
    def from_scales(cls, net: NetworkConfig, p_all, scales=None) -> "SensitivityModel":
        scales = scales or {}
        unknown = set(scales) - {layer.id for layer in net.layers}
        if unknown:
            raise ValueError(f"sensitivity given for unknown layer {sorted(unknown)[0]!r}")
        table = {}
        for layer in net.layers:
            s = Fraction(scales.get(layer.id, 1))
            for pp in p_all:
                table[(layer.id, pp)] = s * ((8 - pp.b_in) + (8 - pp.b_wt))
        return cls(table)

    def penalty(self, layer_id: str, pp: PrecisionPair) -> Fraction:
        return self._table[(layer_id, pp)]

    def total(self, net: NetworkConfig) -> Fraction:
        return sum((self.penalty(layer.id, layer.precision) for layer in net.layers), Fraction(0))


def parse_sensitivity(text: str) -> dict:
    """Parse a ``{"layer id": scale}`` JSON map into exact non-negative scales."""
    try:
        doc = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ParseError("sensitivity file must be a JSON object mapping layer id to scale")
    out = {}
    for lid, v in doc.items():
        if isinstance(v, bool) or not isinstance(v, (int, Fraction)) or v < 0:
            raise ParseError(f"sensitivity of layer {lid!r} must be a non-negative number")
        out[lid] = Fraction(v)
    return out


def _layer_table(net, ld, sens, p_all):
    """Per layer: admissible pairs with their (penalty, cycles)."""
    table = []
    for layer in net.layers:
        lt = layer.layer_type
        row = []
        for pp in sorted(admissible_pairs(lt, p_all)):
            try:
                cycles = ld.lookup(lt, pp)
            except NotProfiledError:
                raise UnprofiledConfigError(layer.id, pp) from None
            row.append((pp, sens.penalty(layer.id, pp), cycles))
        table.append(row)
    return table


def _check_lambda(lam):
    lam = Fraction(lam)
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    return lam


def lambda_name(net_name: str, lam) -> str:
    return f"{net_name}@lambda={float(lam):.6g}"


def scalarized_best(net, ld, sens, lam, p_all) -> NetworkConfig:
    """Per-layer minimizer of ``penalty + lam * cycles`` (ties: more bits, then more input bits)."""
    lam = _check_lambda(lam)
    chosen = [min(row, key=lambda e: (e[1] + lam * e[2], -e[0].bits, -e[0].b_in))[0]
              for row in _layer_table(net, ld, sens, p_all)]
    return NetworkConfig(lambda_name(net.name, lam),
                         net.with_precisions(chosen).layers, None)


def lagrangian_sweep(net, ld, sens, lambdas, p_all) -> list:
    """One scalarized optimum per lambda; ``lambdas`` must be ascending and non-negative."""
    lambdas = [_check_lambda(lam) for lam in lambdas]
    if any(b < a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambdas must be sorted ascending")
    return [scalarized_best(net, ld, sens, lam, p_all) for lam in lambdas]


def default_lambdas(n: int = 16, lo: float = 1e-6, hi: float = 1.0) -> list:
    """Zero followed by ``n - 1`` log-spaced values in ``[lo, hi]``."""
    return [0.0, *np.logspace(math.log10(lo), math.log10(hi), n - 1).tolist()]


def _to_int_matrix(values: list, scale: int):
    ints = [[int(v * scale) for v in row] for row in values]
    bound = max(abs(v) for row in ints for v in row) * max(len(values), 1)
    dtype = np.int64 if bound < 2**62 else object
    return [np.array(row, dtype=dtype) for row in ints]


def brute_force_best(net, ld, sens, lam, p_all) -> NetworkConfig:
    """Exhaustive minimizer of the scalarized objective over all configurations.

    Objectives are scaled to exact integers. Ties go to more total bits, then
    more total input bits, then enumeration order.
    """
    lam = _check_lambda(lam)
    space = len(p_all) ** len(net)
    if space > BRUTE_FORCE_LIMIT:
        raise SearchSpaceError(
            f"{len(p_all)}^{len(net)} = {space} configurations exceed the limit {BRUTE_FORCE_LIMIT}")
    table = _layer_table(net, ld, sens, p_all)
    objective = [[pen + lam * cyc for _, pen, cyc in row] for row in table]
    scale = math.lcm(*(v.denominator for row in objective for v in row))
    obj_rows = _to_int_matrix(objective, scale)
    bits_rows = [np.array([pp.bits for pp, _, _ in row]) for row in table]
    bin_rows = [np.array([pp.b_in for pp, _, _ in row]) for row in table]

    def outer_sum(rows):
        total = rows[0]
        for row in rows[1:]:
            total = np.add.outer(total, row)
        return total.reshape(-1)

    obj = outer_sum(obj_rows)
    mask = obj == obj.min()
    bits = outer_sum(bits_rows)
    mask &= bits == bits[mask].max()
    b_in = outer_sum(bin_rows)
    mask &= b_in == b_in[mask].max()
    flat = int(np.flatnonzero(mask)[0])
    idx = np.unravel_index(flat, [len(row) for row in table])
    chosen = [table[i][j][0] for i, j in enumerate(idx)]
    return NetworkConfig(lambda_name(net.name, lam), net.with_precisions(chosen).layers, None)


# --- Pareto front ------------------------------------------------------------------

@dataclass(frozen=True)
class ParetoPoint:
    config_name: str
    latency: int
    objective: float


def pareto_front(points: Iterable[ParetoPoint], objective_sense: str = "maximize") -> list:
    """Non-dominated points, sorted by latency; equal (latency, objective) points collapse.

    A point is dominated if another has no more latency and no worse objective,
    with at least one strict. Among duplicates the lexicographically first
    config name is kept.
    """
    if objective_sense not in ("maximize", "minimize"):
        raise ValueError(f"objective_sense must be 'maximize' or 'minimize', got {objective_sense!r}")
    sign = -1 if objective_sense == "maximize" else 1
    ordered = sorted(points, key=lambda p: (p.latency, sign * p.objective, p.config_name))
    front = []
    best = None
    for p in ordered:
        v = sign * p.objective
        if best is None or v < best:
            front.append(p)
            best = v
    return front
