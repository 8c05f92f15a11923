"""The free-bits heuristic.

Each layer is moved, independently of all others, to the lowest-latency
precision pair that is at least as wide as its current pair in both input and
weight bits. Raising precision is assumed never to hurt accuracy, and with
layer-by-layer execution the network latency is the sum of layer latencies,
so the result is no slower and no less accurate than the input configuration.
"""
from __future__ import annotations

from .errors import UnprofiledConfigError
from .netmodel import LayerType, NetworkConfig, OpKind, PrecisionPair


def higher(a: PrecisionPair, b: PrecisionPair) -> bool:
    """True if ``a`` is at least as wide as ``b`` in both coordinates."""
    return a.b_in >= b.b_in and a.b_wt >= b.b_wt


def preference_key(cycles, pp: PrecisionPair):
    """Sort key for argmin selection: latency, then more total bits, then more input bits."""
    return (cycles, -pp.bits, -pp.b_in)


def admissible_pairs(lt: LayerType, p_all):
    """Pairs of ``p_all`` usable by a layer of type ``lt`` (adds carry no weights)."""
    if lt.op_kind is OpKind.ADD:
        return [pp for pp in p_all if pp.is_matched]
    return list(p_all)


def candidates(ld, lt: LayerType, current: PrecisionPair, p_all, layer_id=None) -> set:
    """Dominating pairs no slower than ``current``; always includes ``current``.

    Pairs without a dictionary entry are skipped; only ``current`` must be present.
    """
    lat0 = ld.get(lt, current)
    if lat0 is None:
        raise UnprofiledConfigError(layer_id if layer_id is not None else str(lt), current)
    out = {current}
    for pp in admissible_pairs(lt, p_all):
        lat = ld.get(lt, pp)
        if lat is not None and lat <= lat0 and higher(pp, current):
            out.add(pp)
    return out


def best_pair(ld, lt: LayerType, current: PrecisionPair, p_all, layer_id=None) -> PrecisionPair:
    cdts = candidates(ld, lt, current, p_all, layer_id)
    return min(cdts, key=lambda pp: preference_key(ld.get(lt, pp), pp))


def free_bits(ld, cnet: NetworkConfig, p_all) -> NetworkConfig:
    """Latency-optimized configuration of ``cnet``; names and annotations are kept."""
    return cnet.with_precisions(
        best_pair(ld, layer.layer_type, layer.precision, p_all, layer.id)
        for layer in cnet.layers)
