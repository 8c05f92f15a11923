"""MAC/BOP accounting, end-to-end latency and baseline comparison reports."""
from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

from .errors import NotProfiledError, TopologyMismatchError, UnprofiledConfigError
from .netmodel import LayerType, NetworkConfig, OpKind, PrecisionPair


def macs(lt: LayerType) -> int:
    """Multiply-accumulates of one invocation; an add counts one op per output element."""
    if lt.op_kind is OpKind.ADD:
        return lt.out_elems
    return (lt.out_height * lt.out_width * lt.out_channels
            * lt.kernel_h * lt.kernel_w * (lt.in_channels // lt.groups))


def layer_bops(lt: LayerType, pp: PrecisionPair) -> int:
    return macs(lt) * pp.b_in * pp.b_wt


def total_bops(cnet: NetworkConfig) -> int:
    return sum(layer_bops(layer.layer_type, layer.precision) for layer in cnet.layers)


def layer_latencies(ld, cnet: NetworkConfig) -> list:
    """Per-layer ``(layer id, cycles)`` in execution order."""
    out = []
    for layer in cnet.layers:
        try:
            out.append((layer.id, ld.lookup(layer.layer_type, layer.precision)))
        except NotProfiledError:
            raise UnprofiledConfigError(layer.id, layer.precision) from None
    return out


def total_latency(ld, cnet: NetworkConfig) -> int:
    """End-to-end cycles of a layer-by-layer execution: the sum of layer latencies."""
    return sum(cycles for _, cycles in layer_latencies(ld, cnet))


@dataclass(frozen=True)
class ConfigReport:
    name: str
    total_latency: int
    total_bops: int
    latency_vs_baseline: Fraction
    accuracy_annotation: float | None
    per_layer: tuple = ()

    def __post_init__(self):
        if self.per_layer and sum(c for _, c in self.per_layer) != self.total_latency:
            raise ValueError("per-layer breakdown does not sum to total_latency")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "total_latency": self.total_latency,
            "total_bops": self.total_bops,
            "latency_vs_baseline_pct": float(round_percent(self.latency_vs_baseline)),
            "accuracy": self.accuracy_annotation,
            "per_layer": [{"id": lid, "cycles": c} for lid, c in self.per_layer],
        }


def compare(ld, cnet: NetworkConfig, baseline: NetworkConfig) -> ConfigReport:
    """Report ``cnet`` against ``baseline``; the relative latency is exact, in percent."""
    if len(cnet) != len(baseline) or any(
            a.layer_type != b.layer_type for a, b in zip(cnet.layers, baseline.layers)):
        raise TopologyMismatchError(
            f"{cnet.name!r} and baseline {baseline.name!r} have different layer types")
    per_layer = tuple(layer_latencies(ld, cnet))
    lat = sum(c for _, c in per_layer)
    base = total_latency(ld, baseline)
    return ConfigReport(
        name=cnet.name,
        total_latency=lat,
        total_bops=total_bops(cnet),
        latency_vs_baseline=Fraction(100 * (lat - base), base),
        accuracy_annotation=cnet.accuracy_annotation,
        per_layer=per_layer,
    )


# --- rendering ---------------------------------------------------------------------

def round_percent(value) -> Decimal:
    """Round to one decimal place, half-to-even, exactly (no float detour)."""
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = 60
        d = Decimal(value.numerator) / Decimal(value.denominator)
        d = d.quantize(Decimal("0.1"), rounding=ROUND_HALF_EVEN)
    return d if d != 0 else Decimal("0.0")


def format_delta(value) -> str:
    d = round_percent(value)
    return f"{'-' if d < 0 else '+'}{abs(d)}%"


def format_accuracy(acc) -> str:
    if acc is None:
        return "n/a"
    return f"{round_percent(Fraction(str(acc)))}%"


TABLE_HEADER = ("Config", "Latency [cyc]", "Lat. vs 8b", "Acc.")


def render_table(reports) -> str:
    """Aligned text table with the columns of a latency-vs-8-bit comparison.

    Rows are ordered by total latency, then name.
    """
    rows = [(r.name, str(r.total_latency), format_delta(r.latency_vs_baseline),
             format_accuracy(r.accuracy_annotation))
            for r in sorted(reports, key=lambda r: (r.total_latency, r.name))]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(TABLE_HEADER)]

    def line(cells):
        first = cells[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(cells[1:], widths[1:])]
        return " | ".join([first, *rest]).rstrip()

    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([line(TABLE_HEADER), sep, *(line(r) for r in rows)]) + "\n"


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
