import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freebits.errors import TopologyMismatchError, UnprofiledConfigError
from freebits.heuristic import free_bits
from freebits.latdict import LatencyDictionary
from freebits.metrics import (ConfigReport, compare, format_accuracy, format_delta, layer_bops,
                              macs, render_table, reports_to_json, round_percent, total_bops,
                              total_latency)
from freebits.netmodel import (BIT_WIDTHS, FULL_SET, LayerType,
                               PrecisionPair as P, build_network, canonical_key)

from _instances import random_instance

PW = LayerType("pointwise_conv2d", 8, 8, 16, 32)
DW = LayerType("depthwise_conv2d", 8, 8, 16, 16, 3, 3, 1, 1, 16, 1, 1)
ADD = LayerType("add", 8, 8, 16, 16)


def brute_force_macs(lt):
    """Count MACs by walking every output position and kernel tap."""
    count = 0
    cin_per_group = lt.in_channels // lt.groups
    for oy in range(lt.out_height):
        for ox in range(lt.out_width):
            for _ in range(lt.out_channels):
                for ky in range(lt.kernel_h):
                    for kx in range(lt.kernel_w):
                        count += cin_per_group
    return count


def test_macs_examples():
    assert macs(PW) == 8 * 8 * 32 * 16 == 32768
    assert macs(DW) == 8 * 8 * 16 * 9 == 9216
    assert macs(ADD) == 1024
    for lt in (PW, DW, LayerType("conv2d", 9, 7, 6, 4, 3, 2, 2, 1, 2, 1, 0)):
        assert macs(lt) == brute_force_macs(lt)


def test_layer_bops_examples():
    assert layer_bops(PW, P(4, 4)) == 524288
    assert layer_bops(DW, P(8, 2)) == 147456
    assert layer_bops(DW, P(8, 8)) == 64 * macs(DW)


def test_layer_bops_monotone():
    for lt in (PW, DW, ADD):
        for a in BIT_WIDTHS:
            for w in BIT_WIDTHS:
                for a2 in BIT_WIDTHS:
                    if a2 >= a:
                        assert layer_bops(lt, P(a2, w)) >= layer_bops(lt, P(a, w))
                        assert layer_bops(lt, P(w, a2)) >= layer_bops(lt, P(w, a))


def three_layer_net():
    lts = [LayerType("pointwise_conv2d", 8, 8, 16, 32 + i) for i in range(3)]
    ld = LatencyDictionary({(canonical_key(lt), P(8, 8)): c for lt, c in zip(lts, (100, 200, 50))})
    return build_network("three", [(f"l{i}", lt, P(8, 8)) for i, lt in enumerate(lts)]), ld


def test_total_latency_sums_layers():
    net, ld = three_layer_net()
    assert total_latency(ld, net) == 350


def test_total_latency_names_unprofiled_layer():
    net, ld = three_layer_net()
    bad = net.with_precisions([P(8, 8), P(4, 4), P(8, 8)])
    with pytest.raises(UnprofiledConfigError, match="l1") as exc:
        total_latency(ld, bad)
    assert exc.value.pair == P(4, 4)


def test_total_latency_mnv1_fold(mnv1_4b, nnv1_dict):
    expected = 0
    for layer in mnv1_4b.layers:
        expected += nnv1_dict.entries[(canonical_key(layer.layer_type), layer.precision)]
    assert total_latency(nnv1_dict, mnv1_4b) == expected


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.data())
def test_total_latency_additive(seed, data):
    net, ld = random_instance(random.Random(seed))
    if len(net) < 2:
        return
    cut = data.draw(st.integers(1, len(net) - 1))
    head = build_network("h", [(l.id, l.layer_type, l.precision) for l in net.layers[:cut]])
    tail = build_network("t", [(l.id, l.layer_type, l.precision) for l in net.layers[cut:]])
    assert total_latency(ld, head) + total_latency(ld, tail) == total_latency(ld, net)


def test_compare_identical_is_zero():
    net, ld = three_layer_net()
    rep = compare(ld, net, net)
    assert rep.latency_vs_baseline == 0
    assert format_delta(rep.latency_vs_baseline) == "+0.0%"
    assert sum(c for _, c in rep.per_layer) == rep.total_latency == 350


def test_compare_relative_delta():
    lt = LayerType("pointwise_conv2d", 8, 8, 16, 32)
    ld = LatencyDictionary({(canonical_key(lt), P(8, 8)): 1000, (canonical_key(lt), P(4, 4)): 720})
    base = build_network("8b", [("l", lt, P(8, 8))], accuracy=69.1)
    cfg = build_network("4b", [("l", lt, P(4, 4))], accuracy=65.6)
    rep = compare(ld, cfg, base)
    assert rep.latency_vs_baseline == Fraction(-28)
    assert format_delta(rep.latency_vs_baseline) == "-28.0%"
    assert rep.accuracy_annotation == 65.6
    assert rep.total_bops == 32768 * 16


def test_compare_rejects_other_topology():
    net, ld = three_layer_net()
    other = build_network("x", [(l.id, l.layer_type, l.precision) for l in net.layers[:2]])
    with pytest.raises(TopologyMismatchError):
        compare(ld, other, net)


def test_report_breakdown_must_sum():
    with pytest.raises(ValueError):
        ConfigReport("x", 10, 0, Fraction(0), None, (("a", 4), ("b", 5)))


@pytest.mark.parametrize("value, text", [
    (Fraction(-279, 10), "-27.9%"),
    (Fraction(-27925, 1000), "-27.9%"),     # half to even
    (Fraction(-27975, 1000), "-28.0%"),
    (Fraction(1, 40), "+0.0%"),             # 0.025 -> 0.0
    (Fraction(-1, 40), "+0.0%"),
    (Fraction(3, 40), "+0.1%"),             # 0.075 -> 0.1 (even)
    (Fraction(499, 10), "+49.9%"),
])
def test_percent_formatting(value, text):
    assert format_delta(value) == text


def test_round_percent_is_exact():
    # 0.15 is not exact in binary; exact arithmetic rounds half to even: 0.2
    assert str(round_percent(Fraction(15, 100))) == "0.2"
    assert str(round_percent(Fraction(25, 100))) == "0.2"


def test_table_row_formatting():
    reports = [ConfigReport("mnv1 knee", 721, 0, Fraction(-279, 10), 68.6),
               ConfigReport("8b baseline", 1000, 0, Fraction(0), 69.1)]
    table = render_table(reports)
    lines = table.splitlines()
    assert [c.strip() for c in lines[0].split(" | ")] == ["Config", "Latency [cyc]", "Lat. vs 8b", "Acc."]
    assert "-27.9%" in lines[2] and "68.6%" in lines[2]
    assert "+0.0%" in lines[3] and "69.1%" in lines[3]
    assert format_accuracy(None) == "n/a"
    assert '"latency_vs_baseline_pct": -27.9' in reports_to_json(reports)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_free_bits_trades_bops_for_latency(seed):
    net, ld = random_instance(random.Random(seed))
    out = free_bits(ld, net, FULL_SET)
    assert total_latency(ld, out) <= total_latency(ld, net)
    assert total_bops(out) >= total_bops(net)
