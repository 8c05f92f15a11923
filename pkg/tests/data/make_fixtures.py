"""Regenerate the JSON network fixtures in this directory.

Accuracy annotations are pass-through metadata only (top-1 figures reported
for MobileNetV1 8b/8b and 4b/4b deployments); nothing here computes them.
"""
from pathlib import Path

from freebits.netmodel import LayerType, PrecisionPair, build_network, serialize_network
from freebits.zoo import mobilenet_v1_075

HERE = Path(__file__).parent


def residual_block(pp=PrecisionPair(8, 8)):
    tied = PrecisionPair(pp.b_in, pp.b_in)
    return build_network("residual_block", [
        ("expand", LayerType("pointwise_conv2d", 14, 14, 32, 96), pp),
        ("dw", LayerType("depthwise_conv2d", 14, 14, 96, 96, 3, 3, 1, 1, 96, 1, 1), pp),
        ("project", LayerType("pointwise_conv2d", 14, 14, 96, 32), pp),
        ("add", LayerType("add", 14, 14, 32, 32), tied),
    ])


def main():
    fixtures = {
        "mnv1_8b8b.json": mobilenet_v1_075(PrecisionPair(8, 8), "mnv1_8b8b", 69.1),
        "mnv1_4b4b.json": mobilenet_v1_075(PrecisionPair(4, 4), "mnv1_4b4b", 65.6),
        "residual_block.json": residual_block(),
        "pointwise.json": build_network(
            "pointwise", [("pw", LayerType("pointwise_conv2d", 8, 8, 16, 32), PrecisionPair(8, 8))]),
    }
    for fname, net in fixtures.items():
        (HERE / fname).write_text(serialize_network(net), encoding="utf-8")


if __name__ == "__main__":
    main()
