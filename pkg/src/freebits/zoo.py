"""Reference network topologies, as chains of layer types.

Shapes are fixed (width multiplier and resolution are baked in), matching the
networks used to evaluate the free-bits heuristic.
"""
from __future__ import annotations

from .netmodel import LayerType, NetworkConfig, PrecisionPair, build_network
from .search import homogeneous_config

# (out channels, stride) of the 13 depthwise-separable blocks at width 1.0
_MNV1_BLOCKS = [(64, 1), (128, 2), (128, 1), (256, 2), (256, 1), (512, 2),
                (512, 1), (512, 1), (512, 1), (512, 1), (512, 1), (1024, 2), (1024, 1)]


def mobilenet_v1_075(precision=PrecisionPair(8, 8), name="mnv1_075", accuracy=None) -> NetworkConfig:
    """MobileNetV1, width 0.75, 224x224 input: 28 layers.

    Stem conv, 13 depthwise/pointwise pairs and the classifier; pooling and
    softmax carry no kernel invocation of interest and are omitted. The stem
    reads 8-bit image data, so its input precision is pinned to 8.
    """
    pp = PrecisionPair(8, 8)
    specs = [("conv1", LayerType("conv2d", 224, 224, 3, 24, 3, 3, 2, 2, 1, 1, 1), pp)]
    size, ch = 112, 24
    for i, (c_out, stride) in enumerate(_MNV1_BLOCKS, start=1):
        c_out = c_out * 3 // 4
        specs.append((f"dw{i}", LayerType("depthwise_conv2d", size, size, ch, ch,
                                          3, 3, stride, stride, ch, 1, 1), pp))
        size = (size + 2 - 3) // stride + 1
        specs.append((f"pw{i}", LayerType("pointwise_conv2d", size, size, ch, c_out), pp))
        ch = c_out
    specs.append(("fc", LayerType("linear", 1, 1, ch, 1000), pp))
    return homogeneous_config(build_network(name, specs, accuracy), precision, first_input_bits=8)
