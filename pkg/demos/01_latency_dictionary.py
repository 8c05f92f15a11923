"""
Synthetic latency tables
========================

Build a latency table for one pointwise layer under the three shipped
hardware profiles and look at where the cycles go.
"""

# %%
# One layer, three profiles
# -------------------------
#
# The layer is a 1x1 convolution on a 28x28 feature map, 96 to 192 channels.

from freebits import (FULL_SET, LayerType, PrecisionPair, builtin_profile, latency_terms,
                      synth_latency)

lt = LayerType("pointwise_conv2d", 28, 28, 96, 192)
profiles = {name: builtin_profile(name) for name in ("xpulpv2", "xpulpnnv1", "xpulpnnv2")}

print(f"{'pair':>6} " + " ".join(f"{n:>10}" for n in profiles))
for pp in sorted(FULL_SET):
    print(f"{str(pp):>6} " + " ".join(f"{synth_latency(hp, lt, pp):>10}" for hp in profiles.values()))

# %%
# Breaking a latency down
# -----------------------
#
# Mismatched pairs pay for unpacking the narrower operand in software.
# With hardware unpacking that term disappears.

pair = PrecisionPair(8, 4)
for name in ("xpulpnnv1", "xpulpnnv2"):
    terms = latency_terms(profiles[name], lt, pair)
    print(name, pair, terms)
