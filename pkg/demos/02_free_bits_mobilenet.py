"""
Free bits on a MobileNetV1-style network
========================================

Quantize every layer to 4 bits, then let the heuristic hand back bits that
cost no extra cycles.
"""

# %%
# Network and latency table
# -------------------------
#
# The first convolution keeps 8-bit inputs since images arrive as bytes.

from freebits import (FULL_SET, NetworkConfig, PrecisionPair, builtin_profile, compare, free_bits,
                      generate_dict, homogeneous_config, render_table, total_bops)
from freebits.zoo import mobilenet_v1_075

base = mobilenet_v1_075(name="8b")
ld = generate_dict(builtin_profile("xpulpnnv1"), base, FULL_SET)
q4 = homogeneous_config(base, PrecisionPair(4, 4), first_input_bits=8)
q4 = NetworkConfig("4b", q4.layers)
print(len(base), "layers,", len(ld.keys()), "distinct layer types,", len(ld), "table entries")

# %%
# Applying the heuristic
# ----------------------

fb = free_bits(ld, q4, FULL_SET)
fb = NetworkConfig("4b + free bits", fb.layers)
for old, new in zip(q4.layers, fb.layers):
    if old.precision != new.precision:
        print(f"{old.id}: {old.precision} -> {new.precision}")
print("BOPs", total_bops(q4), "->", total_bops(fb))

# %%
# Comparison against the 8-bit network
# -------------------------------------

print(render_table([compare(ld, net, base) for net in (base, q4, fb)]))
