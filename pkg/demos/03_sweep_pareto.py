"""
Lagrangian sweep and the Pareto front
=====================================

Trade a per-layer sensitivity penalty against latency, then polish each
sweep point with free bits and keep the non-dominated ones.
"""

# %%
# Setup
# -----
#
# The stem and classifier are treated as more sensitive than the rest.

from freebits import (FULL_SET, ParetoPoint, SensitivityModel, builtin_profile, free_bits,
                      generate_dict, lagrangian_sweep, pareto_front, total_latency)
from freebits.search import default_lambdas
from freebits.zoo import mobilenet_v1_075

net = mobilenet_v1_075()
ld = generate_dict(builtin_profile("xpulpnnv1"), net, FULL_SET)
sens = SensitivityModel.from_scales(net, FULL_SET, {"conv1": 4, "fc": 2})

# %%
# Sweep
# -----
#
# Small lambdas favour accuracy, large ones favour cycles.

lambdas = default_lambdas()
points = []
for k, (lam, cfg) in enumerate(zip(lambdas, lagrangian_sweep(net, ld, sens, lambdas, FULL_SET))):
    opt = free_bits(ld, cfg, FULL_SET)
    points.append(ParetoPoint(f"cfg_{k:02d}", total_latency(ld, opt), float(sens.total(opt))))
    print(f"lambda={lam:<10.3g} latency={total_latency(ld, cfg):>9} -> {points[-1].latency:>9}"
          f"  penalty={points[-1].objective:g}")

# %%
# Non-dominated configurations
# ----------------------------

for p in pareto_front(points, "minimize"):
    print(p)
