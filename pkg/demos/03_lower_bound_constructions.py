#!/usr/bin/env python3
"""Structured profile families where named rules provably do badly.

Upper bounds tell you a rule is never worse than some number; these
generators produce the matching hard instances.  Everything here is
checked numerically with the oracles, so the "hardness" is visible as an
actual ratio, not a formula.
"""

import numpy as np

import distortion_lab as dl

# ---------------------------------------------------------------------
# 1. The veto winner can have terrible *utilitarian* welfare.
#
# prop31_profile makes alternative 0 everyone's consolation prize: it
# survives the veto phase, yet in the worst consistent utility profile
# almost nobody actually values it. The damage grows linearly with n.
print("== veto winner vs. utilitarian welfare ==")
for n in (6, 12, 24):
    p = dl.prop31_profile(n, 3)
    lot, trace = dl.plurality_veto(p)
    rep = dl.utilitarian_distortion(lot, p)
    print(f"n={n:3d}  veto winner={trace.winner}  "
          f"utilitarian distortion={float(rep.value.value):6.2f}  (n/12={n/12:.2f})")
print()

# ---------------------------------------------------------------------
# 2. A line metric where every deterministic choice among the popular
#    block costs 7x the optimum (at m=4).
print("== line metric with a 7x trap ==")
p, met = dl.thm36_instance(m=4, n=4)
costs = np.array([dl.social_cost(met, x) for x in range(p.m)])
print("social costs:", costs.tolist())
print("cost ratio sc(1)/sc(0):", costs[1] / costs[0])
rep = dl.metric_distortion(dl.Lottery(np.array([0.0, 1.0, 0.0, 0.0])), p)
print("metric oracle on the point mass at 1:", rep.value)
print()

# ---------------------------------------------------------------------
# 3. Prefix ballots hide information by design.
#
# thm51_profile splits the first position among m-t+1 leaders and pads
# every ballot with the same fillers, so top-t ballots cannot tell the
# leaders apart from what follows them.
print("== top-t ballots built to be uninformative ==")
p5 = dl.thm51_profile(n=6, m=4, t=2)
print("ballots:", list(p5.prefixes))
rep = dl.metric_distortion(dl.plurality(p5), p5)
print("metric distortion of plurality on the prefix ballots:",
      float(rep.value.value))
print()

# ---------------------------------------------------------------------
# 4. A partitioned top-t family with a tunable target ratio.
#
# thm53_instance takes the desired ratio d_m and solves the layout
# geometry for it; the group count must come out integral, so valid
# (n, m, t, d_m) combinations are constrained.
print("== partitioned top-t family ==")
d_m = 12 * 2**1.5 / (2 * 6**1.5)
p53, met53 = dl.thm53_instance(n=12, m=6, t=2, d_m=d_m)
print("t =", p53.t, " ballots:", list(p53.prefixes[:4]), "...")
print("consistent with its metric:", dl.is_metric_consistent(met53, p53))
costs = [dl.social_cost(met53, x) for x in range(p53.m)]
print("cost spread across alternatives:",
      round(max(costs) / min(costs), 3))
