"""How the dependent forecast moves with the associate's level delta.

The band-truncated tail mean of the target alone (MCoVaR) has no delta
in it and stays flat. The dependent measure rises with delta whenever
the copula concentrates mass in the joint upper tail -- the associate
being deep in its own tail is bad news for the target.
"""

import numpy as np

from dcovar import Clayton, DependentPair, FGM, ParetoLomax
from dcovar.simulate import sweep_delta_curve

target = ParetoLomax(1.5)
associate = ParetoLomax(1.5)
deltas = np.linspace(0.85, 0.97, 9)

for copula in (Clayton(7.0), Clayton(1.0), FGM(0.0)):
    pair = DependentPair(target, associate, copula)
    curve = sweep_delta_curve(pair, alpha=0.9, a=0.1, d=0.1, delta_grid=deltas)
    label = f"{copula.family}(theta={copula.theta})"
    print(f"\n{label}: flat baseline = {curve[0][2]:.4f}")
    for delta, dval, _ in curve:
        bar = "#" * int(round(2 * (dval - 25)))
        print(f"  delta={delta:.3f}  dcovar={dval:8.4f}  {bar}")
