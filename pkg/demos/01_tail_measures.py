"""A first tour of the dependent tail risk measures.

We work with the running example of the library: a heavy-tailed Lomax
loss S coupled to an associate loss Y through a Clayton copula with
strong lower-tail dependence, and compare the plain quantile (VaR), the
tail mean (CoVaR), the band-truncated tail mean (MCoVaR), the dependent
band measure (DCoVaR) and the joint-exceedance measure (CCoVaR).
"""

from dcovar import (
    Clayton,
    DependentPair,
    GammaDist,
    ParetoLomax,
    RiskLevels,
    ccovar,
    covar,
    dcovar_quantile_form,
    joint_significance,
    mcovar,
    var,
)

# The target: a unit-shape Lomax loss with scale 1.5. Its mean is
# infinite, so the classical tail mean does not exist -- the band
# truncation is what makes a finite forecast possible.
target = ParetoLomax(1.5)
associate = ParetoLomax(1.5)
copula = Clayton(7.0)
pair = DependentPair(target, associate, copula)

levels = RiskLevels(alpha=0.90, a=0.1, delta=0.90, d=0.1)

print("conditioning band of the target: "
      f"[{var(target, levels.alpha):.4f}, {var(target, levels.alpha1):.4f}]")
print(f"joint significance level: {100 * joint_significance(copula, levels):.2f}%")
print(f"VaR_0.90          = {var(target, 0.90):.4f}")
print(f"MCoVaR            = {mcovar(target, 0.90, 0.1):.4f}")
print(f"DCoVaR            = {dcovar_quantile_form(pair, levels):.4f}")

# With a finite-mean target the full ordering becomes visible:
# the truncated band mean is the smallest, conditioning on a dependent
# associate pushes it up, and dropping the upper truncation entirely
# (the joint-exceedance measure) is the largest.
finite_target = GammaDist(1.0)  # unit exponential
finite_pair = DependentPair(finite_target, associate, copula)
d0 = RiskLevels(0.90, 0.1, 0.90, 0.0)
print("\nordering for an exponential target (delta band open above):")
print(f"  MCoVaR = {mcovar(finite_target, 0.90, 0.1):.4f}")
print(f"  DCoVaR = {dcovar_quantile_form(finite_pair, d0):.4f}")
print(f"  CoVaR  = {covar(finite_target, 0.90):.4f}")
print(f"  CCoVaR = {ccovar(finite_pair, 0.90, 0.90):.4f}")
