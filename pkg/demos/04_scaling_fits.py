"""Fit growth exponents against the known orders for standard families.

Hitting times on cycles grow like n^2 and on complete binary trees like
n log n; coalescence on stars grows like log n and on 3-dim tori like n.
The fits below recover those orders from exact solves and seeded
simulation at modest sizes.
"""
import math

from coalwalk import FamilySpec, chain, estimate, fit_scaling, generate

cycle_series = [(n, chain.t_hit(generate(FamilySpec("cycle", n=n))))
                for n in (32, 64, 128, 256)]
fit = fit_scaling(cycle_series)
print(f"cycle t_hit exponent: {fit.exponent:.3f} +- {fit.stderr:.3f} "
      f"(R^2 {fit.r_squared:.5f})")

tree_series = [(2 ** lv - 1,
                chain.t_hit(generate(FamilySpec("binary_tree", levels=lv))))
               for lv in (5, 6, 7, 8)]
tree_fit = fit_scaling(tree_series, model="n*log n")
print(f"binary tree t_hit / (n ln n) spread: {tree_fit.ratio_min:.3f} .. "
      f"{tree_fit.ratio_max:.3f}")

print("\nstar coalescence vs log n (300 trials each):")
for n in (64, 256, 1024):
    est = estimate("coalescence", generate(FamilySpec("star", n=n)), {},
                   trials=300, master_seed=4)
    print(f"  n={n:>5}  mean={est.mean:6.2f}   mean/ln n={est.mean / math.log(n):.3f}")

torus_series = []
for side in (4, 5, 6):
    g = generate(FamilySpec("torus", dim=3, side=side))
    est = estimate("coalescence", g, {}, trials=300, master_seed=5)
    torus_series.append((g.n, est.mean))
torus_fit = fit_scaling(torus_series + [(8 ** 3, estimate(
    "coalescence", generate(FamilySpec("torus", dim=3, side=8)), {},
    trials=300, master_seed=5).mean)])
print(f"\n3-dim torus t_coal exponent: {torus_fit.exponent:.3f}")
