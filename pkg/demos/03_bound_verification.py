"""Run every explicit-constant inequality against measured quantities.

Each relation below is a theorem with pinned constants, so a failure
would mean a solver bug, not an unlucky sample. Asymptotic expressions
appear as ratio rows and are never hard-checked.
"""
from coalwalk import FamilySpec, generate, measure, verify_relations

for spec in (FamilySpec("clique", n=16), FamilySpec("cycle", n=32),
             FamilySpec("barbell", n=32)):
    g = generate(spec, seed=1)
    report = verify_relations(g, measure(g))
    print(f"\n{spec.label()}  (all explicit checks pass: "
          f"{report.all_explicit_passed})")
    for check in report.checks:
        if check.explicit:
            mark = "ok" if check.passed else "VIOLATED"
            print(f"  {check.name:<22} {check.lhs:>10.3f} {check.relation:^3} "
                  f"{check.rhs:>10.3f}   {mark}")
        else:
            print(f"  {check.name:<22} {check.lhs:>10.3f} "
                  f"/ {check.rhs:>9.3f} = {check.ratio:.3f}   (ratio only)")
