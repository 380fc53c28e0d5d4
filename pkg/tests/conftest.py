import pytest

from coalwalk.graphs import FamilySpec, generate


def small_family_specs():
    """One modest instance per family, for property-style sweeps."""
    return [
        FamilySpec("path", n=12),
        FamilySpec("cycle", n=12),
        FamilySpec("clique", n=8),
        FamilySpec("star", n=10),
        FamilySpec("binary_tree", levels=4),
        FamilySpec("hypercube", dim=4),
        FamilySpec("torus", dim=2, side=4),
        FamilySpec("grid", dim=2, side=4),
        FamilySpec("barbell", n=16),
        FamilySpec("random_regular", n=12, degree=3),
        FamilySpec("lower_bound", n=64, alpha=1.0),
    ]


@pytest.fixture(params=small_family_specs(), ids=lambda s: s.label())
def small_graph(request):
    return generate(request.param, seed=11)
