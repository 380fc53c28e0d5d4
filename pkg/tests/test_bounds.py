import dataclasses
import math

import numpy as np
import pytest

from coalwalk import bounds, chain
from coalwalk.chain import CollisionStats
from coalwalk.errors import MissingQuantity
from coalwalk.graphs import FamilySpec, generate


@pytest.fixture(scope="module")
def k8_measured():
    g = generate(FamilySpec("clique", n=8))
    return g, bounds.measure(g)


class TestExpressions:
    def test_mixtradeoff_arithmetic(self):
        assert bounds.bound_coal_mixtradeoff(100, 100, math.e) == pytest.approx(200)

    def test_mixtradeoff_limit(self):
        assert bounds.bound_coal_mixtradeoff(50, 1e-12, 10) == pytest.approx(50)

    def test_meet_interval_arithmetic(self):
        cs = CollisionStats(c_max=1, c_min=1, r_max=1, pi_norm_sq=1 / 20,
                            t_mix_used=1)
        lo, hi = bounds.bound_meet_interval(cs)
        assert lo == pytest.approx(20 / 64)
        assert hi == pytest.approx(5 * math.e ** 2 * 20)

    def test_meet_hit(self):
        assert bounds.bound_meet_hit(14) == 56.0

    def test_hit_spectral(self):
        assert bounds.bound_hit_spectral(8, 1.0, 0.0) == 8.0

    def test_coal_beer(self):
        assert bounds.bound_coal_beer(10, round(math.e)) == pytest.approx(
            10 * math.log(3))
        assert bounds.bound_coal_beer(7, 2) == pytest.approx(7 * math.log(2))


class TestSpectralHitRatio:
    @pytest.mark.parametrize("family,sizes", [
        ("cycle", (64, 128, 256)),
        ("random_regular", (64, 128, 256)),
    ])
    def test_ratio_bounded_across_sizes(self, family, sizes):
        ratios = []
        for n in sizes:
            spec = (FamilySpec(family, n=n, degree=4)
                    if family == "random_regular" else FamilySpec(family, n=n))
            g = generate(spec, seed=2)
            expr = bounds.bound_hit_spectral(
                g.n, g.deg_max / g.deg_min, chain.spectral(g).lambda2)
            ratios.append(chain.t_hit(g) / expr)
        assert max(ratios) <= 4.0
        assert max(ratios) / min(ratios) <= 2.5


class TestSandwich:
    def test_k2_exact_values_pass(self):
        # t_mix = 1, t_meet_pi = 1, t_meet = 2 for the two-vertex clique
        result = bounds.sandwich_avgmeet(1.0, 1.0, 2.0)
        assert result.ok

    def test_synthetic_violation_detected(self):
        result = bounds.sandwich_avgmeet(1.0, 0.0, 1e6)
        assert not result.upper_ok and not result.ok

    def test_all_small_families(self, small_graph):
        if small_graph.n > 100:
            pytest.skip("beyond exact-meeting limit")
        meet = chain.meeting_exact(small_graph)
        t_mix = chain.mixing_time(small_graph).value
        assert bounds.sandwich_avgmeet(t_mix, meet.t_meet_pi, meet.t_meet).ok


class TestVerifyRelations:
    def test_k8_all_explicit_pass(self, k8_measured):
        g, mq = k8_measured
        report = bounds.verify_relations(g, mq)
        assert report.all_explicit_passed
        names = {c.name for c in report.checks}
        assert {"hit_vs_pi_min", "sep_vs_mix", "meet_vs_hit",
                "meet_sandwich_lower", "meet_sandwich_upper",
                "collision_lower", "collision_upper"} <= names

    def test_vertex_transitive_applied_on_cycle(self):
        g = generate(FamilySpec("cycle", n=32))
        report = bounds.verify_relations(g, bounds.measure(g))
        names = [c.name for c in report.checks]
        assert "vt_hit_lower" in names and "vt_hit_upper" in names
        assert report.all_explicit_passed

    def test_vertex_transitive_skipped_on_barbell(self):
        g = generate(FamilySpec("barbell", n=32))
        report = bounds.verify_relations(g, bounds.measure(g))
        assert "vt_hit_lower" not in [c.name for c in report.checks]
        assert report.all_explicit_passed

    def test_live_failure_detection(self, k8_measured):
        g, mq = k8_measured
        poisoned = dataclasses.replace(mq, t_meet=1e6 * mq.t_mix,
                                       t_meet_pi=0.0)
        report = bounds.verify_relations(g, poisoned)
        assert not report.all_explicit_passed
        assert any(c.name == "meet_vs_hit" for c in report.failures())

    def test_missing_quantity(self, k8_measured):
        g, mq = k8_measured
        broken = dataclasses.replace(mq, t_meet_pi=None)
        with pytest.raises(MissingQuantity):
            bounds.verify_relations(g, broken)

    def test_asymptotic_rows_are_ratio_only(self, k8_measured):
        g, mq = k8_measured
        report = bounds.verify_relations(g, mq)
        for check in report.checks:
            if not check.explicit:
                assert check.passed is None
                assert check.relation == "ratio"

    def test_serialization(self, k8_measured):
        g, mq = k8_measured
        report = bounds.verify_relations(g, mq)
        text = report.to_csv()
        header = text.splitlines()[0]
        assert header == "name,lhs,rel,rhs,explicit,passed"
        assert len(text.splitlines()) == len(report.checks) + 1
        rows = report.to_rows()
        assert all(set(r) == {"name", "lhs", "rel", "rhs", "explicit",
                              "passed"} for r in rows)
        assert report.to_json().startswith("[")


class TestMeasure:
    def test_skips_meeting_above_limit(self):
        g = generate(FamilySpec("cycle", n=40))
        mq = bounds.measure(g, meeting_limit=10)
        assert mq.t_meet is None and mq.t_meet_pi is None
        report = bounds.verify_relations(g, mq)
        assert report.all_explicit_passed  # meeting rows skipped

    def test_vertex_transitive_flag(self):
        assert bounds.measure(generate(FamilySpec("torus", dim=2, side=3))
                              ).vertex_transitive
        assert not bounds.measure(generate(FamilySpec("path", n=8))
                                  ).vertex_transitive

    def test_to_dict_roundtrips_to_json(self, k8_measured):
        import json
        _, mq = k8_measured
        assert json.loads(json.dumps(mq.to_dict()))["n"] == 8


class TestConcentration:
    def test_zero_function_trivially_passes(self):
        g = generate(FamilySpec("cycle", n=16))
        report = bounds.check_concentration(g, [], steps=30, trials=64,
                                            seed=1, t_hit_value=100.0)
        assert report.ok and report.worst_mean == 0.0

    def test_cycle_single_vertex_indicator(self):
        g = generate(FamilySpec("cycle", n=32))
        t_hit_value = chain.t_hit(g)
        report = bounds.check_concentration(g, [0], int(t_hit_value),
                                            trials=2000, seed=3,
                                            t_hit_value=t_hit_value)
        assert report.mean_ok
        assert all(t.ok for t in report.tails)

    def test_star_center_stress(self):
        g = generate(FamilySpec("star", n=32))
        t_hit_value = chain.t_hit(g)
        report = bounds.check_concentration(g, [0], int(t_hit_value),
                                            trials=2000, seed=4,
                                            t_hit_value=t_hit_value)
        assert report.ok

    def test_rejects_f_out_of_range(self):
        g = generate(FamilySpec("cycle", n=8))
        with pytest.raises(ValueError):
            bounds.check_concentration(g, [], steps=10, trials=8, seed=1,
                                       f_values=np.full(8, 1.5))

    def test_collision_variant(self):
        g = generate(FamilySpec("cycle", n=32))
        t_hit_value = chain.t_hit(g)
        report = bounds.check_collision_concentration(
            g, 0, [0, 1, 31], steps=256, trials=2000, seed=5,
            t_hit_value=t_hit_value)
        assert report.ok
