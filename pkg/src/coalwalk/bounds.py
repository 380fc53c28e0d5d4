"""Bound expressions and explicit-constant inequality checks.

Two kinds of rows come out of here. Explicit-constant inequalities are
theorems with all constants pinned; they get hard pass/fail verdicts and a
failure means an implementation bug. Asymptotic expressions carry an
unknown constant; they are only ever reported as ratios for the scaling
harness, never converted into hard checks without a declared harness
constant.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import chain
from .chain import CollisionStats
from .errors import MissingQuantity
from .graphs import Graph, VERTEX_TRANSITIVE
from .seeding import StepStream, mix64
from .simulate import Estimate

_E = math.e
_REL_TOL = 1e-9  # float slack on exact theorem comparisons


# ---------------------------------------------------------------------------
# Bound expressions
# ---------------------------------------------------------------------------

def bound_coal_mixtradeoff(t_meet: float, t_mix: float, n: int) -> float:
    """t_meet * (1 + sqrt(t_mix/t_meet) * ln n); asymptotic, constant 1."""
    if t_meet <= 0 or t_mix < 0:
        raise ValueError("times must be positive")
    return t_meet * (1.0 + math.sqrt(t_mix / t_meet) * math.log(n))


def bound_meet_interval(cs: CollisionStats) -> tuple[float, float]:
    """Explicit two-sided collision bound.

    Lower end bounds the stationary-start meeting time from below, upper
    end bounds every pairwise meeting time from above.
    """
    lo = cs.c_min / (64.0 * cs.pi_norm_sq)
    hi = 5.0 * _E ** 2 * cs.c_max / cs.pi_norm_sq
    return lo, hi


def bound_meet_hit(t_hit_value: float) -> float:
    """Explicit bound: every meeting time is at most 4 * t_hit."""
    return 4.0 * t_hit_value


def bound_hit_spectral(n: int, degree_ratio: float, lambda2: float) -> float:
    """degree_ratio * n / sqrt(1 - lambda2); asymptotic (ratio only)."""
    if not 0 <= lambda2 < 1:
        raise ValueError("lambda2 must be in [0, 1)")
    return degree_ratio * n / math.sqrt(1.0 - lambda2)


def bound_coal_beer(t_meet: float, k: int) -> float:
    """t_meet * ln k for coalescence from k walks; asymptotic."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return t_meet * math.log(k)


@dataclass(frozen=True)
class SandwichResult:
    lower: float
    upper: float
    lower_ok: bool
    upper_ok: bool

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def sandwich_avgmeet(t_mix: float, t_meet_pi: float,
                     t_meet: float) -> SandwichResult:
    """Explicit sandwich between worst-case and stationary meeting times:

        max(t_mix / e, t_meet_pi) <= t_meet
                                  <= 2/(1-1/e)^2 * (4 t_mix + 2 t_meet_pi)
    """
    lower = max(t_mix / _E, t_meet_pi)
    upper = 2.0 / (1.0 - 1.0 / _E) ** 2 * (4.0 * t_mix + 2.0 * t_meet_pi)
    return SandwichResult(
        lower, upper,
        lower_ok=lower <= t_meet * (1 + _REL_TOL) + _REL_TOL,
        upper_ok=t_meet <= upper * (1 + _REL_TOL) + _REL_TOL)


# ---------------------------------------------------------------------------
# Measured quantities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasuredQuantities:
    """Everything the relation checks consume, for one graph."""
    n: int
    family: str | None
    t_hit: float
    t_mix: int
    t_mix_method: str
    t_sep: int
    lambda2: float
    pi_norm_sq: float
    pi_min: float
    collision: CollisionStats
    degree_ratio: float
    t_meet: float | None = None
    t_meet_pi: float | None = None
    t_mix_bracket: tuple[int, int] | None = None
    t_coal_estimate: Estimate | None = None
    vertex_transitive: bool = False

    def to_dict(self) -> dict:
        out = {
            "n": self.n, "family": self.family, "t_hit": self.t_hit,
            "t_mix": self.t_mix, "t_mix_method": self.t_mix_method,
            "t_sep": self.t_sep, "lambda2": self.lambda2,
            "pi_norm_sq": self.pi_norm_sq, "pi_min": self.pi_min,
            "c_max": self.collision.c_max, "c_min": self.collision.c_min,
            "r_max": self.collision.r_max,
            "t_mix_used_for_collisions": self.collision.t_mix_used,
            "degree_ratio": self.degree_ratio,
            "t_meet": self.t_meet, "t_meet_pi": self.t_meet_pi,
            "vertex_transitive": self.vertex_transitive,
        }
        if self.t_mix_bracket is not None:
            out["t_mix_bracket"] = list(self.t_mix_bracket)
        if self.t_coal_estimate is not None:
            out["t_coal_mean"] = self.t_coal_estimate.mean
            out["t_coal_stderr"] = self.t_coal_estimate.stderr
        return out


def measure(g: Graph, meeting_limit: int = 100,
            t_coal_estimate: Estimate | None = None) -> MeasuredQuantities:
    """Compute every exact quantity the relation checks need.

    Meeting times are skipped (left None) when the product-chain solve
    would exceed ``meeting_limit`` vertices.
    """
    pi = chain.stationary(g)
    mix = chain.mixing_time(g)
    cs = chain.collision_stats(g, t_mix_value=mix.value)
    t_meet = t_meet_pi = None
    if g.n <= meeting_limit:
        meet = chain.meeting_exact(g, limit=meeting_limit)
        t_meet, t_meet_pi = meet.t_meet, meet.t_meet_pi
    return MeasuredQuantities(
        n=g.n, family=g.family,
        t_hit=chain.t_hit(g),
        t_mix=mix.value, t_mix_method=mix.method, t_mix_bracket=mix.bracket,
        t_sep=chain.separation_time(g),
        lambda2=chain.spectral(g).lambda2,
        pi_norm_sq=float(pi @ pi), pi_min=float(pi.min()),
        collision=cs, degree_ratio=g.deg_max / g.deg_min,
        t_meet=t_meet, t_meet_pi=t_meet_pi,
        t_coal_estimate=t_coal_estimate,
        vertex_transitive=g.family in VERTEX_TRANSITIVE)


# ---------------------------------------------------------------------------
# Relation report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    relation: str
    rhs: float
    explicit: bool
    passed: bool | None  # None marks asymptotic ratio-only rows
    note: str = ""

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf


@dataclass
class BoundReport:
    checks: list[BoundCheck] = field(default_factory=list)

    def add_explicit(self, name, lhs, relation, rhs, note=""):
        if relation == "<=":
            ok = lhs <= rhs * (1 + _REL_TOL) + _REL_TOL
        else:
            ok = lhs >= rhs * (1 - _REL_TOL) - _REL_TOL
        self.checks.append(BoundCheck(name, float(lhs), relation, float(rhs),
                                      True, bool(ok), note))

    def add_ratio(self, name, lhs, rhs, note=""):
        self.checks.append(BoundCheck(name, float(lhs), "ratio", float(rhs),
                                      False, None, note))

    @property
    def all_explicit_passed(self) -> bool:
        return all(c.passed for c in self.checks if c.explicit)

    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.explicit and not c.passed]

    def to_rows(self) -> list[dict]:
        return [{"name": c.name, "lhs": c.lhs, "rel": c.relation,
                 "rhs": c.rhs, "explicit": c.explicit, "passed": c.passed}
                for c in self.checks]

    def to_json(self) -> str:
        return json.dumps(self.to_rows(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "lhs", "rel", "rhs", "explicit", "passed"])
        for c in self.checks:
            writer.writerow([c.name, repr(c.lhs), c.relation, repr(c.rhs),
                             c.explicit,
                             "" if c.passed is None else c.passed])
        return buf.getvalue()


def verify_relations(g: Graph, mq: MeasuredQuantities) -> BoundReport:
    """Run every explicit-constant inequality against measured values.

    Asymptotic expressions are appended as ratio rows when their inputs
    are available. When the mixing time was only bracketed, each check
    uses the bracket side that keeps it conservative (never a false
    failure) and says so in its note.
    """
    report = BoundReport()
    mix_lo, mix_hi = ((mq.t_mix, mq.t_mix) if mq.t_mix_bracket is None
                      else mq.t_mix_bracket)
    bracket_note = "" if mq.t_mix_bracket is None else "bracketed t_mix"

    report.add_explicit("hit_vs_pi_min", mq.t_hit, ">=",
                        2.0 / mq.pi_min - 2.0)
    report.add_explicit("sep_vs_mix", mq.t_sep, "<=", 4.0 * mix_hi,
                        note=bracket_note)
    if mq.t_meet is not None:
        if mq.t_meet_pi is None:
            raise MissingQuantity("t_meet present but t_meet_pi missing")
        report.add_explicit("meet_vs_hit", mq.t_meet, "<=",
                            bound_meet_hit(mq.t_hit))
        report.add_explicit("meet_sandwich_lower",
                            max(mix_lo / _E, mq.t_meet_pi), "<=", mq.t_meet,
                            note=bracket_note)
        report.add_explicit(
            "meet_sandwich_upper", mq.t_meet, "<=",
            2.0 / (1.0 - 1.0 / _E) ** 2 * (4.0 * mix_hi + 2.0 * mq.t_meet_pi),
            note=bracket_note)
        coll_lo, coll_hi = bound_meet_interval(mq.collision)
        report.add_explicit("collision_lower", coll_lo, "<=", mq.t_meet_pi)
        report.add_explicit("collision_upper", mq.t_meet, "<=", coll_hi)
        if mq.vertex_transitive:
            report.add_explicit("vt_hit_lower", mq.t_hit / 2.0, "<=",
                                mq.t_meet)
            report.add_explicit("vt_hit_upper", mq.t_meet, "<=",
                                2.0 * mq.t_hit)
    report.add_ratio("hit_spectral_ratio", mq.t_hit,
                     bound_hit_spectral(mq.n, mq.degree_ratio, mq.lambda2))
    if mq.t_coal_estimate is not None and mq.t_meet is not None:
        coal = mq.t_coal_estimate.mean
        report.add_ratio("coal_mixtradeoff_ratio", coal,
                         bound_coal_mixtradeoff(mq.t_meet, mq.t_mix, mq.n))
        if mq.n >= 2:
            report.add_ratio("coal_beer_ratio", coal,
                             bound_coal_beer(mq.t_meet, mq.n))
    return report


# ---------------------------------------------------------------------------
# Concentration checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailCheck:
    lam: int
    threshold: float
    frequency: float
    limit: float
    ok: bool


@dataclass(frozen=True)
class ConcentrationReport:
    mean_bound: float
    worst_mean: float
    mean_ok: bool
    tails: tuple[TailCheck, ...]
    walks: int

    @property
    def ok(self) -> bool:
        return self.mean_ok and all(t.ok for t in self.tails)


def _simulate_walk_sums(g: Graph, start: int, steps: int, n_walks: int,
                        seed: int, values_by_time) -> np.ndarray:
    """Vectorized walkers accumulating sum_t f_t(X_t); f may be static."""
    pos = np.full(n_walks, start, dtype=np.int64)
    static = values_by_time.ndim == 1
    sums = np.full(n_walks,
                   values_by_time[start] if static else values_by_time[0, start],
                   dtype=float)
    stream = StepStream(seed)
    for t in range(1, steps):
        uniforms = stream.uniforms(t, n_walks)
        moving = uniforms >= 0.5
        residual = (uniforms[moving] - 0.5) * 2.0
        at = pos[moving]
        ranks = (residual * g.degrees[at]).astype(np.int64)
        np.minimum(ranks, g.degrees[at] - 1, out=ranks)
        pos[moving] = g.indices[g.indptr[at] + ranks]
        sums += values_by_time[pos] if static else values_by_time[t, pos]
    return sums


def check_concentration(g: Graph, target_set, steps: int, trials: int,
                        seed: int, f_values: np.ndarray | None = None,
                        t_hit_value: float | None = None,
                        lambdas=(1, 2, 3)) -> ConcentrationReport:
    """Empirical check of the visit-count concentration inequality.

    For f the indicator of ``target_set`` (or any supplied f in [0, 1]),
    walks of length ``steps`` are launched from every start vertex and the
    per-start empirical means of sum_t f(X_t) are all required to stay
    below 8 * max(t_hit, steps) * mean_pi(f). Pooled tail frequencies at
    lambda * (16 * max(t_hit, steps) * mean_pi(f) + 1) must stay below
    2^-lambda plus three binomial standard errors.
    """
    if f_values is None:
        f_values = np.zeros(g.n)
        f_values[np.asarray(list(target_set), dtype=np.int64)] = 1.0
    else:
        f_values = np.asarray(f_values, dtype=float)
        if f_values.min() < 0 or f_values.max() > 1:
            raise ValueError("f must map into [0, 1]")
    if t_hit_value is None:
        t_hit_value = chain.t_hit(g)
    t_plus = max(t_hit_value, steps)
    f_bar = float(f_values @ chain.stationary(g))
    mean_bound = 8.0 * t_plus * f_bar

    per_start = max(trials // g.n, 2)
    all_sums = []
    worst_mean = 0.0
    for start in range(g.n):
        sums = _simulate_walk_sums(g, start, steps, per_start,
                                   mix64(seed, start), f_values)
        worst_mean = max(worst_mean, float(sums.mean()))
        all_sums.append(sums)
    pooled = np.concatenate(all_sums)
    tails = []
    for lam in lambdas:
        threshold = lam * (16.0 * t_plus * f_bar + 1.0)
        freq = float((pooled >= threshold).mean())
        stderr = math.sqrt(max(freq * (1 - freq), 0.0) / pooled.size)
        limit = 2.0 ** (-lam) + 3.0 * stderr
        tails.append(TailCheck(lam, threshold, freq, limit, freq <= limit))
    return ConcentrationReport(mean_bound=mean_bound, worst_mean=worst_mean,
                               mean_ok=worst_mean <= mean_bound,
                               tails=tuple(tails), walks=pooled.size)


def check_collision_concentration(g: Graph, start: int, target_set,
                                  steps: int, trials: int,
                                  seed: int,
                                  t_hit_value: float | None = None,
                                  lambdas=(1, 2, 3)) -> ConcentrationReport:
    """Time-dependent variant: f_t(v) = 1[v in S] * p^t(start, v).

    The statistic is the expected collision count of an unexposed second
    walk with the simulated one; its bound uses the in-set degree spread
    gamma: mean <= Upsilon = 16 gamma max(t_hit, steps) max_{w in S} pi(w),
    tails at lambda * (2 Upsilon + 1).
    """
    members = np.asarray(sorted(set(int(v) for v in target_set)),
                         dtype=np.int64)
    if t_hit_value is None:
        t_hit_value = chain.t_hit(g)
    t_plus = max(t_hit_value, steps)
    degs = g.degrees[members]
    gamma = float(degs.max() / degs.min())
    pi = chain.stationary(g)
    upsilon = 16.0 * gamma * t_plus * float(pi[members].max())

    rows = np.zeros((steps, g.n))
    row = np.zeros(g.n)
    row[start] = 1.0
    mask = np.zeros(g.n)
    mask[members] = 1.0
    for t in range(steps):
        rows[t] = row * mask
        row = chain.lazy_step(g, row)
    sums = _simulate_walk_sums(g, start, steps, trials, seed, rows)
    tails = []
    for lam in lambdas:
        threshold = lam * (2.0 * upsilon + 1.0)
        freq = float((sums >= threshold).mean())
        stderr = math.sqrt(max(freq * (1 - freq), 0.0) / sums.size)
        limit = 2.0 ** (-lam) + 3.0 * stderr
        tails.append(TailCheck(lam, threshold, freq, limit, freq <= limit))
    return ConcentrationReport(mean_bound=upsilon,
                               worst_mean=float(sums.mean()),
                               mean_ok=float(sums.mean()) <= upsilon,
                               tails=tuple(tails), walks=sums.size)
