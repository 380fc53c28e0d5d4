"""Seeded Monte Carlo simulation of interacting lazy random walks.

Covers pairwise meetings, the coalescing process (walks merge on
co-location, smallest id survives), the synchronous voter model, and the
immortal-group variant in which a designated id set cannot be eliminated.
Every step consumes one uniform per walk id from a counter-based stream
keyed by (trial seed, step), so runs are bitwise reproducible, trials can
execute on any number of workers, and two processes sharing a trial seed
see identical per-(step, id) moves (the paired-seed coupling harness).
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import AllCensored, InvalidIds, InvalidSpec
from .graphs import Graph
from .seeding import StepStream, generator, trial_seed

WORKERS_ENV = "COALWALK_WORKERS"


def default_cap(g: Graph) -> int:
    """Step budget 50 n^3: far above the worst-case coalescence scale."""
    return 50 * g.n ** 3


@dataclass(frozen=True)
class SimSample:
    """One simulated stopping time; ``censored`` means the cap was hit."""
    value: int
    censored: bool
    seed: int
    trajectory: tuple[tuple[int, int], ...] | None = None


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    ci95_lo: float
    ci95_hi: float
    trials: int
    censored_count: int

    @property
    def has_censoring(self) -> bool:
        return self.censored_count > 0

    def overlaps(self, other: "Estimate") -> bool:
        return self.ci95_lo <= other.ci95_hi and other.ci95_lo <= self.ci95_hi


def _move(g: Graph, pos: np.ndarray, uniforms: np.ndarray) -> None:
    """Advance walks in place: stay w.p. 1/2, else uniform neighbor."""
    moving = uniforms >= 0.5
    if not np.any(moving):
        return
    residual = (uniforms[moving] - 0.5) * 2.0
    at = pos[moving]
    ranks = (residual * g.degrees[at]).astype(np.int64)
    np.minimum(ranks, g.degrees[at] - 1, out=ranks)
    pos[moving] = g.indices[g.indptr[at] + ranks]


def _adjacency_lists(g: Graph) -> list[list[int]]:
    lists = g._cache.get("adj_lists")
    if lists is None:
        idx = g.indices.tolist()
        ptr = g.indptr.tolist()
        lists = [idx[ptr[u]:ptr[u + 1]] for u in range(g.n)]
        g._cache["adj_lists"] = lists
    return lists


def simulate_meeting(g: Graph, u: int, v: int, seed: int,
                     cap: int | None = None) -> SimSample:
    """First time two synchronized lazy walks from u and v co-locate."""
    if cap is None:
        cap = default_cap(g)
    if cap < 1:
        raise InvalidSpec("cap must be >= 1")
    if u == v:
        return SimSample(0, False, seed)
    adj = _adjacency_lists(g)
    x, y = int(u), int(v)
    stream = StepStream(seed)
    for t in range(1, cap + 1):
        a, b = stream.uniforms(t, 2).tolist()
        if a >= 0.5:
            nbrs = adj[x]
            rank = int((a - 0.5) * 2.0 * len(nbrs))
            x = nbrs[rank if rank < len(nbrs) else len(nbrs) - 1]
        if b >= 0.5:
            nbrs = adj[y]
            rank = int((b - 0.5) * 2.0 * len(nbrs))
            y = nbrs[rank if rank < len(nbrs) else len(nbrs) - 1]
        if x == y:
            return SimSample(t, False, seed)
    return SimSample(cap, True, seed)


def _merge_min_id(pos, ids):
    order = np.lexsort((ids, pos))
    p, i = pos[order], ids[order]
    keep = np.empty(p.size, dtype=bool)
    keep[0] = True
    np.not_equal(p[1:], p[:-1], out=keep[1:])
    return p[keep], i[keep]


def _merge_immortal(pos, ids, g1_mask):
    is_g1 = g1_mask[ids]
    order = np.lexsort((ids, ~is_g1, pos))
    p, i, g1 = pos[order], ids[order], is_g1[order]
    head = np.empty(p.size, dtype=bool)
    head[0] = True
    np.not_equal(p[1:], p[:-1], out=head[1:])
    group = np.cumsum(head) - 1
    group_has_g1 = g1[head]  # immortals sort first within a vertex group
    keep = np.where(group_has_g1[group], g1, head)
    return p[keep], i[keep]


def _checkpoint(trajectory, t, count):
    if trajectory is not None and (t & (t - 1)) == 0:  # powers of two and 0,1
        trajectory.append((t, count))


def simulate_coalescence(g: Graph, start_vertices=None, seed: int = 0,
                         cap: int | None = None,
                         record_trajectory: bool = False) -> SimSample:
    """Coalescing walks from ``start_vertices`` (default: every vertex).

    All active walks take synchronized lazy steps; walks landing on one
    vertex merge with the smallest id surviving. Returns the first time a
    single walk remains.
    """
    if cap is None:
        cap = default_cap(g)
    starts = (np.arange(g.n) if start_vertices is None
              else np.unique(np.asarray(list(start_vertices), dtype=np.int64)))
    if starts.size == 0:
        raise InvalidSpec("start set must be non-empty")
    width = starts.size
    pos = starts.copy()
    ids = np.arange(width)
    trajectory = [] if record_trajectory else None
    if record_trajectory:
        _checkpoint(trajectory, 0, width)
    if width == 1:
        return SimSample(0, False, seed,
                         tuple(trajectory) if record_trajectory else None)
    stream = StepStream(seed)
    for t in range(1, cap + 1):
        uniforms = stream.uniforms(t, width)
        _move(g, pos, uniforms[ids])
        pos, ids = _merge_min_id(pos, ids)
        if record_trajectory:
            _checkpoint(trajectory, t, pos.size)
        if pos.size == 1:
            return SimSample(t, False, seed,
                             tuple(trajectory) if record_trajectory else None)
    return SimSample(cap, True, seed,
                     tuple(trajectory) if record_trajectory else None)


def simulate_voter(g: Graph, seed: int, cap: int | None = None,
                   lazy: bool = True) -> SimSample:
    """Synchronous voter dynamics from all-distinct opinions.

    Lazy variant (default): each node keeps its opinion w.p. 1/2, else
    adopts a uniform neighbor's previous-round opinion; this is the exact
    dual of the lazy coalescing walks. ``lazy=False`` adopts every round.
    """
    if cap is None:
        cap = default_cap(g)
    opinions = np.arange(g.n)
    if g.n == 1:
        return SimSample(0, False, seed)
    stream = StepStream(seed)
    for t in range(1, cap + 1):
        uniforms = stream.uniforms(t, g.n)
        if lazy:
            adopting = np.flatnonzero(uniforms >= 0.5)
            residual = (uniforms[adopting] - 0.5) * 2.0
        else:
            adopting = np.arange(g.n)
            residual = uniforms
        ranks = (residual * g.degrees[adopting]).astype(np.int64)
        np.minimum(ranks, g.degrees[adopting] - 1, out=ranks)
        sources = g.indices[g.indptr[adopting] + ranks]
        new_opinions = opinions.copy()
        new_opinions[adopting] = opinions[sources]
        opinions = new_opinions
        first = opinions[0]
        if np.all(opinions == first):
            return SimSample(t, False, seed)
    return SimSample(cap, True, seed)


def simulate_immortal(g: Graph, start_vertices, immortal_ids, target_k: int,
                      seed: int, cap: int | None = None, mode: str = "total",
                      record_trajectory: bool = False) -> SimSample:
    """Coalescing walks where the id group ``immortal_ids`` cannot die.

    Merge rule per vertex: if any immortal walk arrives, every arriving
    immortal survives and all mortal walks die; if only mortals arrive,
    the smallest id survives. Ids are 0..k-1 in sorted start-vertex order.

    Stopping: ``mode="total"`` stops when at most ``target_k`` walks
    remain; ``mode="mortal"`` when at most ``target_k`` mortal walks
    remain. ("Fewer than k remain" in the usual phrasing; at-most
    semantics make target_k = |S0| stop at time 0 and keep the immortal
    variant reachable when target_k = |G1|.)
    """
    if cap is None:
        cap = default_cap(g)
    if mode not in ("total", "mortal"):
        raise InvalidSpec(f"unknown stopping mode {mode!r}")
    if target_k < 1:
        raise InvalidSpec("target_k must be >= 1")
    starts = np.unique(np.asarray(list(start_vertices), dtype=np.int64))
    width = starts.size
    g1_list = sorted(int(i) for i in set(immortal_ids))
    if not g1_list or g1_list[0] < 0 or g1_list[-1] >= width:
        raise InvalidIds("immortal ids must be ids of the start ensemble")
    g1_mask = np.zeros(width, dtype=bool)
    g1_mask[g1_list] = True

    pos = starts.copy()
    ids = np.arange(width)
    trajectory = [] if record_trajectory else None

    def stopped(p, i):
        if mode == "total":
            return p.size <= target_k
        return int((~g1_mask[i]).sum()) <= target_k

    if record_trajectory:
        _checkpoint(trajectory, 0, width)
    if stopped(pos, ids):
        return SimSample(0, False, seed,
                         tuple(trajectory) if record_trajectory else None)
    stream = StepStream(seed)
    for t in range(1, cap + 1):
        uniforms = stream.uniforms(t, width)
        _move(g, pos, uniforms[ids])
        pos, ids = _merge_immortal(pos, ids, g1_mask)
        if record_trajectory:
            _checkpoint(trajectory, t, pos.size)
        if stopped(pos, ids):
            return SimSample(t, False, seed,
                             tuple(trajectory) if record_trajectory else None)
    return SimSample(cap, True, seed,
                     tuple(trajectory) if record_trajectory else None)


# ---------------------------------------------------------------------------
# Ensemble estimation
# ---------------------------------------------------------------------------

_KINDS = ("meeting", "coalescence", "voter", "immortal")


def _run_trial(kind: str, g: Graph, params: dict, seed: int,
               cap: int | None) -> SimSample:
    if kind == "meeting":
        if params.get("stationary"):
            # starts drawn from pi per trial; independent of the step stream
            weights = g.degrees / (2.0 * g.m)
            u, v = generator(seed, 1).choice(g.n, size=2, p=weights)
        else:
            u, v = params["u"], params["v"]
        return simulate_meeting(g, u, v, seed, cap)
    if kind == "coalescence":
        return simulate_coalescence(g, params.get("start_vertices"), seed, cap,
                                    params.get("record_trajectory", False))
    if kind == "voter":
        return simulate_voter(g, seed, cap, params.get("lazy", True))
    if kind == "immortal":
        return simulate_immortal(
            g, params["start_vertices"], params["immortal_ids"],
            params["target_k"], seed, cap, params.get("mode", "total"))
    raise InvalidSpec(f"unknown simulation kind {kind!r}")


def _trial_batch_samples(args):
    kind, g, params, seeds, cap = args
    return [_run_trial(kind, g, params, s, cap) for s in seeds]


def estimate(kind: str, g: Graph, params: dict | None, trials: int,
             master_seed: int, cap: int | None = None,
             workers: int | None = None) -> Estimate:
    """Monte Carlo estimate over ``trials`` independent runs.

    Per-trial seeds are derived from (master_seed, trial index), so the
    result is identical for any worker count or scheduling. Censored
    trials are counted and excluded from the mean.
    """
    if kind not in _KINDS:
        raise InvalidSpec(f"unknown simulation kind {kind!r}")
    if trials < 2:
        raise InvalidSpec("trials must be >= 2")
    params = dict(params or {})
    seeds = [trial_seed(master_seed, i) for i in range(trials)]
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        chunk = max(1, trials // (workers * 4))
        batches = [(kind, g, params, seeds[i:i + chunk], cap)
                   for i in range(0, trials, chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [s for batch in pool.map(_trial_batch_samples, batches)
                       for s in batch]
    else:
        results = [_run_trial(kind, g, params, s, cap) for s in seeds]
    values = np.array([float(s.value) for s in results])
    censored = np.array([s.censored for s in results])
    kept = values[~censored]
    if kept.size == 0:
        raise AllCensored(f"all {trials} trials hit the step cap")
    mean = float(np.mean(kept))
    stderr = float(np.std(kept, ddof=1) / np.sqrt(kept.size)) if kept.size > 1 else 0.0
    return Estimate(mean=mean, stderr=stderr,
                    ci95_lo=mean - 1.96 * stderr, ci95_hi=mean + 1.96 * stderr,
                    trials=trials, censored_count=int(censored.sum()))


def paired_batch_means(g: Graph, start_vertices, immortal_ids, target_k: int,
                       batch_trials: int, master_seed: int,
                       cap: int | None = None) -> tuple[float, float, int]:
    """Paired comparison of the standard and immortal processes.

    Runs ``batch_trials`` trials where both processes share each trial
    seed (identical per-(step, id) moves) and returns (mean standard T^k,
    mean immortal T^k, count of steps where the standard process had
    strictly more walks alive than the immortal one). The last value is
    diagnostic: the distributional ordering guaranteed by theory does not
    force pathwise domination under this identity coupling.
    """
    std_vals, imm_vals = [], []
    pathwise_excess = 0
    min_id = [0]
    for i in range(batch_trials):
        seed_i = trial_seed(master_seed, i)
        std = simulate_immortal(g, start_vertices, min_id, target_k, seed_i,
                                cap, mode="total", record_trajectory=True)
        imm = simulate_immortal(g, start_vertices, immortal_ids, target_k,
                                seed_i, cap, mode="total",
                                record_trajectory=True)
        std_vals.append(std.value)
        imm_vals.append(imm.value)
        imm_counts = dict(imm.trajectory)
        for t, count in std.trajectory:
            if t in imm_counts and count > imm_counts[t]:
                pathwise_excess += 1
    return float(np.mean(std_vals)), float(np.mean(imm_vals)), pathwise_excess
