"""Exact quantities of the lazy random walk on a graph.

Everything here is deterministic linear algebra on the lazy transition
matrix P = I/2 + D^{-1}A/2: the stationary distribution, t-step rows,
total-variation mixing and separation times, the spectral gap, hitting
times, exact meeting times via the synchronous product chain, and the
collision statistics (expected co-location and return counts over a
mixing-time window) that drive the explicit meeting-time sandwich.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.spatial.distance import pdist

from .errors import (
    BudgetExceeded,
    ConvergenceFailure,
    LengthMismatch,
    SolverFailure,
    TooLarge,
)
from .graphs import Graph

INV_E = 1.0 / math.e


# ---------------------------------------------------------------------------
# Transition matrix and distributions
# ---------------------------------------------------------------------------

def transition_matrix(g: Graph) -> sp.csr_matrix:
    """Sparse lazy transition matrix P (cached on the graph)."""
    mat = g._cache.get("P")
    if mat is None:
        weights = 0.5 / np.repeat(g.degrees, g.degrees)
        off = sp.csr_matrix((weights, g.indices, g.indptr), shape=(g.n, g.n))
        mat = (off + sp.identity(g.n, format="csr") * 0.5).tocsr()
        g._cache["P"] = mat
    return mat


def _dense_transition(g: Graph) -> np.ndarray:
    mat = g._cache.get("P_dense")
    if mat is None:
        mat = transition_matrix(g).toarray()
        g._cache["P_dense"] = mat
    return mat


def stationary(g: Graph) -> np.ndarray:
    """pi(u) = deg(u) / 2m; the single-vertex graph gets the point mass."""
    if g.n == 1:
        return np.ones(1)
    return g.degrees / (2.0 * g.m)


def lazy_step(g: Graph, dist: np.ndarray) -> np.ndarray:
    """One lazy-walk step d' = d P in a single O(m + n) sparse pass."""
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (g.n,):
        raise LengthMismatch("distribution length != vertex count")
    out = 0.5 * dist
    if g.m:
        contrib = np.repeat(dist / (2.0 * g.degrees), g.degrees)
        out += np.bincount(g.indices, weights=contrib, minlength=g.n)
    else:
        out += 0.5 * dist
    return out


def tstep_row(g: Graph, u: int, t: int) -> np.ndarray:
    """Distribution of the walk after t steps from a point mass at u."""
    if t < 0:
        raise ValueError("t must be >= 0")
    row = np.zeros(g.n)
    row[u] = 1.0
    for _ in range(t):
        row = lazy_step(g, row)
    return row


def tv_distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch("distributions have different lengths")
    return 0.5 * float(np.abs(a - b).sum())


# ---------------------------------------------------------------------------
# Mixing and separation times
# ---------------------------------------------------------------------------

def _rows_at(g: Graph, t: int) -> np.ndarray:
    """Dense P^t (row u = t-step distribution from u), via binary powers.

    Squarings are cached for n <= 512; larger graphs recompute per query.
    """
    if t == 0:
        return np.eye(g.n)
    if g.n <= 512:
        powers = g._cache.setdefault("pow2", {})
        if 0 not in powers:
            powers[0] = _dense_transition(g)
        result = None
        bit = 0
        rem = t
        while rem:
            if bit not in powers:
                powers[bit] = powers[bit - 1] @ powers[bit - 1]
            if rem & 1:
                mat = powers[bit]
                result = mat if result is None else result @ mat
            rem >>= 1
            bit += 1
        return result
    base = _dense_transition(g)
    result = None
    rem = t
    while rem:
        if rem & 1:
            result = base if result is None else result @ base
        rem >>= 1
        if rem:
            base = base @ base
    return result


def _dbar(rows: np.ndarray) -> float:
    """Worst pairwise total-variation distance between rows."""
    if rows.shape[0] < 2:
        return 0.0
    return 0.5 * float(pdist(rows, metric="cityblock").max())


def _dmax(rows: np.ndarray, pi: np.ndarray) -> float:
    """Worst total-variation distance to stationarity."""
    return 0.5 * float(np.abs(rows - pi).sum(axis=1).max())


def _first_time(g: Graph, predicate, max_steps: int, what: str) -> int:
    """Smallest t >= 0 with predicate(P^t) true; predicate monotone in t."""
    if predicate(_rows_at(g, 0)):
        return 0
    t = 1
    while not predicate(_rows_at(g, t)):
        if t >= max_steps:
            raise BudgetExceeded(f"{what}: predicate still false at t={t}")
        t = min(2 * t, max_steps)
    lo, hi = t // 2, t  # predicate false at lo, true at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if predicate(_rows_at(g, mid)):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class MixingResult:
    """Mixing time, either exact (pairwise definition) or bracketed.

    ``method`` is "pairwise" when the worst pairwise distance was
    evaluated exactly, or "bracket" when only the distance to
    stationarity d(t) was used; then ``bracket`` = (min t: d <= eps,
    min t: d <= eps/2) sandwiches the pairwise value and ``value`` is the
    conservative upper endpoint.
    """
    value: int
    method: str
    eps: float
    bracket: tuple[int, int] | None = None

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


def mixing_time(g: Graph, eps: float = INV_E, dense_pairwise_limit: int = 256,
                max_steps: int = 10 ** 8) -> MixingResult:
    """First t at which the worst pairwise TV distance drops to eps.

    Exact for n <= dense_pairwise_limit. Above that, evolving all rows is
    still exact but the pairwise maximum is replaced by the distance to
    stationarity, which sandwiches the pairwise value within the reported
    bracket; the returned value is the bracket's upper end.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    if g.n == 1:
        return MixingResult(0, "pairwise", eps)
    if g.n <= dense_pairwise_limit:
        t = _first_time(g, lambda rows: _dbar(rows) <= eps, max_steps,
                        "mixing_time")
        return MixingResult(t, "pairwise", eps)
    pi = stationary(g)
    hi = _first_time(g, lambda rows: _dmax(rows, pi) <= eps / 2, max_steps,
                     "mixing_time")
    lo = _first_time(g, lambda rows: _dmax(rows, pi) <= eps, hi,
                     "mixing_time")
    return MixingResult(hi, "bracket", eps, bracket=(lo, hi))


def mixing_time_d(g: Graph, eps: float = INV_E,
                  max_steps: int = 10 ** 8) -> int:
    """First t with max_u TV(p_u^t, pi) <= eps (the one-sided variant)."""
    if g.n == 1:
        return 0
    pi = stationary(g)
    return _first_time(g, lambda rows: _dmax(rows, pi) <= eps, max_steps,
                       "mixing_time_d")


def separation_time(g: Graph, eps: float = INV_E,
                    max_steps: int = 10 ** 8) -> int:
    """First t with p^t(u, v) >= (1 - eps) pi(v) for every pair."""
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    if g.n == 1:
        return 0
    pi = stationary(g)
    floor = (1.0 - eps) * pi

    def ok(rows: np.ndarray) -> bool:
        return bool(np.all(rows >= floor - 1e-15))

    return _first_time(g, ok, max_steps, "separation_time")


# ---------------------------------------------------------------------------
# Spectral gap
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralSummary:
    lambda2: float
    gap: float
    method: str
    residual: float


def spectral(g: Graph, dense_limit: int = 2048, tol: float = 1e-8,
             max_iter: int = 500_000) -> SpectralSummary:
    """Second-largest eigenvalue of the lazy walk.

    Works on the symmetric similarity transform D^{1/2} P D^{-1/2}: dense
    eigensolve up to ``dense_limit`` vertices, above that power iteration
    with the known top eigenvector sqrt(pi) deflated.
    """
    if g.n == 1:
        return SpectralSummary(0.0, 1.0, "dense", 0.0)
    dinv = 1.0 / np.sqrt(g.degrees)
    if g.n <= dense_limit:
        sym = 0.5 * np.eye(g.n) + 0.5 * (
            dinv[:, None] * g.adjacency().toarray() * dinv[None, :])
        eigs = np.linalg.eigvalsh(sym)
        lam2 = float(eigs[-2])
        lam2 = min(max(lam2, 0.0), 1.0)
        return SpectralSummary(lam2, 1.0 - lam2, "dense", 0.0)

    adj = g.adjacency()
    top = np.sqrt(stationary(g))
    top /= np.linalg.norm(top)

    def apply_sym(vec: np.ndarray) -> np.ndarray:
        return 0.5 * vec + 0.5 * dinv * (adj @ (dinv * vec))

    vec = np.cos(np.arange(g.n) * (2.0 * math.pi / g.n)) + 0.5
    vec -= top * (top @ vec)
    vec /= np.linalg.norm(vec)
    lam2 = 0.0
    for _ in range(max_iter):
        nxt = apply_sym(vec)
        nxt -= top * (top @ nxt)
        norm = np.linalg.norm(nxt)
        if norm == 0.0:
            return SpectralSummary(0.0, 1.0, "iterative", 0.0)
        nxt /= norm
        lam2 = float(nxt @ apply_sym(nxt))
        resid = float(np.linalg.norm(apply_sym(nxt) - lam2 * nxt))
        vec = nxt
        if resid <= tol:
            return SpectralSummary(min(max(lam2, 0.0), 1.0), 1.0 - lam2,
                                   "iterative", resid)
    raise ConvergenceFailure(
        f"power iteration residual above {tol} after {max_iter} iterations")


# ---------------------------------------------------------------------------
# Hitting times
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HittingProfile:
    """Expected times to reach ``target`` from every start vertex."""
    target: int
    times: np.ndarray
    residual: float
    method: str


def hitting_to(g: Graph, target: int, dense_limit: int = 512,
               tol: float = 1e-10, max_sweeps: int = 200_000) -> HittingProfile:
    """Solve (I - P restricted to V minus {target}) h = 1.

    Dense LU (with one refinement pass) up to ``dense_limit`` vertices,
    Gauss-Seidel sweeps via sparse triangular solves above.
    """
    if g.n == 1:
        return HittingProfile(target, np.zeros(1), 0.0, "dense")
    others = np.flatnonzero(np.arange(g.n) != target)
    rhs = np.ones(g.n - 1)
    if g.n <= dense_limit:
        P = _dense_transition(g)
        A = np.eye(g.n - 1) - P[np.ix_(others, others)]
        h = np.linalg.solve(A, rhs)
        resid = np.abs(A @ h - rhs).max()
        if resid > tol * g.n:
            h = h + np.linalg.solve(A, rhs - A @ h)
            resid = np.abs(A @ h - rhs).max()
        method = "dense"
    else:
        P = transition_matrix(g).tocsr()
        A = (sp.identity(g.n - 1, format="csr")
             - P[others][:, others]).tocsr()
        lower = sp.tril(A, k=0).tocsr()
        upper = sp.triu(A, k=1).tocsr()
        h = np.zeros(g.n - 1)
        resid = math.inf
        for sweep in range(max_sweeps):
            h = spla.spsolve_triangular(lower, rhs - upper @ h, lower=True)
            if sweep % 8 == 7 or sweep == max_sweeps - 1:
                resid = np.abs(A @ h - rhs).max()
                if resid <= tol * g.n:
                    break
        else:
            raise SolverFailure(
                f"Gauss-Seidel residual {resid:.2e} after {max_sweeps} sweeps")
        if resid > tol * g.n:
            raise SolverFailure(
                f"Gauss-Seidel residual {resid:.2e} after {max_sweeps} sweeps")
        method = "gauss-seidel"
    full = np.zeros(g.n)
    full[others] = h
    return HittingProfile(target, full, float(resid), method)


def hitting_matrix(g: Graph, per_target_limit: int = 128) -> np.ndarray:
    """All-pairs expected hitting times H[u, v] = E[time to v from u].

    Small graphs run one restricted solve per target; larger ones use the
    fundamental-matrix identity H[u, v] = (Z[v, v] - Z[u, v]) / pi(v) with
    Z = (I - P + 1 pi^T)^{-1}, one dense solve total. The two routes agree
    to solver precision and the tests hold them to that.
    """
    cached = g._cache.get("hitmat")
    if cached is not None:
        return cached
    if g.n == 1:
        H = np.zeros((1, 1))
    elif g.n <= per_target_limit:
        H = np.column_stack(
            [hitting_to(g, v).times for v in range(g.n)])
    else:
        pi = stationary(g)
        P = _dense_transition(g)
        Z = np.linalg.solve(np.eye(g.n) - P + pi[None, :], np.eye(g.n))
        H = (np.diag(Z)[None, :] - Z) / pi[None, :]
        np.fill_diagonal(H, 0.0)
    g._cache["hitmat"] = H
    return H


def t_hit(g: Graph) -> float:
    """Worst-case expected hitting time max_{u,v} E[time to v from u]."""
    return float(hitting_matrix(g).max())


# ---------------------------------------------------------------------------
# Meeting times (synchronous product chain)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeetingResult:
    t_meet: float
    t_meet_pi: float
    pair: tuple[int, int]
    pairwise: np.ndarray
    residual: float
    method: str


def meeting_exact(g: Graph, limit: int = 100, method: str = "auto",
                  jacobi_tol: float = 1e-8,
                  jacobi_max_sweeps: int = 10 ** 6) -> MeetingResult:
    """Expected meeting times of two independent lazy walks.

    Solves the absorption time of the synchronous product chain over
    ordered off-diagonal pairs: one sparse (or dense, when the product
    operator is dense) linear solve. ``method="jacobi"`` selects the
    damped-free Jacobi iteration instead.

    Returns the worst-case value, the stationary-start average, the argmax
    pair, and the full matrix of pair values.
    """
    if g.n > limit:
        raise TooLarge(f"meeting_exact limited to n <= {limit}, got {g.n}")
    n = g.n
    if n == 1:
        return MeetingResult(0.0, 0.0, (0, 0), np.zeros((1, 1)), 0.0, "direct")
    states = np.arange(n * n)
    offdiag = np.flatnonzero(states // n != states % n)
    N = offdiag.size
    rhs = np.ones(N)
    if method == "auto":
        density = (n + 2.0 * g.m) ** 2 / (float(N) * N)
        method = "dense" if density > 0.02 else "sparse"
    if method == "dense":
        Kd = np.kron(_dense_transition(g), _dense_transition(g))
        K = Kd[np.ix_(offdiag, offdiag)]
        m_vec = np.linalg.solve(np.eye(N) - K, rhs)
    else:
        P = transition_matrix(g)
        K = sp.kron(P, P, format="csr")[offdiag][:, offdiag].tocsr()
        if method == "jacobi":
            m_vec = np.zeros(N)
            for _ in range(jacobi_max_sweeps):
                nxt = rhs + K @ m_vec
                delta = np.abs(nxt - m_vec).max()
                m_vec = nxt
                if delta <= jacobi_tol:
                    break
            else:
                raise SolverFailure("Jacobi for meeting times did not converge")
        else:
            A = (sp.identity(N, format="csr") - K).tocsc()
            m_vec = spla.spsolve(A, rhs)
    resid = float(np.abs(m_vec - (rhs + K @ m_vec)).max())
    full = np.zeros(n * n)
    full[offdiag] = m_vec
    M = full.reshape(n, n)
    pi = stationary(g)
    weights = np.outer(pi, pi)
    t_meet_pi = float((weights * M).sum())
    pair = np.unravel_index(int(np.argmax(M)), (n, n))
    return MeetingResult(float(M.max()), t_meet_pi,
                         (int(pair[0]), int(pair[1])), M, resid, method)


# ---------------------------------------------------------------------------
# Collision statistics over a mixing-time window
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollisionStats:
    """Expected co-location and return counts over t in [0, t_mix).

    c_max/c_min bound the expected collisions of two walks released from
    the same vertex; r_max counts expected returns. The window always
    includes t = 0, so c_min >= 1 and r_max >= 1.
    """
    c_max: float
    c_min: float
    r_max: float
    pi_norm_sq: float
    t_mix_used: int

    def __post_init__(self):
        if self.c_min > self.c_max + 1e-12:
            raise ValueError("c_min exceeds c_max")


def collision_stats(g: Graph, eps: float = INV_E,
                    t_mix_value: int | None = None) -> CollisionStats:
    """Accumulate sum_t sum_v p^t(u,v)^2 and sum_t p^t(u,u) for t < t_mix."""
    if t_mix_value is None:
        t_mix_value = mixing_time(g, eps=eps).value
    window = max(int(t_mix_value), 1)
    P = transition_matrix(g)
    rows = np.eye(g.n)
    sq_sums = np.zeros(g.n)
    returns = np.zeros(g.n)
    for _ in range(window):
        sq_sums += np.einsum("ij,ij->i", rows, rows)
        returns += rows.diagonal()
        rows = rows @ P
    pi = stationary(g)
    return CollisionStats(
        c_max=float(sq_sums.max()), c_min=float(sq_sums.min()),
        r_max=float(returns.max()), pi_norm_sq=float(pi @ pi),
        t_mix_used=window)
