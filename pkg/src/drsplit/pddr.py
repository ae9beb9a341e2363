"""Primal-dual Douglas-Rachford splitting with per-iteration stepsizes.

The solver alternates two proxes with a coupled linear correction step.  For
``min_x f(x) + g(Kx)`` each sweep evaluates

    x = prox_{t f}(p)
    y = prox_{s g*}(q)
    (u, v) = inverse of [[I, t K'], [-s K, I]] applied to (2x - p, 2y - q)
    p <- p + u - x
    q <- q + v - y

and the candidate solution is the shadow pair (x, y).  The linear solve goes
through a Cholesky factor of the Schur complement, cached on the product
t * s so constant-stepsize runs factor exactly once.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import linalg
from .linalg import LinearMap, SpdFactor
from .operators import ProxMap
from .ppa_core import IterationDiverged, PreconditionedResolvent

__all__ = [
    "DRState",
    "PdProblem",
    "SolveTrace",
    "StepOutput",
    "TraceRow",
    "block_resolvent",
    "coupling_block_resolvent",
    "dr_as_proximal_point",
    "initial_state",
    "pd_dr_step",
    "preconditioned_dr_step",
    "solve",
    "stacked_prox_resolvent",
]

# A cached factor is reused while t*s stays within this relative tolerance.
CACHE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class PdProblem:
    """Problem data for ``min_x f(x) + g(Kx)``.

    ``f_prox`` evaluates prox_{t f}, ``gstar_prox`` evaluates prox_{s g*}
    (conjugate side), ``coupling`` is K with forward and adjoint application,
    and ``objective`` evaluates the primal objective at a candidate x.
    """

    f_prox: ProxMap
    gstar_prox: ProxMap
    coupling: LinearMap
    objective: Callable[[np.ndarray], float]

    @property
    def primal_dim(self) -> int:
        return self.coupling.cols

    @property
    def dual_dim(self) -> int:
        return self.coupling.rows


@dataclass
class DRState:
    """Mutable iteration state: shadow points, stepsizes, step count, cache."""

    p: np.ndarray
    q: np.ndarray
    t: float
    s: float
    k: int = 0
    factor_cache: SpdFactor | None = None


class StepOutput(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray


class TraceRow(NamedTuple):
    k: int
    objective: float
    t: float
    s: float
    residual: float


@dataclass
class SolveTrace:
    rows: list[TraceRow]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def initial_state(prob: PdProblem, t0: float, s0: float, p0=None, q0=None) -> DRState:
    """Fresh solver state; shadow points default to zero."""
    if t0 <= 0 or s0 <= 0:
        raise ValueError(f"stepsizes must be positive, got t0={t0}, s0={s0}")
    p = np.zeros(prob.primal_dim) if p0 is None else np.asarray(p0, dtype=float).copy()
    q = np.zeros(prob.dual_dim) if q0 is None else np.asarray(q0, dtype=float).copy()
    if p.shape != (prob.primal_dim,) or q.shape != (prob.dual_dim,):
        raise ValueError(
            f"start shapes {p.shape}, {q.shape} do not match problem "
            f"({prob.primal_dim},), ({prob.dual_dim},)"
        )
    return DRState(p=p, q=q, t=float(t0), s=float(s0))


def _cache_valid(cache: SpdFactor | None, ts: float, dim: int) -> bool:
    return (
        cache is not None
        and cache.dim == dim
        and abs(cache.fingerprint - ts) <= CACHE_RTOL * abs(ts)
    )


def block_resolvent(r1, r2, t: float, s: float, coupling: LinearMap,
                    cache: SpdFactor | None = None):
    """Solve u + t K'v = r1, -s K u + v = r2 by Schur complement.

    The factorization acts on whichever side is smaller: I + t*s*K'K when the
    primal dimension is smaller or equal, I + t*s*KK' otherwise.  Returns
    ``(u, v, factor)`` where the factor can be fed back in as ``cache``; it is
    reused as long as t*s is unchanged to relative 1e-12.
    """
    if t <= 0 or s <= 0:
        raise ValueError(f"stepsizes must be positive, got t={t}, s={s}")
    a = np.asarray(r1, dtype=float)
    b = np.asarray(r2, dtype=float)
    rows, cols = coupling.shape
    if a.shape != (cols,) or b.shape != (rows,):
        raise ValueError(
            f"dimension mismatch: rhs shapes {a.shape}, {b.shape} vs operator {coupling.shape}"
        )
    ts = t * s
    dual_side = rows < cols
    dim = rows if dual_side else cols
    if not _cache_valid(cache, ts, dim):
        gram = coupling.gram_rows if dual_side else coupling.gram_cols
        cache = linalg.spd_factor(np.eye(dim) + ts * gram, fingerprint=ts)
    if dual_side:
        v = linalg.spd_solve(cache, b + s * coupling.matvec(a))
        u = a - t * coupling.rmatvec(v)
    else:
        u = linalg.spd_solve(cache, a - t * coupling.rmatvec(b))
        v = b + s * coupling.matvec(u)
    return u, v, cache


def pd_dr_step(state: DRState, prob: PdProblem) -> tuple[DRState, StepOutput]:
    """One primal-dual sweep; returns the advanced state and the shadow pair.

    Raises
    ------
    IterationDiverged
        If either prox output is non-finite (would otherwise poison the
        linear solve with an unhelpful low-level error).
    """
    x = prob.f_prox(state.p, state.t)
    y = prob.gstar_prox(state.q, state.s)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise IterationDiverged(state.k, state=state)
    u, v, cache = block_resolvent(
        2.0 * x - state.p, 2.0 * y - state.q, state.t, state.s,
        prob.coupling, state.factor_cache,
    )
    nxt = DRState(
        p=state.p + u - x,
        q=state.q + v - y,
        t=state.t,
        s=state.s,
        k=state.k + 1,
        factor_cache=cache,
    )
    return nxt, StepOutput(x=x, y=y, u=u, v=v)


def preconditioned_dr_step(w, delta_diag, resolvent_a, resolvent_b) -> np.ndarray:
    """One Douglas-Rachford sweep on the governing vector w.

    ``resolvent_a`` and ``resolvent_b`` are callables ``(vec, delta_diag) ->
    vec`` evaluating the resolvents of the two operator halves scaled by the
    diagonal preconditioner.  Returns

        w + resolvent_b(2 a - w) - a,    a = resolvent_a(w).
    """
    wv = np.asarray(w, dtype=float)
    dd = np.asarray(delta_diag, dtype=float)
    if dd.shape != wv.shape:
        raise ValueError(f"shape mismatch: {wv.shape} vs preconditioner {dd.shape}")
    if np.any(dd <= 0):
        raise ValueError("preconditioner diagonal must be positive")
    a = np.asarray(resolvent_a(wv, dd), dtype=float)
    return wv + np.asarray(resolvent_b(2.0 * a - wv, dd), dtype=float) - a


def _block_steps(dd: np.ndarray, n: int) -> tuple[float, float]:
    t, s = float(dd[0]), float(dd[n])
    if np.any(dd[:n] != t) or np.any(dd[n:] != s):
        raise ValueError("preconditioner must be constant on each block")
    return t, s


def stacked_prox_resolvent(prob: PdProblem):
    """Resolvent of the decoupled prox pair on the stacked (primal, dual) space."""
    n = prob.primal_dim

    def apply(w, dd):
        t, s = _block_steps(np.asarray(dd, dtype=float), n)
        return np.concatenate([prob.f_prox(w[:n], t), prob.gstar_prox(w[n:], s)])

    return apply


def coupling_block_resolvent(prob: PdProblem):
    """Resolvent of the skew coupling block, with its own factor cache."""
    n = prob.primal_dim
    cache: list[SpdFactor | None] = [None]

    def apply(w, dd):
        t, s = _block_steps(np.asarray(dd, dtype=float), n)
        u, v, cache[0] = block_resolvent(w[:n], w[n:], t, s, prob.coupling, cache[0])
        return np.concatenate([u, v])

    return apply


def dr_as_proximal_point(prob: PdProblem,
                         stepsizes: Callable[[int], tuple[float, float]]
                         ) -> PreconditionedResolvent:
    """Express the splitting as a preconditioned proximal point resolvent.

    The iterate lives on the doubled space (h1, h2): h1 is the candidate
    primal-dual pair and h2 the auxiliary variable of the embedding.  The
    step-k metric is the rank-deficient block matrix
    [[D^{-1}, -I], [-I, D]] with D = diag(t_k on the primal block, s_k on the
    dual block); its seminorm of the step difference is the quantity driven
    to zero.
    """
    n, m = prob.primal_dim, prob.dual_dim
    dim = n + m
    res_a = stacked_prox_resolvent(prob)
    res_b = coupling_block_resolvent(prob)

    def _diag(k: int) -> np.ndarray:
        t, s = stepsizes(k)
        if t <= 0 or s <= 0:
            raise ValueError(f"stepsizes must be positive, got t={t}, s={s}")
        return np.concatenate([np.full(n, float(t)), np.full(m, float(s))])

    def apply(u, k):
        dd = _diag(k)
        h1, h2 = u[:dim], u[dim:]
        w = h1 - dd * h2
        a = res_a(w, dd)
        z = 2.0 * a - w
        return np.concatenate([a, (z - res_b(z, dd)) / dd])

    def metric(k):
        dd = _diag(k)
        eye = np.eye(dim)
        return np.block([[np.diag(1.0 / dd), -eye], [-eye, np.diag(dd)]])

    return PreconditionedResolvent(apply=apply, metric=metric)


def solve(prob: PdProblem, policy, *, max_iter: int, tol: float,
          t0: float = 1.0, s0: float = 1.0, p0=None, q0=None
          ) -> tuple[np.ndarray, np.ndarray, SolveTrace]:
    """Run the splitting under a stepsize policy.

    Parameters
    ----------
    prob : PdProblem
        Problem data.
    policy : stepsize policy
        Object with ``initial(t0, s0)`` and
        ``update(t, s, x, p, y, q, k) -> (t, s)``; see :mod:`drsplit.adaptive`.
    max_iter : int
        Iteration budget.
    tol : float
        Stop when ``||(p+, q+) - (p, q)|| / max(1, ||(p, q)||) <= tol``.
        Pass 0.0 to always run the full budget.
    t0, s0 : float
        Starting stepsizes (policies may override via ``initial``).
    p0, q0 : array_like, optional
        Starting shadow points, zero by default.

    Returns
    -------
    (x, y, SolveTrace)
        Last shadow pair and the per-iteration trace.  Row k records the
        objective at x_k and the stepsizes used by step k.

    Raises
    ------
    IterationDiverged
        On a non-finite iterate; carries the step index and the last finite
        state.
    """
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    if tol < 0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    t, s = policy.initial(t0, s0)
    state = initial_state(prob, t, s, p0=p0, q0=q0)
    rows: list[TraceRow] = []
    out = None
    for k in range(max_iter):
        prev_norm = float(np.sqrt(np.dot(state.p, state.p) + np.dot(state.q, state.q)))
        nxt, out = pd_dr_step(state, prob)
        dp = nxt.p - state.p
        dq = nxt.q - state.q
        step_norm = float(np.sqrt(np.dot(dp, dp) + np.dot(dq, dq)))
        residual = step_norm / max(1.0, prev_norm)
        objective = float(prob.objective(out.x))
        if not (np.isfinite(residual) and np.isfinite(objective)):
            raise IterationDiverged(k, state=state)
        rows.append(TraceRow(k, objective, state.t, state.s, residual))
        nxt.t, nxt.s = policy.update(
            state.t, state.s, out.x, state.p, out.y, state.q, k
        )
        state = nxt
        if residual <= tol:
            break
    return out.x, out.y, SolveTrace(rows)
