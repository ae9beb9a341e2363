"""Seeded experiment generators and the policy comparison harness.

All randomness flows through ``numpy.random.default_rng(seed)``, so equal
seeds give bitwise-identical instances and, the solver being deterministic,
bitwise-identical traces.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import pddr
from .linalg import LinearMap
from .operators import (
    box_dual_prox,
    quadratic_fidelity_prox,
    scaled_l1_prox,
    shifted_l1_conjugate_prox,
)
from .pddr import PdProblem, SolveTrace
from .spectral import LinearMonotonePair

__all__ = [
    "LadInstance",
    "TvInstance",
    "forward_difference_map",
    "gen_lad",
    "gen_monotone_pair",
    "gen_tv",
    "log_grid",
    "make_lad_problem",
    "make_tv_problem",
    "run_comparison",
]

# Plateau amplitude for the denoising signal.  Kept small so the largest
# regularization weight in the standard sweep (10) dominates the signal's
# cumulative variation and drives the dual stepsize into its cap.
DEFAULT_TV_AMPLITUDE = 0.05


@dataclass(frozen=True, eq=False)
class LadInstance:
    """Random least-absolute-deviations regression with an l1 penalty."""

    design: np.ndarray
    observations: np.ndarray
    reg_weight: float
    seed: int


@dataclass(frozen=True, eq=False)
class TvInstance:
    """Noisy piecewise-constant signal for total-variation denoising."""

    noisy: np.ndarray
    difference: LinearMap
    reg_weight: float
    seed: int


def make_lad_problem(design, observations, reg_weight: float) -> PdProblem:
    """Wire ``min_x ||Ax - b||_1 + reg_weight * ||x||_1`` for the solver."""
    a = np.asarray(design, dtype=float)
    b = np.asarray(observations, dtype=float)
    if reg_weight <= 0:
        raise ValueError(f"regularization weight must be positive, got {reg_weight}")
    if a.ndim != 2 or b.shape != (a.shape[0],):
        raise ValueError(f"shape mismatch: design {a.shape}, observations {b.shape}")

    def objective(x):
        return float(np.abs(a @ x - b).sum() + reg_weight * np.abs(x).sum())

    return PdProblem(
        f_prox=scaled_l1_prox(reg_weight),
        gstar_prox=shifted_l1_conjugate_prox(b),
        coupling=LinearMap(a),
        objective=objective,
    )


def gen_lad(seed: int, m: int = 200, n: int = 100,
            reg_weight: float = 1.0) -> tuple[LadInstance, PdProblem]:
    """Standard-normal design and observations, m > n."""
    if not m > n > 0:
        raise ValueError(f"need m > n > 0, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    design = rng.standard_normal((m, n))
    observations = rng.standard_normal(m)
    inst = LadInstance(design, observations, float(reg_weight), seed)
    return inst, make_lad_problem(design, observations, reg_weight)


def forward_difference_map(n: int) -> LinearMap:
    """Forward differences as an (n-1) x n dense operator."""
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    d = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    d[idx, idx] = -1.0
    d[idx, idx + 1] = 1.0
    return LinearMap(d)


def make_tv_problem(noisy, reg_weight: float) -> tuple[PdProblem, LinearMap]:
    """Wire ``min_x 0.5 ||x - noisy||^2 + reg_weight * ||Dx||_1``."""
    y = np.asarray(noisy, dtype=float)
    if reg_weight <= 0:
        raise ValueError(f"regularization weight must be positive, got {reg_weight}")
    diff = forward_difference_map(y.size)

    def objective(x):
        return float(0.5 * np.sum((x - y) ** 2)
                     + reg_weight * np.abs(diff.matvec(x)).sum())

    prob = PdProblem(
        f_prox=quadratic_fidelity_prox(y),
        gstar_prox=box_dual_prox(reg_weight),
        coupling=diff,
        objective=objective,
    )
    return prob, diff


def _piecewise_signal(rng: np.random.Generator, n: int, plateaus: int,
                      amplitude: float) -> np.ndarray:
    plateaus = min(plateaus, n)
    cuts = np.sort(rng.choice(np.arange(1, n), size=plateaus - 1, replace=False))
    levels = rng.uniform(-amplitude, amplitude, size=plateaus)
    signal = np.empty(n)
    start = 0
    for level, stop in zip(levels, list(cuts) + [n]):
        signal[start:stop] = level
        start = stop
    return signal


def gen_tv(seed: int, n: int = 500, noise_level: float = 0.05,
           reg_weight: float = 1.0, *, plateaus: int = 5,
           amplitude: float = DEFAULT_TV_AMPLITUDE) -> tuple[TvInstance, PdProblem]:
    """Piecewise-constant signal (default 5 plateaus) plus Gaussian noise."""
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if noise_level < 0:
        raise ValueError(f"noise level must be nonnegative, got {noise_level}")
    if plateaus < 1:
        raise ValueError(f"need at least one plateau, got {plateaus}")
    rng = np.random.default_rng(seed)
    clean = _piecewise_signal(rng, n, plateaus, amplitude)
    noisy = clean + noise_level * rng.standard_normal(n)
    prob, diff = make_tv_problem(noisy, reg_weight)
    inst = TvInstance(noisy, diff, float(reg_weight), seed)
    return inst, prob


def gen_monotone_pair(seed: int, half_dim: int = 25) -> LinearMonotonePair:
    """Random structured pair for spectral experiments.

    Both diagonal blocks are Gram matrices shifted by 0.1, the second one
    entering through its inverse; the coupling has uniform [0, 1) entries.
    """
    if half_dim < 1:
        raise ValueError(f"half_dim must be positive, got {half_dim}")
    rng = np.random.default_rng(seed)
    g1 = rng.standard_normal((half_dim, half_dim))
    g2 = rng.standard_normal((half_dim, half_dim))
    block_one = g1.T @ g1 + 0.1 * np.eye(half_dim)
    block_two = g2.T @ g2 + 0.1 * np.eye(half_dim)
    coupling = rng.uniform(0.0, 1.0, size=(half_dim, half_dim))
    return LinearMonotonePair(
        block_one=block_one,
        block_two_inv=np.linalg.inv(block_two),
        coupling=coupling,
    )


def log_grid(lo: float, hi: float, num: int) -> np.ndarray:
    """Logarithmically spaced grid, endpoints included."""
    if not 0 < lo <= hi:
        raise ValueError(f"need 0 < lo <= hi, got {lo}, {hi}")
    if num < 1:
        raise ValueError(f"need at least one grid point, got {num}")
    return np.geomspace(lo, hi, num)


def run_comparison(prob: PdProblem, policies: Sequence, *, max_iter: int,
                   tol: float = 0.0, t0: float = 1.0, s0: float = 1.0,
                   p0=None, q0=None) -> list[SolveTrace]:
    """Solve the same problem once per policy from identical starts."""
    traces = []
    for policy in policies:
        _, _, trace = pddr.solve(
            prob, policy, max_iter=max_iter, tol=tol, t0=t0, s0=s0, p0=p0, q0=q0
        )
        traces.append(trace)
    return traces
