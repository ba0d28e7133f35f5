"""Monte-Carlo post-processing of cheap surrogates.

Every estimator here samples a read-only evaluable (a surrogate, chaos
expansion, or any callable on parameter batches) under the joint input
law.  Moments and failure probabilities are statistics of the output
modulus, the quantity the engineering criteria are phrased in.  The
variance-based sensitivity estimators fold complex outputs to their
modulus but leave real-valued outputs signed, so analytic benchmark
functions decompose as written.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .distributions import make_distribution, sample_joint
from .errors import ContractError

# Epanechnikov pair-block size, in matrix entries.
_KDE_BLOCK = 4_194_304


def _evaluate(target, points):
    fn = getattr(target, "evaluate", None)
    values = fn(points) if fn is not None else target(points)
    return np.asarray(values)


def _checked(target, points):
    values = _evaluate(target, points)
    if values.shape != (points.shape[0],):
        raise ContractError(
            f"evaluable returned shape {values.shape} for {points.shape[0]} points")
    return values


def _modulus(target, points):
    """Output modulus per sample; real outputs are folded too."""
    return np.abs(_checked(target, points))


def _reduced(target, points):
    """Modulus of complex outputs; real outputs pass through signed."""
    values = _checked(target, points)
    return np.abs(values) if np.iscomplexobj(values) else values.astype(float)


@dataclass
class McSummary:
    sample_count: int
    mean: float
    std: float
    failure_probability: float | None = None
    alpha: float | None = None


@dataclass
class SobolResult:
    main: np.ndarray
    total: np.ndarray
    n_evaluations: int


def mc_moments(target, distributions, n_samples, seed) -> McSummary:
    """Sample mean and unbiased standard deviation of the output modulus."""
    n_samples = int(n_samples)
    if n_samples < 2:
        raise ContractError("at least two samples are required")
    dists = [make_distribution(d) for d in distributions]
    values = _modulus(target, sample_joint(dists, n_samples, seed))
    return McSummary(n_samples, float(np.mean(values)),
                     float(np.std(values, ddof=1)))


def failure_probability(target, distributions, alpha, n_samples, seed) -> float:
    """Fraction of sampled outputs with modulus at least 1 - alpha."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ContractError("alpha must lie strictly inside (0, 1)")
    dists = [make_distribution(d) for d in distributions]
    values = _modulus(target, sample_joint(dists, int(n_samples), seed))
    return float(np.mean(values >= 1.0 - alpha))


def kde_pdf(samples, bandwidth, grid):
    """Epanechnikov kernel density estimate on a query grid.

    Returns (1/(h n)) Σ K((T - x_i)/h) with K(T) = 0.75 (1 - T²) on
    [-1, 1], evaluated for every grid point T.
    """
    samples = np.asarray(samples, dtype=float).reshape(-1)
    if samples.size == 0:
        raise ContractError("at least one sample is required")
    bandwidth = float(bandwidth)
    if bandwidth <= 0.0:
        raise ContractError("bandwidth must be positive")
    grid = np.asarray(grid, dtype=float)
    flat = grid.reshape(-1)
    out = np.zeros(flat.size)
    step = max(1, _KDE_BLOCK // max(flat.size, 1))
    for start in range(0, samples.size, step):
        block = samples[start:start + step]
        t = (flat[None, :] - block[:, None]) / bandwidth
        out += np.sum(np.maximum(0.75 * (1.0 - t * t), 0.0), axis=0)
    return (out / (bandwidth * samples.size)).reshape(grid.shape)


def sobol_indices(target, distributions, n_base, seed) -> SobolResult:
    """Main and total Sobol indices by the paired-matrix scheme.

    Two base matrices A and B and both families of cross matrices are
    evaluated, for exactly 2 (N + 1) n_base evaluations.  Main effects
    average the correlation estimator over both directions; totals
    average the squared-difference estimator.  A zero-variance output
    reports all indices as zero.
    """
    n_base = int(n_base)
    if n_base < 1:
        raise ContractError("n_base must be positive")
    dists = [make_distribution(d) for d in distributions]
    n_dim = len(dists)
    root = np.random.SeedSequence(seed)
    seed_a, seed_b = root.spawn(2)
    A = sample_joint(dists, n_base, seed_a)
    B = sample_joint(dists, n_base, seed_b)
    fA = _reduced(target, A)
    fB = _reduced(target, B)
    count = 2 * n_base
    both = np.concatenate([fA, fB])
    mean = both.mean()
    var = both.var()
    main = np.zeros(n_dim)
    total = np.zeros(n_dim)
    if var >= 1e-14 * (mean * mean + 1.0):
        for i in range(n_dim):
            AB = A.copy()
            AB[:, i] = B[:, i]
            BA = B.copy()
            BA[:, i] = A[:, i]
            fAB = _reduced(target, AB)
            fBA = _reduced(target, BA)
            count += 2 * n_base
            main[i] = 0.5 * (np.mean(fB * (fAB - fA))
                             + np.mean(fA * (fBA - fB))) / var
            total[i] = 0.25 * (np.mean((fA - fAB) ** 2)
                               + np.mean((fB - fBA) ** 2)) / var
    else:
        count += 2 * n_base * n_dim
    return SobolResult(main, total, count)


def extract_resonance(target, parameters, f_range, n_starts=3):
    """Deepest modulus minimum over the leading (frequency) dimension.

    The frequency range is split into ``n_starts`` brackets, each
    polished by a bounded derivative-free minimizer to a frequency
    tolerance of 1e-9 times the range; the range endpoints also compete.
    Returns (frequency, modulus at it).
    """
    lo, hi = (float(f_range[0]), float(f_range[1]))
    if not hi > lo:
        raise ContractError("the frequency range must have positive width")
    n_starts = int(n_starts)
    if n_starts < 1:
        raise ContractError("at least one start is required")
    rest = np.asarray(parameters, dtype=float).reshape(-1)

    def objective(f):
        point = np.concatenate([[f], rest])
        return abs(complex(_evaluate(target, point[None, :])[0]))

    edges = np.linspace(lo, hi, n_starts + 1)
    best_f, best_v = lo, objective(lo)
    v_hi = objective(hi)
    if v_hi < best_v:
        best_f, best_v = hi, v_hi
    for a, b in zip(edges[:-1], edges[1:]):
        res = minimize_scalar(objective, bounds=(a, b), method="bounded",
                              options={"xatol": 1e-9 * (hi - lo)})
        if res.fun < best_v:
            best_f, best_v = float(res.x), float(res.fun)
    return best_f, best_v


def cv_errors(target, reference, distributions, n_cv, seed):
    """Mean and maximum absolute deviation from a reference model.

    The reference is called point by point; the target is evaluated in
    one batch.  Returns (mean L¹ error, max error) over PDF-distributed
    cross-validation samples.
    """
    n_cv = int(n_cv)
    if n_cv < 1:
        raise ContractError("at least one sample is required")
    dists = [make_distribution(d) for d in distributions]
    points = sample_joint(dists, n_cv, seed)
    approx = _evaluate(target, points)
    exact = np.array([complex(reference(p)) for p in points])
    err = np.abs(approx - exact)
    return float(np.mean(err)), float(np.max(err))
