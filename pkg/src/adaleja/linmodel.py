"""Parametric linear-system models with primal and dual solves.

A model owns the assembly of a complex linear system A(y) c = f(y) whose
quantity of interest is the conjugated pairing <j, c> plus an offset.
The dual system Aᴴ z = j reuses the primal LU factors through a
conjugate-transposed substitution, and the residual-based indicator
z̃ᴴ(f − A c̃) needs assembly only, never a factorization.

The resonant ladder is a desk-scale stand-in for large frequency-domain
models: a damped spring chain driven at one end and observed at the
other, with uncertain section stiffnesses and an optional frequency
parameter as dimension 0.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import SolveError

_RESIDUAL_TOL = 1e-10


class ParametricLinearModel:
    """Contract: assemble(y) -> (A, f, j, offset) with A nonsingular.

    Subclasses set ``n`` (system size), ``n_params`` (parameter count)
    and ``name``.  Calling the model solves the primal system and
    returns the quantity of interest.
    """

    n: int
    n_params: int
    name: str = "model"

    def assemble(self, y):
        raise NotImplementedError

    def support(self):
        """Per-parameter (lower, upper) bounds of the nominal box."""
        return [(-1.0, 1.0)] * self.n_params

    def qoi(self, y):
        c, handle = solve_primal(self, y)
        return complex(np.vdot(handle.j, c) + handle.offset)

    def __call__(self, y):
        return self.qoi(y)


@dataclass
class Factorization:
    """Primal LU factors plus the assembled arrays they came from."""

    lu: np.ndarray
    piv: np.ndarray
    A: np.ndarray
    f: np.ndarray
    j: np.ndarray
    offset: complex


def factorize(A, y):
    """Dense LU with partial pivoting; failures carry diagnostics."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            return lu_factor(A)
    except (np.linalg.LinAlgError, Warning, ValueError) as exc:
        raise SolveError(
            f"factorization failed at y={np.asarray(y).tolist()}: {exc} "
            f"(cond estimate {_cond_estimate(A):.3e})") from exc


def substitute(factors, A, b, y, adjoint=False):
    """One forward-backward substitution, with a residual check.

    With ``adjoint`` the conjugate-transposed system Aᴴ x = b is solved
    on the same factors.
    """
    x = lu_solve(factors, b, trans=2 if adjoint else 0)
    op = A.conj().T if adjoint else A
    resid = np.linalg.norm(op @ x - b) / max(np.linalg.norm(b), 1e-300)
    if not np.isfinite(resid) or resid > _RESIDUAL_TOL:
        raise SolveError(
            f"{'dual' if adjoint else 'primal'} residual {resid:.3e} at "
            f"y={np.asarray(y).tolist()} "
            f"(cond estimate {_cond_estimate(A):.3e})")
    return x


def solve_primal(model: ParametricLinearModel, y):
    """Solve A(y) c = f(y); returns the solution and the factorization.

    The factors are retained so the dual solve costs only one more pair
    of substitutions.  A residual above 1e-10 relative, or a breakdown in
    the factorization, raises a solve error carrying the parameter point
    and a condition estimate.
    """
    A, f, j, offset = model.assemble(y)
    lu, piv = factorize(A, y)
    c = substitute((lu, piv), A, f, y)
    return c, Factorization(lu, piv, A, f, j, offset)


def solve_dual(model: ParametricLinearModel, y, factorization: Factorization):
    """Solve Aᴴ z = j on the existing factors (substitution only)."""
    fac = factorization
    return substitute((fac.lu, fac.piv), fac.A, fac.j, y, adjoint=True)


def _cond_estimate(A):
    try:
        # cond of a complex matrix carries a complex dtype with zero
        # imaginary part; fold it before converting
        return float(abs(np.linalg.cond(A, 1)))
    except np.linalg.LinAlgError:
        return float("inf")


def error_indicator(model: ParametricLinearModel, y, primal_approx, dual_approx):
    """Residual-weighted error indicator z̃ᴴ(f − A c̃); assembly only."""
    A, f, _, _ = model.assemble(y)
    c = np.asarray(primal_approx)
    z = np.asarray(dual_approx)
    return complex(np.vdot(z, f - A @ c))


class LadderModel(ParametricLinearModel):
    """Damped spring ladder driven at the first mass, observed at the last.

    The stiffness matrix is the standard fixed-free tridiagonal chain of
    ``sections`` unit springs; the first ``n_params`` springs are
    perturbed to 1 + 0.1 t with t in [-1, 1].  The system is
    K − ω̂²I + iβω̂I at normalized frequency ω̂.  When ``with_frequency``
    is set, ω̂ in [0.5, 1.5] is the leading parameter; otherwise it is
    pinned to ``omega``.
    """

    name = "ladder"

    def __init__(self, n_params, sections=40, damping=0.02,
                 with_frequency=False, omega=1.0):
        n_params = int(n_params)
        sections = int(sections)
        if n_params < 0 or n_params > sections:
            raise ValueError("stiffness parameter count must lie in [0, sections]")
        if sections < 1:
            raise ValueError("the ladder needs at least one section")
        if not (n_params or with_frequency):
            raise ValueError("the model needs at least one parameter")
        self.n = sections
        self.n_stiff = n_params
        self.damping = float(damping)
        self.with_frequency = bool(with_frequency)
        self.omega = float(omega)
        self.n_params = n_params + (1 if with_frequency else 0)

    def support(self):
        box = [(-1.0, 1.0)] * self.n_stiff
        if self.with_frequency:
            box.insert(0, (0.5, 1.5))
        return box

    def assemble(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.n_params,):
            raise ValueError(
                f"expected {self.n_params} parameters, got shape {y.shape}")
        if self.with_frequency:
            omega, t = y[0], y[1:]
        else:
            omega, t = self.omega, y
        # springs k_1..k_n; mass m has springs m and m+1 attached, the
        # (n+1)-th spring does not exist (free end)
        springs = np.ones(self.n + 2)
        springs[1:self.n_stiff + 1] = 1.0 + 0.1 * t
        springs[self.n + 1] = 0.0
        diag = springs[1:self.n + 1] + springs[2:self.n + 2]
        off = -springs[2:self.n + 1]
        K = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
        A = K.astype(complex)
        A += (-omega ** 2 + 1j * self.damping * omega) * np.eye(self.n)
        f = np.zeros(self.n, dtype=complex)
        f[0] = 1.0
        j = np.zeros(self.n, dtype=complex)
        j[-1] = 1.0
        return A, f, j, 0.0 + 0.0j


def material_interp(samples, omega):
    """Quadratic Lagrange interpolation through three (frequency, value) pairs.

    Queries outside the sample hull are answered anyway but raise an
    extrapolation warning.
    """
    pts = [(float(f), float(v)) for f, v in samples]
    if len(pts) != 3:
        raise ValueError("exactly three samples are required")
    freqs = [p[0] for p in pts]
    if len(set(freqs)) != 3:
        raise ValueError("sample frequencies must be distinct")
    omega = float(omega)
    if omega < min(freqs) or omega > max(freqs):
        warnings.warn(
            f"frequency {omega} is outside the sample hull "
            f"[{min(freqs)}, {max(freqs)}]; extrapolating", stacklevel=2)
    total = 0.0
    for i, (fi, vi) in enumerate(pts):
        term = vi
        for k, (fk, _) in enumerate(pts):
            if k != i:
                term *= (omega - fk) / (fi - fk)
        total += term
    return total


def permittivity(n, kappa):
    """Relative complex permittivity from refractive index and extinction."""
    n = float(n)
    kappa = float(kappa)
    return complex(n * n - kappa * kappa, -2.0 * n * kappa)


# Tabulated optical constants at three sample frequencies (THz).
MATERIAL_FREQUENCIES_THZ = (396.55, 425.57, 454.58)
GOLD_N_SAMPLES = tuple(zip(MATERIAL_FREQUENCIES_THZ, (0.14, 0.13, 0.14)))
GOLD_KAPPA_SAMPLES = tuple(zip(MATERIAL_FREQUENCIES_THZ, (4.542, 4.103, 3.697)))
SILVER_N_SAMPLES = tuple(zip(MATERIAL_FREQUENCIES_THZ, (0.03, 0.04, 0.05)))
SILVER_KAPPA_SAMPLES = tuple(zip(MATERIAL_FREQUENCIES_THZ, (5.242, 4.838, 4.483)))


def read_material_samples(path):
    """Read a 3-row CSV (frequency_THz, n, kappa) into two sample triples.

    Returns (n_samples, kappa_samples), each a tuple of three
    (frequency, value) pairs ready for :func:`material_interp`.
    """
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if not _is_number(row[0]):
                continue  # header line
            if len(row) < 3:
                raise ValueError(f"expected 3 columns, got {row!r}")
            rows.append((float(row[0]), float(row[1]), float(row[2])))
    if len(rows) != 3:
        raise ValueError(f"expected exactly 3 data rows, got {len(rows)}")
    n_samples = tuple((f, n) for f, n, _ in rows)
    kappa_samples = tuple((f, k) for f, _, k in rows)
    return n_samples, kappa_samples


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False
