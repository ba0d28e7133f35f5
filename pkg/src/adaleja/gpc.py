"""Orthonormal polynomial chaos by pseudo-spectral projection.

Coefficients of the expansion J ≈ Σ s_p Ψ_p are computed with Gauss
quadrature matched to each input law: Gauss-Legendre for the uniform
weight and Gauss-Jacobi(3,3) for the symmetric cubic beta weight, with
weights normalized to probability weights.  The basis is orthonormal
under the joint law, so the projection denominator is one and the decay
of max |s_p| over total degree doubles as a regularity diagnostic.
"""
from __future__ import annotations

import json

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .distributions import BETA33, UNIFORM, Distribution, make_distribution
from .errors import ContractError, SerializationError, UnsupportedVersionError
from .grid import MultiIndexSet

TENSOR = "tensor"
SMOLYAK = "smolyak"

SCHEMA_VERSION = 1


def recurrence_betas(kind, count):
    """Three-term recurrence coefficients β_n, n = 1..count.

    For the monic orthogonal polynomials of a symmetric weight the
    recurrence is π_{n+1} = y π_n − β_n π_{n−1}; the orthonormal version
    uses √β.  β_1 equals the law's variance.
    """
    n = np.arange(1, count + 1, dtype=float)
    if kind == UNIFORM:
        return n * n / (4.0 * n * n - 1.0)
    if kind == BETA33:
        return n * (n + 6.0) / ((2.0 * n + 5.0) * (2.0 * n + 7.0))
    raise ContractError(f"no orthogonal basis for kind {kind!r}")


def ortho_table(kind, y, degree):
    """Orthonormal polynomial values, shape (len(y), degree + 1)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    table = np.empty((y.size, degree + 1))
    table[:, 0] = 1.0
    if degree == 0:
        return table
    sq = np.sqrt(recurrence_betas(kind, degree))
    table[:, 1] = y / sq[0]
    for k in range(1, degree):
        table[:, k + 1] = (y * table[:, k] - sq[k - 1] * table[:, k - 1]) / sq[k]
    return table


def gauss_rule(kind, order):
    """Canonical Gauss nodes and probability weights for a law kind."""
    order = int(order)
    if order < 1:
        raise ContractError("quadrature order must be at least 1")
    if kind == UNIFORM:
        nodes, weights = leggauss(order)
    elif kind == BETA33:
        nodes, weights = roots_jacobi(order, 3.0, 3.0)
    else:
        raise ContractError(f"no Gauss rule for kind {kind!r}")
    return nodes, weights / np.sum(weights)


class GpcExpansion:
    """Total-degree orthonormal chaos expansion with complex coefficients."""

    def __init__(self, distributions, p_max, indices, coefficients):
        self.distributions = [make_distribution(d) for d in distributions]
        self.p_max = int(p_max)
        self.indices = [tuple(int(c) for c in ix) for ix in indices]
        self.coefficients = np.asarray(coefficients, dtype=complex)
        if self.p_max < 0:
            raise ContractError("p_max must be non-negative")
        if len(self.indices) != self.coefficients.size:
            raise ContractError("one coefficient per index is required")
        want = MultiIndexSet.total_degree_size(self.n_dim, self.p_max)
        if len(self.indices) != want:
            raise ContractError(
                f"expected the full total-degree set of size {want}, "
                f"got {len(self.indices)}")

    @property
    def n_dim(self):
        return len(self.distributions)

    def coefficient(self, index):
        index = tuple(int(c) for c in index)
        for ix, s in zip(self.indices, self.coefficients):
            if ix == index:
                return complex(s)
        raise ContractError(f"index {index} is outside the expansion")

    def evaluate(self, points):
        """Expansion value at one point (N,) or a batch (P, N)."""
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.n_dim:
            raise ContractError(
                f"points must have {self.n_dim} columns, got shape {pts.shape}")
        tables = []
        for d, dist in enumerate(self.distributions):
            y = np.atleast_1d(dist.to_canonical(pts[:, d]))
            tables.append(ortho_table(dist.kind, y, self.p_max))
        levels = np.array(self.indices, dtype=int)
        weights = tables[0][:, levels[:, 0]]
        for d in range(1, self.n_dim):
            weights = weights * tables[d][:, levels[:, d]]
        out = weights @ self.coefficients
        return complex(out[0]) if single else out

    def decay(self):
        """Rows (total degree w, max |s_p| over |p| = w), w = 0..p_max."""
        sums = np.array([sum(ix) for ix in self.indices])
        mags = np.abs(self.coefficients)
        return [(w, float(np.max(mags[sums == w]))) for w in range(self.p_max + 1)]

    def to_json(self) -> bytes:
        payload = {
            "version": SCHEMA_VERSION,
            "kind": "gpc",
            "N": self.n_dim,
            "distributions": [d.spec() for d in self.distributions],
            "p_max": self.p_max,
            "indices": [list(ix) for ix in self.indices],
            "coefficients_re": np.real(self.coefficients).tolist(),
            "coefficients_im": np.imag(self.coefficients).tolist(),
        }
        return json.dumps(payload, sort_keys=True).encode("utf-8")

    @classmethod
    def from_json(cls, data) -> "GpcExpansion":
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SerializationError(
                f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
        if not isinstance(doc, dict) or doc.get("kind") != "gpc":
            raise SerializationError("not a chaos-expansion document")
        if doc.get("version") != SCHEMA_VERSION:
            raise UnsupportedVersionError(
                f"unsupported expansion version {doc.get('version')!r}")
        for key in ("N", "distributions", "p_max", "indices",
                    "coefficients_re", "coefficients_im"):
            if key not in doc:
                raise SerializationError(f"missing key '{key}'")
        coeff = (np.asarray(doc["coefficients_re"], dtype=float)
                 + 1j * np.asarray(doc["coefficients_im"], dtype=float))
        try:
            return cls(doc["distributions"], doc["p_max"], doc["indices"], coeff)
        except (ContractError, ValueError, TypeError) as exc:
            raise SerializationError(f"inconsistent expansion data: {exc}") from exc


def project(model, distributions, p_max, quadrature=TENSOR) -> GpcExpansion:
    """Pseudo-spectral projection of a model onto the orthonormal basis.

    The tensor rule uses order p_max + 1 per dimension.  The sparse rule
    is the standard combination-technique quadrature on the total-degree
    index set of level p_max, with per-dimension Gauss orders ℓ + 1; it
    integrates total-degree 2 p_max + 1 polynomials exactly, which covers
    every product J Ψ_p of interest when J itself lies in the basis span.
    """
    dists = [make_distribution(d) for d in distributions]
    if not dists:
        raise ContractError("at least one distribution is required")
    p_max = int(p_max)
    if p_max < 0:
        raise ContractError("p_max must be non-negative")
    if quadrature not in (TENSOR, SMOLYAK):
        raise ContractError(f"unknown quadrature {quadrature!r}")
    n_dim = len(dists)
    index_set = sorted(MultiIndexSet.total_degree(n_dim, p_max))
    coeff = np.zeros(len(index_set), dtype=complex)
    cache: dict[tuple, complex] = {}

    def tensor_contribution(orders, scale):
        """Add scale * (projection using the per-dimension Gauss orders)."""
        rules = [gauss_rule(d.kind, o) for d, o in zip(dists, orders)]
        grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
        ys = np.column_stack([g.reshape(-1) for g in grids])
        weight = np.ones(ys.shape[0])
        for g in np.meshgrid(*[r[1] for r in rules], indexing="ij"):
            weight = weight * g.reshape(-1)
        values = np.empty(ys.shape[0], dtype=complex)
        for q in range(ys.shape[0]):
            key = tuple(ys[q])
            if key not in cache:
                x = np.array([dist.from_canonical(t)
                              for dist, t in zip(dists, ys[q])])
                cache[key] = complex(model(x))
            values[q] = cache[key]
        tables = [ortho_table(d.kind, ys[:, k], p_max)
                  for k, d in enumerate(dists)]
        for m, ix in enumerate(index_set):
            basis = tables[0][:, ix[0]]
            for d in range(1, n_dim):
                basis = basis * tables[d][:, ix[d]]
            coeff[m] += scale * np.sum(weight * values * basis)

    if quadrature == TENSOR:
        tensor_contribution((p_max + 1,) * n_dim, 1.0)
    else:
        members = set(index_set)
        for ell in index_set:
            scale = 0
            for z in np.ndindex(*(2,) * n_dim):
                if tuple(a + b for a, b in zip(ell, z)) in members:
                    scale += (-1) ** int(np.sum(z))
            if scale:
                tensor_contribution(tuple(l + 1 for l in ell), float(scale))
    return GpcExpansion(dists, p_max, index_set, coeff)


def decay_report(expansion: GpcExpansion):
    """Table of (total degree, max coefficient modulus) rows."""
    return expansion.decay()


def evaluate_expansion(expansion: GpcExpansion, points):
    return expansion.evaluate(points)
