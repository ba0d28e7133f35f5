"""Mapped hierarchical sparse-grid interpolants.

A surrogate is a sum of hierarchical surpluses times multivariate basis
polynomials.  Each univariate factor is a Newton-style ratio built on the
canonical Leja nodes of its dimension, evaluated at the conformal-map
preimage of the canonical coordinate, so the interpolant is a polynomial
composed with the inverse map.  With one new node per level, every
multi-index owns exactly one grid point and one surplus.

Surpluses may be complex scalars (quantity-of-interest surrogates) or
complex vectors (solution-field surrogates); both share the same code
path.  Finished surrogates serialize to a self-contained JSON document.
"""
from __future__ import annotations

import json

import numpy as np

from .distributions import Distribution, make_distribution
from .errors import ContractError, SerializationError, UnsupportedVersionError
from .grid import MultiIndexSet, _as_index
from .leja import leja_nodes
from .maps import ConformalMap, IdentityMap, make_map

SCHEMA_VERSION = 1

# Soft cap on the point-by-index weight block, in matrix entries.
_MAX_BLOCK = 4_194_304


def _as_map_list(maps, n_dim):
    if maps is None:
        return [IdentityMap() for _ in range(n_dim)]
    if isinstance(maps, (ConformalMap, dict)):
        return [make_map(maps) for _ in range(n_dim)]
    out = [make_map(m) for m in maps]
    if len(out) != n_dim:
        raise ContractError(f"got {len(out)} maps for {n_dim} dimensions")
    return out


class Surrogate:
    """Hierarchical interpolant over a box-shaped parameter domain.

    Starts empty; grows one multi-index at a time through ``add_point``.
    The admission order must respect the partial order on indices, which
    the underlying index set enforces.
    """

    def __init__(self, distributions, maps=None):
        dists = [make_distribution(d) for d in distributions]
        if not dists:
            raise ContractError("at least one distribution is required")
        self.distributions = dists
        self.maps = _as_map_list(maps, len(dists))
        self._indices = MultiIndexSet(len(dists), [])
        self._surpluses: list[np.ndarray] = []
        self._value_shape: tuple | None = None
        self._nodes1d = [np.empty(0) for _ in dists]
        self._dens = [[] for _ in dists]
        self._matrix_cache = None

    @property
    def n_dim(self) -> int:
        return len(self.distributions)

    @property
    def value_shape(self):
        return self._value_shape

    @property
    def index_set(self) -> MultiIndexSet:
        return self._indices

    @property
    def indices(self):
        """Multi-indices in absorption order."""
        return list(self._indices)

    def __len__(self):
        return len(self._indices)

    def nodes1d(self, dim):
        return self._nodes1d[dim].copy()

    # -- node bookkeeping ------------------------------------------------

    def _ensure_levels(self, index):
        for d, lev in enumerate(index):
            have = len(self._nodes1d[d])
            if lev + 1 > have:
                nodes = leja_nodes(self.distributions[d], lev + 1)
                self._nodes1d[d] = nodes
                dens = self._dens[d]
                for l in range(have, lev + 1):
                    dens.append(float(np.prod(nodes[l] - nodes[:l])) if l else 1.0)

    def node_point(self, index):
        """Physical-coordinate grid point owned by a multi-index."""
        index = _as_index(index, self.n_dim)
        self._ensure_levels(index)
        out = np.empty(self.n_dim)
        for d, lev in enumerate(index):
            mapped = self.maps[d].forward(self._nodes1d[d][lev])
            out[d] = self.distributions[d].from_canonical(mapped)
        return out

    def node_points(self):
        """All grid points in absorption order, shape (len(self), N)."""
        return np.array([self.node_point(ix) for ix in self._indices])

    # -- evaluation ------------------------------------------------------

    def _preimages(self, pts):
        """Map physical points to the polynomial coordinate, columnwise."""
        cols = []
        for d in range(self.n_dim):
            y = self.distributions[d].to_canonical(pts[:, d])
            cols.append(np.asarray(self.maps[d].inverse(y)))
        return np.column_stack(cols)

    def _raw_preimage(self, index):
        """Exact preimage of a grid node: the raw Leja coordinates."""
        return np.array([[self._nodes1d[d][lev] for d, lev in enumerate(index)]])

    def _surplus_matrix(self):
        if self._matrix_cache is None:
            flat = [s.reshape(-1) for s in self._surpluses]
            self._matrix_cache = np.array(flat, dtype=complex)
        return self._matrix_cache

    def _evaluate_pre(self, S):
        levels = np.array(list(self._indices), dtype=int)
        max_lev = levels.max(axis=0)
        n_pts = S.shape[0]
        factors = []
        for d in range(self.n_dim):
            nodes = self._nodes1d[d]
            dens = self._dens[d]
            fac = np.empty((n_pts, max_lev[d] + 1))
            fac[:, 0] = 1.0
            run = np.ones(n_pts)
            for l in range(1, max_lev[d] + 1):
                run = run * (S[:, d] - nodes[l - 1])
                fac[:, l] = run / dens[l]
            factors.append(fac)
        mat = self._surplus_matrix()
        out = np.empty((n_pts, mat.shape[1]), dtype=complex)
        step = max(1, _MAX_BLOCK // max(len(self._indices), 1))
        for start in range(0, n_pts, step):
            stop = min(start + step, n_pts)
            weights = factors[0][start:stop, levels[:, 0]]
            for d in range(1, self.n_dim):
                weights = weights * factors[d][start:stop, levels[:, d]]
            out[start:stop] = weights @ mat.real + 1j * (weights @ mat.imag)
        return out.reshape((n_pts,) + self._value_shape)

    def evaluate(self, points):
        """Interpolant value at one point (N,) or a batch (P, N).

        Returns a complex scalar or array; raises a domain error when any
        coordinate leaves the support box.
        """
        if not self._indices:
            raise ContractError("cannot evaluate an empty surrogate")
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.ndim != 2 or pts.shape[1] != self.n_dim:
            raise ContractError(
                f"points must have {self.n_dim} columns, got shape {pts.shape}")
        out = self._evaluate_pre(self._preimages(pts))
        if single:
            return out[0] if self._value_shape else complex(out[0])
        return out

    def hierarchical_basis(self, index, points):
        """Multivariate basis polynomial of ``index`` at physical points.

        The index must belong to the set or be admissible for it.  The
        level-0 factor is identically one.
        """
        index = _as_index(index, self.n_dim)
        if index not in self._indices and not self._indices.is_admissible(index):
            raise ContractError(
                f"index {index} is neither stored nor admissible")
        self._ensure_levels(index)
        pts = np.asarray(points, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        S = self._preimages(pts)
        out = np.ones(S.shape[0])
        for d, lev in enumerate(index):
            nodes = self._nodes1d[d]
            for k in range(lev):
                out = out * (S[:, d] - nodes[k])
            if lev:
                out = out / self._dens[d][lev]
        return float(out[0]) if single else out

    # -- construction ----------------------------------------------------

    def add_point(self, index, model_value):
        """Absorb an admissible index with the model value at its node.

        The stored surplus is the difference between the value and the
        current interpolant's prediction at the node, so interpolation at
        all previously absorbed nodes is untouched.
        """
        index = _as_index(index, self.n_dim)
        if not self._indices.is_admissible(index):
            raise ContractError(f"index {index} is not admissible")
        value = np.asarray(model_value, dtype=complex)
        if self._value_shape is None:
            self._value_shape = value.shape
        elif value.shape != self._value_shape:
            raise ContractError(
                f"value shape {value.shape} does not match {self._value_shape}")
        self._ensure_levels(index)
        if len(self._indices):
            prediction = self._evaluate_pre(self._raw_preimage(index))[0]
        else:
            prediction = np.zeros(self._value_shape, dtype=complex)
        self._indices.add(index)
        self._surpluses.append(value - prediction)
        self._matrix_cache = None
        return self

    def predict_node(self, index):
        """Current interpolant value at the grid node of ``index``.

        Uses the raw Leja coordinates directly, skipping the map
        round trip, so surplus computations are exact at the nodes.
        """
        index = _as_index(index, self.n_dim)
        if not self._indices:
            raise ContractError("cannot evaluate an empty surrogate")
        self._ensure_levels(index)
        out = self._evaluate_pre(self._raw_preimage(index))[0]
        return out if self._value_shape else complex(out)

    def surplus(self, index):
        index = _as_index(index, self.n_dim)
        for ix, s in zip(self._indices, self._surpluses):
            if ix == index:
                return s if self._value_shape else complex(s)
        raise ContractError(f"index {index} is not in the set")

    @classmethod
    def fit(cls, model, distributions, index_set, maps=None):
        """Interpolate a model on a fixed downward-closed index set.

        Indices are absorbed in lexicographic order, which refines the
        componentwise partial order, so every parent precedes its children.
        """
        sur = cls(distributions, maps)
        for ix in sorted(tuple(i) for i in index_set):
            sur.add_point(ix, model(sur.node_point(ix)))
        return sur

    def restrict(self, indices):
        """Copy of this surrogate keeping only the given indices.

        The kept set must be downward closed; surpluses carry over
        unchanged because every dropped index is incomparable to or above
        the kept ones.
        """
        keep = {_as_index(ix, self.n_dim) for ix in indices}
        missing = keep.difference(self._indices)
        if missing:
            raise ContractError(f"indices not in the surrogate: {sorted(missing)}")
        out = Surrogate(self.distributions, self.maps)
        out._nodes1d = [col.copy() for col in self._nodes1d]
        out._dens = [list(dens) for dens in self._dens]
        for ix, s in zip(self._indices, self._surpluses):
            if ix in keep:
                out.add_restricted(ix, s)
        return out

    def add_restricted(self, index, surplus):
        """Append a pre-computed surplus (restriction/deserialization path)."""
        index = _as_index(index, self.n_dim)
        if not self._indices.is_admissible(index):
            raise ContractError(f"index {index} is not admissible")
        surplus = np.asarray(surplus, dtype=complex)
        if self._value_shape is None:
            self._value_shape = surplus.shape
        elif surplus.shape != self._value_shape:
            raise ContractError(
                f"value shape {surplus.shape} does not match {self._value_shape}")
        self._ensure_levels(index)
        self._indices.add(index)
        self._surpluses.append(surplus)
        self._matrix_cache = None
        return self


def serialize(sur: Surrogate) -> bytes:
    """UTF-8 JSON encoding of a surrogate; floats round trip exactly."""
    if not len(sur):
        raise SerializationError("refusing to serialize an empty surrogate")
    levels = np.array(sur.indices, dtype=int)
    max_lev = levels.max(axis=0)
    payload = {
        "version": SCHEMA_VERSION,
        "N": sur.n_dim,
        "distributions": [d.spec() for d in sur.distributions],
        "maps": [m.spec() for m in sur.maps],
        "nodes1d": [sur._nodes1d[d][:max_lev[d] + 1].tolist()
                    for d in range(sur.n_dim)],
        "indices": [list(ix) for ix in sur.indices],
        "surpluses_re": [np.real(s).tolist() for s in sur._surpluses],
        "surpluses_im": [np.imag(s).tolist() for s in sur._surpluses],
    }
    return json.dumps(payload, sort_keys=True).encode("utf-8")


_REQUIRED_KEYS = ("version", "N", "distributions", "maps", "nodes1d",
                  "indices", "surpluses_re", "surpluses_im")


def deserialize(data) -> Surrogate:
    """Rebuild a surrogate from its JSON encoding (bytes or str)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SerializationError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SerializationError("top-level JSON value must be an object")
    for key in _REQUIRED_KEYS:
        if key not in doc:
            raise SerializationError(f"missing key '{key}'")
    version = doc["version"]
    if version != SCHEMA_VERSION:
        raise UnsupportedVersionError(
            f"unsupported surrogate version {version!r}, expected {SCHEMA_VERSION}")
    n_dim = doc["N"]
    if not isinstance(n_dim, int) or n_dim < 1:
        raise SerializationError(f"invalid dimension N={n_dim!r}")
    for key in ("distributions", "maps", "nodes1d"):
        if not isinstance(doc[key], list) or len(doc[key]) != n_dim:
            raise SerializationError(f"'{key}' must list {n_dim} entries")
    indices = doc["indices"]
    re, im = doc["surpluses_re"], doc["surpluses_im"]
    if not indices:
        raise SerializationError("surrogate has no surpluses")
    if not (len(indices) == len(re) == len(im)):
        raise SerializationError(
            "'indices', 'surpluses_re' and 'surpluses_im' lengths differ")
    try:
        dists = [make_distribution(d) for d in doc["distributions"]]
        maps = [make_map(m) for m in doc["maps"]]
    except (ValueError, TypeError) as exc:
        raise SerializationError(f"bad component spec: {exc}") from exc

    sur = Surrogate(dists, maps)
    nodes1d = [np.asarray(col, dtype=float) for col in doc["nodes1d"]]
    try:
        surpluses = np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)
    except ValueError as exc:
        raise SerializationError(f"ragged surplus arrays: {exc}") from exc
    try:
        for d in range(n_dim):
            need = max(ix[d] for ix in indices) + 1
            if len(nodes1d[d]) < need:
                raise SerializationError(
                    f"'nodes1d' dimension {d} has {len(nodes1d[d])} nodes, needs {need}")
        sur._nodes1d = nodes1d
        sur._dens = [
            [float(np.prod(col[l] - col[:l])) if l else 1.0 for l in range(len(col))]
            for col in nodes1d]
        for ix, s in zip(indices, surpluses):
            # nodes are already in place; bypass the Leja regeneration
            ix = _as_index(ix, n_dim)
            if not sur._indices.is_admissible(ix):
                raise ContractError(f"index {ix} out of admissible order")
            if sur._value_shape is None:
                sur._value_shape = np.asarray(s).shape
            sur._indices.add(ix)
            sur._surpluses.append(np.asarray(s, dtype=complex))
        sur._matrix_cache = None
    except ContractError as exc:
        raise SerializationError(f"inconsistent surrogate data: {exc}") from exc
    return sur


def save_surrogate(sur: Surrogate, path):
    with open(path, "wb") as fh:
        fh.write(serialize(sur))


def load_surrogate(path) -> Surrogate:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
