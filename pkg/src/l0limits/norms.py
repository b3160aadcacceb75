"""Fiber norm specifications and the exact evaluation kernel.

The norm family is weighted and framed p-norms for p in {1, 2, inf},
closed under subspace restriction, duality and operator-norm formation:

* ``WeightedP(p, w)``  is ``x -> ||diag(w) x||_p`` with positive weights;
* ``FramedP(p, A)``    is ``x -> ||A x||_p`` with A of full column rank;
* ``DualOf(inner)``    is the dual norm ``xi -> sup{<xi, x> : inner(x) <= 1}``;
* ``OperatorNorm``     is the induced norm on flattened matrices.

Duals are simplified eagerly: only ``DualOf`` of a strictly tall framed
1- or inf-norm survives as a symbolic node, everything else collapses to
a closed form, and double duals flatten back to the original norm.

Unit balls of the 1/inf variants are polytopes; convex maximization over
them is exact once a finite candidate superset of the vertices is known.
Candidate enumeration is capped at dimension ``VERTEX_DIM_CAP``.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Optional

import numpy as np

from .config import tolerance
from .errors import (
    BracketTooWideError,
    DimensionCapError,
    ShapeMismatchError,
    UnsupportedNormError,
)

INF = float("inf")

#: Sign-pattern and subset enumeration is limited to this many dimensions.
VERTEX_DIM_CAP = 12

# Iteration budget for the power-iteration spectral kernel.  Each step
# squares the Gram matrix, so the effective power after k steps is 2**k.
_SPECTRAL_SQUARINGS = 64


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ShapeMismatchError(f"expected a matrix, got ndim={a.ndim}")
    return a


def _conjugate(p: float) -> float:
    if p == 1:
        return INF
    if p == INF:
        return 1
    return 2


def _check_cap(n: int, what: str) -> None:
    if n > VERTEX_DIM_CAP:
        raise DimensionCapError(
            f"{what} needs enumeration in dimension {n} > cap {VERTEX_DIM_CAP}"
        )


def _sign_grid(n: int) -> np.ndarray:
    """All sign vectors in {-1, +1}^n, shape (2^n, n)."""
    _check_cap(n, "sign-pattern enumeration")
    if n == 0:
        return np.zeros((1, 0))
    return np.array(list(itertools.product((-1.0, 1.0), repeat=n)))


def _comb(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _p_norm(y: np.ndarray, p: float) -> float:
    if y.size == 0:
        return 0.0
    if p == 1:
        return float(np.abs(y).sum())
    if p == INF:
        return float(np.abs(y).max())
    return float(np.sqrt(np.dot(y, y)))


def spectral_norm(mat: np.ndarray) -> float:
    """Largest singular value, by power iteration on the Gram matrix.

    The iteration is accelerated by repeated squaring (normalizing each
    step), so the dominance gap decays doubly exponentially and the
    Rayleigh quotient of the resulting vector is exact to machine
    precision for the small dense matrices used here.
    """
    return spectral_norm_witness(mat)[0]


def spectral_norm_witness(mat: np.ndarray):
    """Largest singular value together with a maximizing unit vector."""
    mat = _as_matrix(mat)
    rows, cols = mat.shape
    if rows == 0 or cols == 0 or not np.any(mat):
        v = np.zeros(cols)
        if cols:
            v[0] = 1.0
        return 0.0, v
    # Work with the smaller Gram matrix; recover the right-singular vector.
    if cols <= rows:
        gram = mat.T @ mat
    else:
        gram = mat @ mat.T
    power = gram / np.linalg.norm(gram)
    for _ in range(_SPECTRAL_SQUARINGS):
        nxt = power @ power
        scale = np.linalg.norm(nxt)
        if scale == 0.0:
            break
        nxt = nxt / scale
        if np.linalg.norm(nxt - power) <= 1e-16:
            power = nxt
            break
        power = nxt
    # Any nonzero column of the limiting projector spans the top eigenspace.
    col = int(np.argmax(np.linalg.norm(power, axis=0)))
    vec = power[:, col]
    norm = np.linalg.norm(vec)
    if norm == 0.0:  # fall back to a deterministic start
        vec = np.ones(gram.shape[0])
        norm = np.linalg.norm(vec)
    vec = vec / norm
    value = float(np.sqrt(max(0.0, vec @ gram @ vec)))
    if cols <= rows:
        right = vec
    else:
        right = mat.T @ vec
        n = np.linalg.norm(right)
        right = right / n if n > 0 else np.zeros(cols)
    return value, right


class WeightedP:
    """Diagonal-weighted p-norm ``x -> ||diag(w) x||_p``."""

    kind = "weighted_p"

    def __init__(self, p, weights):
        p = float(p)
        if p not in (1.0, 2.0, INF):
            raise UnsupportedNormError(f"p must be 1, 2 or inf, got {p}")
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if weights.size and not np.all(weights > 0.0):
            raise ValueError("norm weights must be strictly positive")
        weights = weights.copy()
        weights.setflags(write=False)
        self.p = p
        self.weights = weights

    @property
    def dim(self) -> int:
        return self.weights.size

    @property
    def is_polyhedral(self) -> bool:
        return self.p != 2.0 and self.dim > 0

    def eval(self, x: np.ndarray) -> float:
        return _p_norm(self.weights * x, self.p)

    def euclidean_transform(self) -> Optional[np.ndarray]:
        if self.p == 2.0:
            return np.diag(self.weights)
        return None

    @cached_property
    def _ball_candidates(self) -> np.ndarray:
        if self.p == 1.0:
            cross = np.diag(1.0 / self.weights)
            return np.vstack([cross, -cross])
        return _sign_grid(self.dim) / self.weights

    @cached_property
    def _dual_candidates(self) -> np.ndarray:
        if self.p == 1.0:
            return _sign_grid(self.dim) * self.weights
        return np.vstack([np.diag(self.weights), -np.diag(self.weights)])

    def ball_candidates(self) -> np.ndarray:
        if not self.is_polyhedral:
            raise UnsupportedNormError("no vertex description for a p=2 ball")
        return self._ball_candidates

    def dual_ball_candidates(self) -> np.ndarray:
        if not self.is_polyhedral:
            raise UnsupportedNormError("no vertex description for a p=2 ball")
        return self._dual_candidates

    def dual(self):
        if self.dim == 0:
            return self
        return WeightedP(_conjugate(self.p), 1.0 / self.weights)

    def restrict(self, basis: np.ndarray):
        basis = _as_matrix(basis)
        if basis.shape[0] != self.dim:
            raise ShapeMismatchError("restriction basis has wrong ambient dimension")
        if basis.shape == (self.dim, self.dim) and np.array_equal(basis, np.eye(self.dim)):
            return self
        return FramedP(self.p, self.weights[:, None] * basis)

    def __eq__(self, other):
        return (
            isinstance(other, WeightedP)
            and self.p == other.p
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash(("weighted_p", self.p, self.weights.tobytes()))

    def __repr__(self):
        return f"WeightedP({self.p:g}, {np.array2string(self.weights, precision=4)})"


def zero_norm() -> WeightedP:
    """The norm of the zero space."""
    return WeightedP(1, ())


class FramedP:
    """Composed p-norm ``x -> ||A x||_p`` with A injective (full column rank)."""

    kind = "framed_p"

    def __init__(self, p, matrix):
        p = float(p)
        if p not in (1.0, 2.0, INF):
            raise UnsupportedNormError(f"p must be 1, 2 or inf, got {p}")
        matrix = _as_matrix(matrix)
        rows, cols = matrix.shape
        if cols > 0:
            if rows < cols:
                raise ValueError("frame matrix must have at least as many rows as columns")
            sv = np.linalg.svd(matrix, compute_uv=False)
            if sv.size == 0 or sv[-1] <= 1e-12 * max(1.0, sv[0]):
                raise ValueError("frame matrix must have full column rank")
        matrix = matrix.copy()
        matrix.setflags(write=False)
        self.p = p
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def is_square(self) -> bool:
        return self.matrix.shape[0] == self.matrix.shape[1]

    @property
    def is_polyhedral(self) -> bool:
        return self.p != 2.0 and self.dim > 0

    def eval(self, x: np.ndarray) -> float:
        return _p_norm(self.matrix @ x, self.p)

    @cached_property
    def _square_transform(self) -> np.ndarray:
        # ||A x||_2 == ||R x||_2 for the triangular factor of A = QR.
        if self.is_square:
            return self.matrix
        r = np.linalg.qr(self.matrix, mode="r")
        signs = np.sign(np.diag(r))
        signs[signs == 0] = 1.0
        return signs[:, None] * r

    def euclidean_transform(self) -> Optional[np.ndarray]:
        if self.p == 2.0:
            return self._square_transform
        return None

    @cached_property
    def _ball_candidates(self) -> np.ndarray:
        rows, cols = self.matrix.shape
        budget = 500_000
        if self.p == 1.0:
            work = _comb(rows, max(cols - 1, 0))
        else:
            work = _comb(rows, cols) * (2 ** min(cols, 40))
        if work > budget:
            raise DimensionCapError(
                f"frame ball enumeration needs {work} candidate solves "
                f"(budget {budget})"
            )
        if self.p == 1.0:
            # Vertices of {x : ||A x||_1 <= 1}.  The dual ball is the
            # zonotope spanned by the rows of A, whose facet normals are
            # orthogonal to (dim-1)-subsets of rows; each normal u gives
            # the vertex u / ||A u||_1.
            if cols == 1:
                u = np.ones(1)
                return np.array([u, -u]) / _p_norm(self.matrix @ u, 1.0)
            verts = []
            for subset in itertools.combinations(range(rows), cols - 1):
                sub = self.matrix[list(subset), :]
                _, sv, vt = np.linalg.svd(sub)
                rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0] if sv.size else 1.0)))
                if rank != cols - 1:
                    continue
                u = vt[-1]
                val = _p_norm(self.matrix @ u, 1.0)
                if val > 1e-12:
                    verts.append(u / val)
                    verts.append(-u / val)
            return np.array(verts)
        # Vertices of {x : |a_i . x| <= 1}: intersections of dim active
        # facets, filtered by feasibility.
        verts = []
        feas_tol = 1e-9
        for subset in itertools.combinations(range(rows), cols):
            sub = self.matrix[list(subset), :]
            if abs(np.linalg.det(sub)) <= 1e-12:
                continue
            for signs in _sign_grid(cols):
                x = np.linalg.solve(sub, signs)
                if np.max(np.abs(self.matrix @ x)) <= 1.0 + feas_tol:
                    verts.append(x)
        return np.array(verts)

    @cached_property
    def _dual_candidates(self) -> np.ndarray:
        rows, _ = self.matrix.shape
        if self.p == 1.0:
            # Dual ball is the zonotope A^T [-1,1]^rows; its extreme
            # points lie among A^T s over sign vectors s.
            return _sign_grid(rows) @ self.matrix
        return np.vstack([self.matrix, -self.matrix])

    def ball_candidates(self) -> np.ndarray:
        if not self.is_polyhedral:
            raise UnsupportedNormError("no vertex description for a p=2 ball")
        return self._ball_candidates

    def dual_ball_candidates(self) -> np.ndarray:
        if not self.is_polyhedral:
            raise UnsupportedNormError("no vertex description for a p=2 ball")
        return self._dual_candidates

    def dual(self):
        if self.dim == 0:
            return zero_norm()
        if self.p == 2.0:
            r = self._square_transform
            return FramedP(2, np.linalg.inv(r).T)
        if self.is_square:
            return FramedP(_conjugate(self.p), np.linalg.inv(self.matrix).T)
        return DualOf(self)

    def restrict(self, basis: np.ndarray):
        basis = _as_matrix(basis)
        if basis.shape[0] != self.dim:
            raise ShapeMismatchError("restriction basis has wrong ambient dimension")
        if basis.shape == (self.dim, self.dim) and np.array_equal(basis, np.eye(self.dim)):
            return self
        return FramedP(self.p, self.matrix @ basis)

    def __eq__(self, other):
        return (
            isinstance(other, FramedP)
            and self.p == other.p
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash(("framed_p", self.p, self.matrix.tobytes()))

    def __repr__(self):
        return f"FramedP({self.p:g}, shape={self.matrix.shape})"


class DualOf:
    """Dual norm of a strictly tall framed 1- or inf-norm.

    Every other dual collapses to a closed form; see :func:`dual_spec`.
    Evaluation is exact convex maximization over the inner unit ball,
    which is a polytope with an explicitly enumerable vertex set.
    """

    kind = "dual_of"

    def __init__(self, inner: FramedP):
        if not isinstance(inner, FramedP) or inner.p == 2.0 or inner.is_square:
            raise UnsupportedNormError(
                "DualOf only wraps strictly tall framed 1/inf norms; "
                "use dual_spec for the general construction"
            )
        self.inner = inner

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def is_polyhedral(self) -> bool:
        return True

    def eval(self, x: np.ndarray) -> float:
        if x.size == 0:
            return 0.0
        # The candidate set is symmetric, so the plain maximum of the
        # pairings equals the maximum of their absolute values.
        return float(np.max(self.inner.ball_candidates() @ x))

    def euclidean_transform(self) -> Optional[np.ndarray]:
        return None

    def ball_candidates(self) -> np.ndarray:
        return self.inner.dual_ball_candidates()

    def dual_ball_candidates(self) -> np.ndarray:
        return self.inner.ball_candidates()

    def dual(self):
        return self.inner

    def restrict(self, basis: np.ndarray):
        basis = _as_matrix(basis)
        if basis.shape[0] != self.dim:
            raise ShapeMismatchError("restriction basis has wrong ambient dimension")
        if basis.shape == (self.dim, self.dim) and np.array_equal(basis, np.eye(self.dim)):
            return self
        if basis.shape[1] == 0:
            return zero_norm()
        # Restricting a polyhedral norm with dual candidates {w} gives the
        # max-of-functionals norm with functionals {B^T w}, i.e. a framed
        # inf-norm.  Keep one functional from each +- pair.
        cands = self.dual_ball_candidates()
        rows = cands @ basis
        keep = _halve_symmetric(rows)
        return FramedP(INF, keep)

    def __eq__(self, other):
        return isinstance(other, DualOf) and self.inner == other.inner

    def __hash__(self):
        return hash(("dual_of", self.inner))

    def __repr__(self):
        return f"DualOf({self.inner!r})"


def _halve_symmetric(rows: np.ndarray) -> np.ndarray:
    """Drop near-duplicate and sign-mirrored rows, keeping the span intact."""
    kept = []
    for r in rows:
        if np.max(np.abs(r), initial=0.0) <= 1e-14:
            continue
        if any(np.allclose(r, k, atol=1e-12) or np.allclose(r, -k, atol=1e-12) for k in kept):
            continue
        kept.append(r)
    return np.array(kept) if kept else rows


class OperatorNorm:
    """Induced norm on (target_dim x source_dim) matrices, flattened row-major."""

    kind = "operator"

    def __init__(self, source_dim, source_spec, target_dim, target_spec):
        source_dim = int(source_dim)
        target_dim = int(target_dim)
        if source_spec.dim != source_dim or target_spec.dim != target_dim:
            raise ShapeMismatchError("operator norm endpoint dims do not match specs")
        self.source_dim = source_dim
        self.source_spec = source_spec
        self.target_dim = target_dim
        self.target_spec = target_spec

    @property
    def dim(self) -> int:
        return self.source_dim * self.target_dim

    @property
    def is_polyhedral(self) -> bool:
        return False

    def eval(self, x: np.ndarray) -> float:
        mat = np.asarray(x, dtype=float).reshape(self.target_dim, self.source_dim)
        return operator_norm_value(mat, self.source_spec, self.target_spec)

    def euclidean_transform(self) -> Optional[np.ndarray]:
        return None

    def dual(self):
        raise UnsupportedNormError("duals of operator-norm fibers are not supported")

    def restrict(self, basis):
        raise UnsupportedNormError(
            "subspace restriction of operator-norm fibers is not supported"
        )

    def __eq__(self, other):
        return (
            isinstance(other, OperatorNorm)
            and self.source_dim == other.source_dim
            and self.target_dim == other.target_dim
            and self.source_spec == other.source_spec
            and self.target_spec == other.target_spec
        )

    def __hash__(self):
        return hash(("operator", self.source_spec, self.target_spec))

    def __repr__(self):
        return f"OperatorNorm({self.source_dim}->{self.target_dim})"


def _is_unit_scalar(dim: int, spec) -> bool:
    return dim == 1 and abs(spec.eval(np.ones(1)) - 1.0) <= 1e-15


def dual_spec(spec):
    """Dual norm with eager simplification and double-dual flattening."""
    if spec.dim == 0:
        return spec
    return spec.dual()


def operator_spec(source_dim, source_spec, target_dim, target_spec):
    """Norm spec for a space of homomorphisms, simplified where possible.

    A scalar target turns the matrix space into covectors with the dual
    norm; a scalar source turns it into target vectors with the target
    norm.  Both simplifications keep evaluation exact.
    """
    if source_dim == 0 or target_dim == 0:
        return zero_norm()
    if _is_unit_scalar(target_dim, target_spec):
        return dual_spec(source_spec)
    if _is_unit_scalar(source_dim, source_spec):
        return target_spec
    return OperatorNorm(source_dim, source_spec, target_dim, target_spec)


def norm_eval(spec, x) -> float:
    """Evaluate a norm spec on a coordinate vector."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != spec.dim:
        raise ShapeMismatchError(f"vector of length {x.size} against norm of dim {spec.dim}")
    if spec.dim == 0:
        return 0.0
    return float(spec.eval(x))


# ---------------------------------------------------------------------------
# Operator norms between normed fibers.
#
# Dispatch:
#   (a) polytope source ball: convex maximization attains at a vertex, so
#       evaluate the target norm at each candidate;
#   (b) Euclidean source and target: largest singular value;
#   (c) Euclidean source, polytope target: per target facet functional a
#       closed-form quadratic maximization;
#   (d) anything else: certified bracket, erroring when too wide.
# ---------------------------------------------------------------------------


def _euclidean_upper(spec) -> float:
    """Upper bound for sup{spec(x) : ||x||_2 <= 1}."""
    if spec.dim == 0:
        return 0.0
    if spec.is_polyhedral:
        return float(np.max(np.linalg.norm(spec.dual_ball_candidates(), axis=1)))
    r = spec.euclidean_transform()
    if r is not None:
        return spectral_norm(r)
    assert isinstance(spec, OperatorNorm)
    lo = _euclidean_lower(spec.source_spec)
    if lo == 0.0:
        return INF
    return _euclidean_upper(spec.target_spec) / lo


def _euclidean_lower(spec) -> float:
    """Lower bound for inf{spec(x) : ||x||_2 = 1}."""
    if spec.dim == 0:
        return INF
    if spec.is_polyhedral:
        reach = float(np.max(np.linalg.norm(spec.ball_candidates(), axis=1)))
        return 1.0 / reach if reach > 0 else INF
    r = spec.euclidean_transform()
    if r is not None:
        s = spectral_norm(np.linalg.inv(r))
        return 1.0 / s if s > 0 else INF
    assert isinstance(spec, OperatorNorm)
    up = _euclidean_upper(spec.source_spec)
    if up == 0.0 or up == INF:
        return 0.0
    rank_cap = np.sqrt(min(spec.source_dim, spec.target_dim))
    return _euclidean_lower(spec.target_spec) / (up * rank_cap)


_BRACKET_RNG_SEED = 0x5EED


def _bracket_norm(mat, source_spec, target_spec):
    lower = 0.0
    witness = None
    dirs = [np.ones(mat.shape[1])]
    dirs.extend(np.eye(mat.shape[1]))
    rng = np.random.default_rng(_BRACKET_RNG_SEED)
    dirs.extend(rng.standard_normal((64, mat.shape[1])))
    for d in dirs:
        n = norm_eval(source_spec, d)
        if n <= 1e-14:
            continue
        x = d / n
        val = norm_eval(target_spec, mat @ x)
        if val > lower:
            lower, witness = val, x
    upper = _euclidean_upper(target_spec) * spectral_norm(mat)
    lo_src = _euclidean_lower(source_spec)
    upper = INF if lo_src == 0.0 else upper / lo_src
    if upper - lower <= tolerance() * max(1.0, lower):
        return lower, witness
    raise BracketTooWideError(lower, upper, "uncertified operator norm combination")


def operator_norm_witness(mat, source_spec, target_spec):
    """Exact pointwise operator norm with a maximizing unit vector.

    The witness has source norm one and achieves the returned value
    (``None`` for degenerate shapes).
    """
    mat = _as_matrix(mat)
    t, s = mat.shape
    if s != source_spec.dim or t != target_spec.dim:
        raise ShapeMismatchError("matrix shape does not match fiber dimensions")
    if s == 0 or t == 0:
        return 0.0, None
    if source_spec.is_polyhedral:
        cands = source_spec.ball_candidates()
        values = np.array([norm_eval(target_spec, mat @ v) for v in cands])
        best = int(np.argmax(values))
        return float(values[best]), cands[best]
    r = source_spec.euclidean_transform()
    if r is not None:
        r_inv = np.linalg.inv(r)
        if target_spec.is_polyhedral:
            duals = target_spec.dual_ball_candidates()
            scores = np.array([np.linalg.norm(r_inv.T @ (mat.T @ w)) for w in duals])
            best = int(np.argmax(scores))
            value = float(scores[best])
            if value <= 0.0:
                unit = r_inv[:, 0] / np.linalg.norm(r @ r_inv[:, 0])
                return 0.0, unit
            u = r_inv.T @ (mat.T @ duals[best])
            x = r_inv @ (u / np.linalg.norm(u))
            return value, x
        q = target_spec.euclidean_transform()
        if q is not None:
            core = q @ mat @ r_inv
            sigma, u = spectral_norm_witness(core)
            return float(sigma), r_inv @ u
    return _bracket_norm(mat, source_spec, target_spec)


def operator_norm_value(mat, source_spec, target_spec) -> float:
    return operator_norm_witness(mat, source_spec, target_spec)[0]
