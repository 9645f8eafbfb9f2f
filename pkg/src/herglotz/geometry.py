"""Finite-dimensional convexity primitives.

Two families of questions are answered here.

Scalar side: given vectors ``u_1..u_n`` in R^m that carry a strictly
positive convex representation of the origin, is that representation
unique?  This is the *algebraic* interior-of-the-convex-hull notion: the
stacked system ``sum c_j = 0``, ``sum c_j u_j = 0`` must only have the
trivial solution.  (Two antipodal points in R^2 pass the test even though
the origin is not a topological interior point of their hull; the algebraic
notion is the one that governs extremality of constrained measures.)

Matrix side: a family of subspaces ``M_1..M_n`` of C^N is *weakly
independent* when the only operator tuples ``(T_1..T_n)`` with each ``T_j``
living on ``M_j`` (``T_j = P_j T_j P_j``) and ``sum T_j = 0`` are zero.
With additional real coefficient vectors ``phi^(j)`` the sums
``sum phi_i^(j) T_j = 0`` join the hypothesis.  Because all coefficients
are real and the constraints are preserved under the adjoint, a nonzero
complex solution exists iff a nonzero hermitian solution exists, so the
computation is carried out once, over hermitian tuples, as a real
null-space problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import RANK_RTOL
from .errors import PreconditionError, SchemaError

__all__ = [
    "PerturbationTuple",
    "Subspace",
    "admissible_perturbation_space",
    "hermitian_coordinates",
    "hermitian_from_coordinates",
    "null_space",
    "numerical_rank",
    "phi_constrained_weakly_independent",
    "solve_convex_weights",
    "weakly_independent",
    "zero_interior_convex_hull",
]


def _as_vectors(vectors) -> np.ndarray:
    """Coerce a list of constraint vectors to a real (n, m) array."""
    arrs = [np.atleast_1d(np.asarray(v, dtype=float)) for v in vectors]
    if not arrs:
        raise SchemaError("need at least one constraint vector")
    m = arrs[0].shape[0] if arrs[0].ndim == 1 else None
    for a in arrs:
        if a.ndim != 1 or a.shape[0] != m:
            raise SchemaError("constraint vectors must share a common length")
        if not np.all(np.isfinite(a)):
            raise SchemaError("constraint vectors must be finite")
    return np.array(arrs, dtype=float)


def numerical_rank(a: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Rank with singular values below ``rtol * sigma_max`` counted as zero."""
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def null_space(a: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of a real matrix."""
    if a.shape[1] == 0:
        return np.zeros((0, 0))
    if a.size == 0 or not np.any(a):
        return np.eye(a.shape[1])
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = int(np.count_nonzero(s > rtol * s[0])) if s.size else 0
    return vh[rank:].conj().T


# ---------------------------------------------------------------------------
# scalar side
# ---------------------------------------------------------------------------

def _stacked(vectors: np.ndarray) -> np.ndarray:
    """Rows (u_j, 1) transposed: the (m+1) x n matrix of the c-system."""
    n = vectors.shape[0]
    return np.vstack([vectors.T, np.ones((1, n))])


def zero_interior_convex_hull(vectors, weights, *, tol: float = 1e-8,
                              rtol: float = RANK_RTOL) -> bool:
    """Decide whether the given strictly positive convex representation of 0
    is the unique one.

    ``weights`` must certify membership up front: strictly positive, summing
    to 1 and satisfying ``sum w_j u_j = 0`` within ``tol``.  Violations are
    reported as :class:`PreconditionError`, never silently repaired.
    """
    u = _as_vectors(vectors)
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.shape[0] != u.shape[0]:
        raise SchemaError("need one weight per vector")
    if np.any(w <= 0.0):
        raise PreconditionError("weights must be strictly positive")
    if abs(w.sum() - 1.0) > tol:
        raise PreconditionError("weights must sum to 1")
    resid = np.linalg.norm(u.T @ w)
    scale = max(1.0, float(np.abs(u).max(initial=0.0)))
    if resid > tol * scale:
        raise PreconditionError(
            f"weights are not a convex representation of 0 (residual {resid:.3e})")
    return numerical_rank(_stacked(u), rtol) == u.shape[0]


def solve_convex_weights(vectors, *, rtol: float = RANK_RTOL,
                         tol: float = 1e-8):
    """Unique strictly positive convex weights representing 0, if they exist.

    Returns ``None`` when the stacked system is rank deficient (the
    representation would not be unique) or when the unique solution fails to
    be strictly positive or exact.
    """
    u = _as_vectors(vectors)
    n = u.shape[0]
    a = _stacked(u)
    if numerical_rank(a, rtol) < n:
        return None
    b = np.zeros(a.shape[0])
    b[-1] = 1.0
    lam, *_ = np.linalg.lstsq(a, b, rcond=None)
    scale = max(1.0, float(np.abs(u).max(initial=0.0)))
    if np.linalg.norm(a @ lam - b) > tol * scale:
        return None
    if np.any(lam <= tol):
        return None
    return lam


# ---------------------------------------------------------------------------
# hermitian coordinates
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _hermitian_index(d: int):
    diag = [(i, i) for i in range(d)]
    off = [(i, j) for i in range(d) for j in range(i + 1, d)]
    return diag, off


def hermitian_coordinates(h: np.ndarray) -> np.ndarray:
    """Real coordinates of a hermitian d x d matrix.

    Diagonal entries followed by sqrt(2)-scaled real and imaginary parts of
    the upper triangle: d^2 reals, isometric for the Frobenius inner product.
    """
    d = h.shape[0]
    diag, off = _hermitian_index(d)
    root2 = np.sqrt(2.0)
    out = np.empty(d * d)
    out[:d] = [h[i, i].real for i, _ in diag]
    k = d
    for i, j in off:
        out[k] = root2 * h[i, j].real
        out[k + 1] = root2 * h[i, j].imag
        k += 2
    return out


def hermitian_from_coordinates(x: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    diag, off = _hermitian_index(d)
    for k, (i, _) in enumerate(diag):
        h[i, i] = x[k]
    k = d
    inv_root2 = 1.0 / np.sqrt(2.0)
    for i, j in off:
        v = (x[k] + 1j * x[k + 1]) * inv_root2
        h[i, j] = v
        h[j, i] = np.conj(v)
        k += 2
    return h


# ---------------------------------------------------------------------------
# subspaces and perturbation tuples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """A subspace of C^N held as a tolerance-certified orthogonal projector."""

    dim: int
    projector: np.ndarray

    @classmethod
    def from_basis(cls, basis: np.ndarray) -> "Subspace":
        """Subspace spanned by the columns of ``basis`` (need not be orthonormal)."""
        b = np.atleast_2d(np.asarray(basis, dtype=complex))
        if b.shape[1] == 0:
            raise SchemaError("zero subspace is not allowed")
        q, _ = np.linalg.qr(b)
        rank = numerical_rank(b)
        if rank == 0:
            raise SchemaError("zero subspace is not allowed")
        q = q[:, :rank]
        return cls(dim=rank, projector=q @ q.conj().T)

    @classmethod
    def from_matrix_range(cls, w: np.ndarray, rtol: float = RANK_RTOL) -> "Subspace":
        """Range of a hermitian PSD matrix, eigenvalues below rtol*max dropped."""
        w = np.asarray(w, dtype=complex)
        vals, vecs = np.linalg.eigh((w + w.conj().T) / 2.0)
        top = float(vals.max(initial=0.0))
        if top <= 0.0:
            raise SchemaError("zero matrix has no range subspace")
        keep = vals > rtol * top
        basis = vecs[:, keep]
        return cls(dim=int(keep.sum()), projector=basis @ basis.conj().T)

    def basis(self) -> np.ndarray:
        """Orthonormal column basis recovered from the projector."""
        vals, vecs = np.linalg.eigh(self.projector)
        return vecs[:, vals > 0.5]

    def validate(self, tol: float = 1e-8) -> None:
        p = self.projector
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise SchemaError("projector must be square")
        if np.linalg.norm(p - p.conj().T, 2) > tol:
            raise SchemaError("projector is not hermitian")
        if np.linalg.norm(p @ p - p, 2) > tol:
            raise SchemaError("projector is not idempotent")
        if self.dim != int(round(p.trace().real)):
            raise SchemaError("dim does not match trace of projector")


@dataclass(frozen=True)
class PerturbationTuple:
    """Hermitian matrices (T_1..T_n), the j-th living on its subspace."""

    blocks: tuple
    norm: float

    @classmethod
    def from_blocks(cls, blocks) -> "PerturbationTuple":
        blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
        norm = float(np.sqrt(sum(np.linalg.norm(b, "fro") ** 2 for b in blocks)))
        return cls(blocks=blocks, norm=norm)

    def validate(self, subspaces, tol: float = 1e-8) -> None:
        if len(self.blocks) != len(subspaces):
            raise SchemaError("block count does not match subspace count")
        for t, sub in zip(self.blocks, subspaces):
            if np.linalg.norm(t - t.conj().T, 2) > tol:
                raise SchemaError("perturbation block is not hermitian")
            p = sub.projector
            if np.linalg.norm(t - p @ t @ p, 2) > tol * max(1.0, np.linalg.norm(t, 2)):
                raise SchemaError("perturbation block does not live on its subspace")

    def scaled(self, factor: float) -> "PerturbationTuple":
        return PerturbationTuple.from_blocks([factor * b for b in self.blocks])


def _check_family(subspaces, phis):
    if len(subspaces) == 0:
        raise SchemaError("need at least one subspace")
    n_space = subspaces[0].projector.shape[0]
    for sub in subspaces:
        if sub.projector.shape != (n_space, n_space):
            raise SchemaError("all projectors must act on the same space")
        if sub.dim <= 0:
            raise SchemaError("zero subspace is not allowed")
    if phis is None:
        phis = np.zeros((len(subspaces), 0))
    else:
        phis = np.asarray(
            [np.atleast_1d(np.asarray(p, dtype=float)) for p in phis], dtype=float)
        if phis.shape[0] != len(subspaces):
            raise SchemaError("need one coefficient vector per subspace")
    return n_space, phis


def _constraint_matrix(subspaces, phis) -> tuple[np.ndarray, list]:
    """Real matrix of the map (T_1..T_n) -> (sum T_j, sum phi_i^(j) T_j).

    Tuples are coordinatized over hermitian matrices compressed to each
    subspace; the image consists of m+1 hermitian N x N matrices, giving
    N^2 (m+1) real rows in total.
    """
    n_space, phis = _check_family(subspaces, phis)
    m = phis.shape[1]
    bases = [sub.basis() for sub in subspaces]
    n_rows = (m + 1) * n_space * n_space
    cols = []
    col_meta = []
    for j, (sub, u) in enumerate(zip(subspaces, bases)):
        d = sub.dim
        for k in range(d * d):
            e = np.zeros(d * d)
            e[k] = 1.0
            t = u @ hermitian_from_coordinates(e, d) @ u.conj().T
            coords = hermitian_coordinates(t)
            col = np.empty(n_rows)
            col[: n_space * n_space] = coords
            for i in range(m):
                col[(i + 1) * n_space ** 2:(i + 2) * n_space ** 2] = phis[j, i] * coords
            cols.append(col)
        col_meta.append((j, bases[j], sub.dim))
    return np.array(cols).T, col_meta


def admissible_perturbation_space(subspaces, phis=None, *,
                                  rtol: float = RANK_RTOL) -> list:
    """Orthonormal basis of the hermitian tuples annihilated by all constraints.

    Empty exactly when the family is (phi-constrained) weakly independent.
    The basis is orthonormal for the Frobenius inner product summed over
    blocks, inherited from the SVD of the stacked real system.
    """
    a, col_meta = _constraint_matrix(subspaces, phis)
    kernel = null_space(a, rtol)
    out = []
    for col in kernel.T:
        blocks = []
        offset = 0
        for _, u, d in col_meta:
            h = hermitian_from_coordinates(col[offset:offset + d * d], d)
            blocks.append(u @ h @ u.conj().T)
            offset += d * d
        out.append(PerturbationTuple.from_blocks(blocks))
    return out


def phi_constrained_weakly_independent(subspaces, phis, *,
                                       rtol: float = RANK_RTOL) -> bool:
    """True iff only the zero tuple satisfies the constrained living-on system."""
    a, _ = _constraint_matrix(subspaces, phis)
    return numerical_rank(a, rtol) == a.shape[1]


def weakly_independent(subspaces, *, rtol: float = RANK_RTOL) -> bool:
    """Weak independence = the unconstrained (m = 0) case."""
    return phi_constrained_weakly_independent(subspaces, None, rtol=rtol)
