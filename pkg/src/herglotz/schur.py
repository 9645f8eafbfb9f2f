"""Cayley transforms, matrix Moebius maps and defect-kernel identities.

Scalar and matrix variants of the half-plane/disk change of variable:

    S = (F + I)^{-1} (F - I),        F = (I - S)^{-1} (I + S),

together with the ball automorphism centered at a strict contraction W,

    L_W[Z] = [A Z + B][C Z + D]^{-1},
    [[A, B], [C, D]] = [[Dw*^{-1}, -Dw*^{-1} W], [-W* Dw*^{-1}, Dw^{-1}]],

where ``Dw = (I - W* W)^{1/2}`` and ``Dw* = (I - W W*)^{1/2}`` are the
defect operators.  ``L_W`` maps the open matrix ball to itself with
``L_W[W] = 0``; its inverse is ``Z' -> Dw* (I + Z' W*)^{-1} (Z' + W) Dw^{-1}``.
The residual helpers at the bottom evaluate the exact algebraic identities
relating the defect kernels of ``S`` and ``F`` and of a recentred ``S``;
they hold pointwise for any contraction values, so random samples exercise
them directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SchemaError

__all__ = [
    "MatrixFunctionSample",
    "cayley",
    "cayley_inverse",
    "defect",
    "defect_star",
    "herglotz_defect_residual",
    "matrix_cayley",
    "matrix_cayley_inverse",
    "mobius_apply",
    "mobius_inverse",
    "normalize_schur",
    "operator_norm",
    "renormalization_defect_residual",
    "resolvent_identity_residual",
    "schur_defect_residual",
]


# -- scalar Cayley transform -------------------------------------------------

def cayley(f):
    """Half-plane to disk: ``(f - 1) / (f + 1)``."""
    f = np.asarray(f, dtype=complex)
    if np.any(np.abs(f + 1.0) < 1e-300):
        raise PreconditionError("Cayley transform has a pole at f = -1")
    out = (f - 1.0) / (f + 1.0)
    return out if out.ndim else complex(out)


def cayley_inverse(s):
    """Disk to half-plane: ``(1 + s) / (1 - s)``."""
    s = np.asarray(s, dtype=complex)
    if np.any(np.abs(1.0 - s) < 1e-300):
        raise PreconditionError("inverse Cayley transform has a pole at s = 1")
    out = (1.0 + s) / (1.0 - s)
    return out if out.ndim else complex(out)


# -- matrix helpers -----------------------------------------------------------

def operator_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2))


def _herm_sqrt(a: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((a + a.conj().T) / 2.0)
    if vals.min() < -1e-12:
        raise PreconditionError("matrix square root of an indefinite matrix")
    return vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T


def defect(w: np.ndarray) -> np.ndarray:
    """(I - W* W)^{1/2}."""
    w = np.asarray(w, dtype=complex)
    return _herm_sqrt(np.eye(w.shape[0]) - w.conj().T @ w)


def defect_star(w: np.ndarray) -> np.ndarray:
    """(I - W W*)^{1/2}."""
    w = np.asarray(w, dtype=complex)
    return _herm_sqrt(np.eye(w.shape[0]) - w @ w.conj().T)


def _require_strict_contraction(w: np.ndarray, margin: float = 1e-8) -> None:
    top = operator_norm(w)
    if top >= 1.0 - margin:
        gap = max(1.0 - top, 0.0)
        raise PreconditionError(
            f"center is too close to unitary: ||W|| = {top:.12f}, defect "
            f"conditioning ~ {1.0 / max(gap, 1e-300):.3e}")


def mobius_apply(w: np.ndarray, z: np.ndarray, margin: float = 1e-8) -> np.ndarray:
    """Ball automorphism sending the strict contraction ``w`` to 0."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if w.shape != z.shape or w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise SchemaError("W and Z must be square matrices of equal size")
    _require_strict_contraction(w, margin)
    if operator_norm(z) >= 1.0:
        raise PreconditionError("argument must be a strict contraction")
    dw = defect(w)
    dws = defect_star(w)
    dws_inv = np.linalg.inv(dws)
    dw_inv = np.linalg.inv(dw)
    num = dws_inv @ z - dws_inv @ w
    den = -w.conj().T @ dws_inv @ z + dw_inv
    return num @ np.linalg.inv(den)


def mobius_inverse(w: np.ndarray, z_prime: np.ndarray, margin: float = 1e-8) -> np.ndarray:
    """Inverse automorphism: ``Dw* (I + Z' W*)^{-1} (Z' + W) Dw^{-1}``."""
    w = np.asarray(w, dtype=complex)
    z_prime = np.asarray(z_prime, dtype=complex)
    if w.shape != z_prime.shape or w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise SchemaError("W and Z' must be square matrices of equal size")
    _require_strict_contraction(w, margin)
    eye = np.eye(w.shape[0])
    return defect_star(w) @ np.linalg.inv(eye + z_prime @ w.conj().T) \
        @ (z_prime + w) @ np.linalg.inv(defect(w))


# -- sampled matrix functions --------------------------------------------------

@dataclass(frozen=True)
class MatrixFunctionSample:
    """A matrix-valued function represented by values on a point list."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        points = np.atleast_1d(np.asarray(self.points, dtype=complex))
        values = np.asarray(self.values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None, None]
        if values.ndim != 3 or values.shape[1] != values.shape[2]:
            raise SchemaError("values must be a list of square matrices")
        if values.shape[0] != points.shape[0]:
            raise SchemaError("need one value per sample point")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, points, fn) -> "MatrixFunctionSample":
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        return cls(points, np.asarray([np.atleast_2d(fn(z)) for z in points]))

    @property
    def size(self) -> int:
        return self.values.shape[1]

    def index_of(self, z: complex, tol: float = 1e-12) -> int:
        hits = np.nonzero(np.abs(self.points - complex(z)) <= tol)[0]
        if hits.size == 0:
            raise PreconditionError(f"point {z} is not among the sample points")
        return int(hits[0])

    def validate_inside(self, annulus) -> None:
        for z in self.points:
            annulus.require_interior(z)

    def map_values(self, fn) -> "MatrixFunctionSample":
        return MatrixFunctionSample(self.points,
                                    np.asarray([fn(v) for v in self.values]))


def _max_condition(mats) -> float:
    worst = 0.0
    for a in mats:
        s = np.linalg.svd(a, compute_uv=False)
        if s.min() < 1e-300:
            return np.inf
        worst = max(worst, float(s.max() / s.min()))
    return worst


def matrix_cayley(sample: MatrixFunctionSample, cond_limit: float = 1e14) -> MatrixFunctionSample:
    """Pointwise ``F -> (F + I)^{-1}(F - I)``."""
    eye = np.eye(sample.size)
    shifted = [v + eye for v in sample.values]
    cond = _max_condition(shifted)
    if cond > cond_limit:
        raise PreconditionError(
            f"F + I is numerically singular at a sample point (cond {cond:.3e})")
    return sample.map_values(lambda v: np.linalg.solve(v + eye, v - eye))


def matrix_cayley_inverse(sample: MatrixFunctionSample, cond_limit: float = 1e14) -> MatrixFunctionSample:
    """Pointwise ``S -> (I - S)^{-1}(I + S)``."""
    eye = np.eye(sample.size)
    shifted = [eye - v for v in sample.values]
    cond = _max_condition(shifted)
    if cond > cond_limit:
        raise PreconditionError(
            f"I - S is numerically singular at a sample point (cond {cond:.3e})")
    return sample.map_values(lambda v: np.linalg.solve(eye - v, eye + v))


def normalize_schur(sample: MatrixFunctionSample, t0: complex,
                    margin: float = 1e-8) -> MatrixFunctionSample:
    """Recenter a strict-contraction sample so the value at ``t0`` is 0."""
    idx = sample.index_of(t0)
    w = sample.values[idx]
    _require_strict_contraction(w, margin)
    return sample.map_values(lambda v: mobius_apply(w, v, margin))


# -- algebraic identity residuals ----------------------------------------------

def herglotz_defect_residual(s_z, s_w, f_z, f_w) -> float:
    """|| F(z) + F(w)* - 2 (I - S(z))^{-1} (I - S(z) S(w)*) (I - S(w)*)^{-1} ||."""
    eye = np.eye(s_z.shape[0])
    lhs = f_z + f_w.conj().T
    rhs = 2.0 * np.linalg.solve(eye - s_z, (eye - s_z @ s_w.conj().T)
                                @ np.linalg.inv(eye - s_w.conj().T))
    return operator_norm(lhs - rhs)


def schur_defect_residual(s_z, s_w, f_z, f_w) -> float:
    """|| I - S(z)S(w)* - 2 (F(z)+I)^{-1} (F(z)+F(w)*) (F(w)*+I)^{-1} ||."""
    eye = np.eye(s_z.shape[0])
    lhs = eye - s_z @ s_w.conj().T
    rhs = 2.0 * np.linalg.solve(f_z + eye, (f_z + f_w.conj().T)
                                @ np.linalg.inv(f_w.conj().T + eye))
    return operator_norm(lhs - rhs)


def resolvent_identity_residual(s_z, f_z) -> float:
    """|| (F(z) + I)^{-1} - (I - S(z)) / 2 ||."""
    eye = np.eye(s_z.shape[0])
    return operator_norm(np.linalg.inv(f_z + eye) - 0.5 * (eye - s_z))


def renormalization_defect_residual(s_z, s_w, s0, st_z, st_w) -> float:
    """Residual of the defect factorization through the recentred function.

    ``st`` denotes the recentred sample ``L_{S0}[S]``; the identity writes
    ``I - S(z)S(w)*`` as the ``st`` defect conjugated by defect operators of
    ``S0`` and the rational factors ``(I + st S0*)^{-1}``.
    """
    eye = np.eye(s_z.shape[0])
    ds0s = defect_star(s0)
    lhs = eye - s_z @ s_w.conj().T
    rhs = ds0s @ np.linalg.inv(eye + st_z @ s0.conj().T) \
        @ (eye - st_z @ st_w.conj().T) \
        @ np.linalg.inv(eye + s0 @ st_w.conj().T) @ ds0s
    return operator_norm(lhs - rhs)
