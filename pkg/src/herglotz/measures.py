"""The constrained ball of finitely supported positive matrix measures.

A measure is a finite list of atoms ``(x_j, W_j)`` with hermitian PSD
``N x N`` weights and per-atom constraint vectors ``phi(x_j)`` in R^m.
Membership in the ball requires ``sum W_j = I`` and
``sum phi_i(x_j) W_j = 0`` for each constraint.  A member is extreme
exactly when the family ``Ran W_j`` with coefficients ``phi(x_j)`` admits
no nonzero perturbation tuple (:func:`herglotz.geometry.admissible_perturbation_space`);
otherwise any basis element of that space certifies a proper convex split.

Atoms are identified by ``point_id``: two atoms with equal phi values but
distinct ids are distinct support points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import PSD_RTOL, RANK_RTOL, ZERO_WEIGHT_NORM, tolerance
from .errors import DepthExceededError, PreconditionError, SchemaError
from .geometry import (
    PerturbationTuple,
    Subspace,
    admissible_perturbation_space,
    zero_interior_convex_hull,
)

__all__ = [
    "Atom",
    "ChoquetDecomposition",
    "DiscreteMatrixMeasure",
    "ExtremalityReport",
    "MembershipReport",
    "boundary_component_mass",
    "build_special",
    "build_spectral",
    "choquet_decompose",
    "is_extreme",
    "split_along",
    "validate_membership",
]


def _hermitize(w) -> np.ndarray:
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    if w.shape[0] != w.shape[1]:
        raise SchemaError("weight matrices must be square")
    if not np.all(np.isfinite(w)):
        raise SchemaError("weight matrices must be finite")
    return (w + w.conj().T) / 2.0


@dataclass(frozen=True)
class Atom:
    """One support point: opaque id, constraint vector, hermitian PSD weight.

    Weights are symmetrized on ingestion; the optional ``tag`` records a
    boundary-component index for function-theory measures.
    """

    point_id: str
    phi: np.ndarray
    weight: np.ndarray
    tag: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "phi", np.atleast_1d(np.asarray(self.phi, dtype=float)))
        object.__setattr__(self, "weight", _hermitize(self.weight))
        if not np.all(np.isfinite(self.phi)):
            raise SchemaError("phi values must be finite")

    @property
    def size(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True)
class DiscreteMatrixMeasure:
    """Finitely supported hermitian matrix measure with constraint data."""

    N: int
    m: int
    atoms: tuple

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        seen = set()
        for atom in self.atoms:
            if atom.size != self.N:
                raise SchemaError("atom weight size does not match N")
            if atom.phi.shape[0] != self.m:
                raise SchemaError("atom phi length does not match m")
            if atom.point_id in seen:
                raise SchemaError(f"duplicate point_id {atom.point_id!r}")
            seen.add(atom.point_id)

    def total_weight(self) -> np.ndarray:
        out = np.zeros((self.N, self.N), dtype=complex)
        for atom in self.atoms:
            out += atom.weight
        return out

    def phi_moments(self) -> np.ndarray:
        """The m matrices ``sum_j phi_i(x_j) W_j``."""
        out = np.zeros((self.m, self.N, self.N), dtype=complex)
        for atom in self.atoms:
            for i in range(self.m):
                out[i] += atom.phi[i] * atom.weight
        return out

    def pruned(self, threshold: float = ZERO_WEIGHT_NORM) -> "DiscreteMatrixMeasure":
        """Drop atoms with negligible weight (order preserved)."""
        kept = tuple(a for a in self.atoms
                     if np.linalg.norm(a.weight, 2) > threshold)
        return DiscreteMatrixMeasure(self.N, self.m, kept)

    def with_weights(self, weights) -> "DiscreteMatrixMeasure":
        atoms = tuple(Atom(a.point_id, a.phi, w, a.tag)
                      for a, w in zip(self.atoms, weights))
        return DiscreteMatrixMeasure(self.N, self.m, atoms)


@dataclass(frozen=True)
class MembershipReport:
    is_member: bool
    mass_residual: float
    constraint_residuals: tuple
    min_weight_eigenvalues: tuple
    mass_ok: bool
    constraints_ok: bool
    psd_ok: bool

    def to_obj(self) -> dict:
        return {
            "is_member": self.is_member,
            "mass_ok": self.mass_ok,
            "constraints_ok": self.constraints_ok,
            "psd_ok": self.psd_ok,
            "mass_residual": self.mass_residual,
            "constraint_residuals": list(self.constraint_residuals),
            "min_weight_eigenvalues": list(self.min_weight_eigenvalues),
        }


@dataclass(frozen=True)
class ExtremalityReport:
    is_extreme: bool
    witness: PerturbationTuple | None
    support_count: int
    bound_ok: bool
    perturbation_dim: int
    support_ids: tuple

    def to_obj(self) -> dict:
        obj = {
            "is_extreme": self.is_extreme,
            "support_count": self.support_count,
            "bound_ok": self.bound_ok,
            "perturbation_dim": self.perturbation_dim,
            "support_ids": list(self.support_ids),
        }
        if self.witness is not None:
            obj["witness"] = [
                {"re": b.real.tolist(), "im": b.imag.tolist()}
                for b in self.witness.blocks
            ]
        else:
            obj["witness"] = None
        return obj


@dataclass(frozen=True)
class ChoquetDecomposition:
    """Convex combination of extreme members reproducing the input."""

    terms: tuple
    depth: int

    def coefficients(self):
        return [c for c, _ in self.terms]

    def to_obj(self) -> dict:
        from .serialize import measure_to_obj
        return {
            "depth": self.depth,
            "terms": [
                {"coefficient": c, "measure": measure_to_obj(mu)}
                for c, mu in self.terms
            ],
        }


def validate_membership(mu: DiscreteMatrixMeasure, tol: float | None = None) -> MembershipReport:
    """Residual report for the three membership conditions.

    Constraint residuals are measured relative to the size of the summands,
    so wildly scaled constraint values (the annulus period functional spans
    several orders of magnitude) do not produce spurious failures.
    """
    tol = tolerance(tol)
    mass = mu.total_weight()
    mass_residual = float(np.linalg.norm(mass - np.eye(mu.N), 2))
    mass_ok = mass_residual <= tol

    moments = mu.phi_moments()
    constraint_residuals = []
    constraints_ok = True
    for i in range(mu.m):
        scale = max(1.0, sum(abs(a.phi[i]) * np.linalg.norm(a.weight, 2)
                             for a in mu.atoms))
        resid = float(np.linalg.norm(moments[i], 2))
        constraint_residuals.append(resid)
        if resid > tol * scale:
            constraints_ok = False

    min_eigs = []
    psd_ok = True
    for atom in mu.atoms:
        vals = np.linalg.eigvalsh(atom.weight)
        lo = float(vals.min()) if vals.size else 0.0
        min_eigs.append(lo)
        floor = PSD_RTOL * max(1.0, float(np.linalg.norm(atom.weight, 2)))
        if lo < -max(floor, tol):
            psd_ok = False

    return MembershipReport(
        is_member=mass_ok and constraints_ok and psd_ok,
        mass_residual=mass_residual,
        constraint_residuals=tuple(constraint_residuals),
        min_weight_eigenvalues=tuple(min_eigs),
        mass_ok=mass_ok,
        constraints_ok=constraints_ok,
        psd_ok=psd_ok,
    )


def _require_member(mu: DiscreteMatrixMeasure, tol: float | None) -> None:
    report = validate_membership(mu, tol)
    if not report.is_member:
        raise PreconditionError(
            "measure is not a member of the constrained ball: "
            f"mass residual {report.mass_residual:.3e}, "
            f"constraint residuals {[f'{r:.3e}' for r in report.constraint_residuals]}, "
            f"min eigenvalues {[f'{v:.3e}' for v in report.min_weight_eigenvalues]}")


def is_extreme(mu: DiscreteMatrixMeasure, tol: float | None = None,
               rtol: float = RANK_RTOL) -> ExtremalityReport:
    """Extremality decision with a perturbation witness when reducible.

    Zero-weight atoms are dropped first; the verdict is the emptiness of the
    admissible perturbation space over the weight ranges with the atom
    constraint vectors.
    """
    _require_member(mu, tol)
    pruned = mu.pruned()
    if not pruned.atoms:
        raise PreconditionError("measure has no atoms after pruning")
    subspaces = [Subspace.from_matrix_range(a.weight, rtol) for a in pruned.atoms]
    phis = [a.phi for a in pruned.atoms]
    basis = admissible_perturbation_space(subspaces, phis, rtol=rtol)
    n = len(pruned.atoms)
    return ExtremalityReport(
        is_extreme=not basis,
        witness=basis[0] if basis else None,
        support_count=n,
        bound_ok=n <= (mu.m + 1) * mu.N ** 2,
        perturbation_dim=len(basis),
        support_ids=tuple(a.point_id for a in pruned.atoms),
    )


def _restricted_spectrum(w: np.ndarray, t: np.ndarray, rtol: float) -> np.ndarray:
    """Eigenvalues of T compressed and whitened by W on the range of W."""
    vals, vecs = np.linalg.eigh(w)
    keep = vals > rtol * max(vals.max(initial=0.0), ZERO_WEIGHT_NORM)
    u = vecs[:, keep]
    wr = u.conj().T @ w @ u
    tr = u.conj().T @ t @ u
    evals, evecs = np.linalg.eigh(wr)
    isqrt = evecs @ np.diag(1.0 / np.sqrt(evals)) @ evecs.conj().T
    return np.linalg.eigvalsh(isqrt @ tr @ isqrt)


def split_along(mu: DiscreteMatrixMeasure, t: PerturbationTuple,
                tol: float | None = None, rtol: float = RANK_RTOL):
    """Maximal symmetric split of a member along an admissible perturbation.

    Returns ``(mu_plus, mu_minus, lam)`` with
    ``mu = lam * mu_plus + (1 - lam) * mu_minus`` and both endpoints on the
    boundary of the positivity cone: each loses weight rank or an atom.
    """
    tol = tolerance(tol)
    _require_member(mu, tol)
    pruned = mu.pruned()
    if len(t.blocks) != len(pruned.atoms):
        raise PreconditionError("perturbation blocks do not match measure support")
    if t.norm <= tol:
        raise PreconditionError("perturbation must be nonzero")

    # Sandwich each block onto the weight range so near-miss tails cannot
    # push the endpoints off the positivity boundary.
    blocks = []
    for atom, block in zip(pruned.atoms, t.blocks):
        sub = Subspace.from_matrix_range(atom.weight, rtol)
        p = sub.projector
        b = (block + block.conj().T) / 2.0
        sandwiched = p @ b @ p
        if np.linalg.norm(sandwiched - b, 2) > 1e-6 * max(1.0, np.linalg.norm(b, 2)):
            raise PreconditionError("perturbation block does not live on the weight range")
        blocks.append(sandwiched)

    total = sum(np.linalg.norm(b, 2) for b in blocks)
    if np.linalg.norm(sum(blocks), 2) > 1e-8 * max(1.0, total):
        raise PreconditionError("perturbation blocks do not sum to zero")
    for i in range(pruned.m):
        s = sum(a.phi[i] * b for a, b in zip(pruned.atoms, blocks))
        scale = max(1.0, sum(abs(a.phi[i]) * np.linalg.norm(b, 2)
                             for a, b in zip(pruned.atoms, blocks)))
        if np.linalg.norm(s, 2) > 1e-8 * scale:
            raise PreconditionError("perturbation violates a linear constraint")

    eps_plus = np.inf
    eps_minus = np.inf
    for atom, block in zip(pruned.atoms, blocks):
        lam = _restricted_spectrum(atom.weight, block, rtol)
        lo, hi = float(lam.min()), float(lam.max())
        if lo < 0:
            eps_plus = min(eps_plus, -1.0 / lo)
        if hi > 0:
            eps_minus = min(eps_minus, 1.0 / hi)
    if not np.isfinite(eps_plus) or not np.isfinite(eps_minus):
        raise RuntimeError("internal error: unbounded admissible perturbation")

    plus = pruned.with_weights([a.weight + eps_plus * b
                                for a, b in zip(pruned.atoms, blocks)]).pruned()
    minus = pruned.with_weights([a.weight - eps_minus * b
                                 for a, b in zip(pruned.atoms, blocks)]).pruned()
    lam = eps_minus / (eps_plus + eps_minus)
    return plus, minus, lam


# ---------------------------------------------------------------------------
# decomposition into extreme points
# ---------------------------------------------------------------------------

def _rank_potential(mu: DiscreteMatrixMeasure, rtol: float) -> int:
    total = 0
    for atom in mu.atoms:
        vals = np.linalg.eigvalsh(atom.weight)
        total += int(np.count_nonzero(vals > rtol * max(vals.max(initial=0.0), 1e-300)))
    return total


def _measure_key(mu: DiscreteMatrixMeasure):
    parts = []
    for atom in sorted(mu.atoms, key=lambda a: a.point_id):
        parts.append((atom.point_id, np.round(atom.weight, 10).tobytes()))
    return tuple(parts)


def _decompose_scalar_one_constraint(mu: DiscreteMatrixMeasure):
    """Peeling decomposition for scalar measures with one constraint.

    Repeatedly subtracts the largest multiple of a two-point extreme
    supported on the heaviest positive-phi / negative-phi pair; every step
    annihilates at least one atom, so the expansion is linear in the number
    of atoms.  (The recursive splitter would branch two ways per step, which
    is unusable for quadrature-grid measures with hundreds of atoms.)
    """
    atoms = list(mu.pruned().atoms)
    weights = {a.point_id: float(a.weight[0, 0].real) for a in atoms}
    by_id = {a.point_id: a for a in atoms}
    phi_scale = max(abs(a.phi[0]) for a in atoms)
    zero_tol = 1e-12 * max(1.0, phi_scale)

    terms = []
    positive, negative = [], []
    for a in atoms:
        if abs(a.phi[0]) <= zero_tol:
            # A lone point with vanishing constraint value is itself extreme.
            terms.append((weights.pop(a.point_id),
                          DiscreteMatrixMeasure(1, 1, (Atom(a.point_id, a.phi, [[1.0]], a.tag),))))
        elif a.phi[0] > 0:
            positive.append(a.point_id)
        else:
            negative.append(a.point_id)

    steps = 0
    while positive and negative:
        steps += 1
        i = max(positive, key=lambda k: weights[k])
        j = max(negative, key=lambda k: weights[k])
        phi_i = by_id[i].phi[0]
        phi_j = by_id[j].phi[0]
        alpha_i = phi_j / (phi_j - phi_i)
        alpha_j = 1.0 - alpha_i
        lam = min(weights[i] / alpha_i, weights[j] / alpha_j)
        pair = DiscreteMatrixMeasure(1, 1, (
            Atom(i, by_id[i].phi, [[alpha_i]], by_id[i].tag),
            Atom(j, by_id[j].phi, [[alpha_j]], by_id[j].tag),
        ))
        terms.append((lam, pair))
        weights[i] -= lam * alpha_i
        weights[j] -= lam * alpha_j
        for key, bucket in ((i, positive), (j, negative)):
            if weights[key] <= 1e-13:
                bucket.remove(key)
                weights.pop(key)

    leftover = sum(weights.values())
    if leftover > 1e-7:
        raise RuntimeError(
            f"internal error: peeling left unbalanced mass {leftover:.3e}")
    return terms, steps


def choquet_decompose(mu: DiscreteMatrixMeasure, max_depth: int | None = None,
                      tol: float | None = None,
                      rtol: float = RANK_RTOL) -> ChoquetDecomposition:
    """Decompose a member into a convex combination of extreme members.

    The split direction is always the first orthonormal basis element of the
    admissible perturbation space, which makes the decomposition
    deterministic; it is not canonical (the representing combination is not
    unique in general).  ``max_depth`` guards against tolerance-induced
    non-termination and raises :class:`DepthExceededError`.
    """
    tol = tolerance(tol)
    _require_member(mu, tol)
    pruned = mu.pruned()
    if max_depth is None:
        max_depth = _rank_potential(pruned, rtol) * (pruned.m + 1) + len(pruned.atoms) + 8

    if pruned.N == 1 and pruned.m == 0:
        # Unconstrained scalar ball: extreme points are unit point masses.
        terms = [(float(a.weight[0, 0].real),
                  DiscreteMatrixMeasure(1, 0, (Atom(a.point_id, a.phi, [[1.0]], a.tag),)))
                 for a in pruned.atoms]
        return ChoquetDecomposition(tuple(terms), depth=1)

    if pruned.N == 1 and pruned.m == 1 and len(pruned.atoms) > 2:
        terms, steps = _decompose_scalar_one_constraint(pruned)
        if steps > max_depth:
            raise DepthExceededError(f"peeling needed {steps} steps (> {max_depth})")
        return ChoquetDecomposition(tuple(terms), depth=steps)

    collected: dict = {}

    def add(coeff: float, leaf: DiscreteMatrixMeasure) -> None:
        key = _measure_key(leaf)
        if key in collected:
            old_coeff, old_leaf = collected[key]
            collected[key] = (old_coeff + coeff, old_leaf)
        else:
            collected[key] = (coeff, leaf)

    max_seen = 0

    def recurse(measure: DiscreteMatrixMeasure, coeff: float, depth: int) -> None:
        nonlocal max_seen
        max_seen = max(max_seen, depth)
        if depth > max_depth:
            raise DepthExceededError(
                f"decomposition exceeded max depth {max_depth}")
        report = is_extreme(measure, tol=tol, rtol=rtol)
        if report.is_extreme:
            add(coeff, measure)
            return
        plus, minus, lam = split_along(measure, report.witness, tol=tol, rtol=rtol)
        recurse(plus, coeff * lam, depth + 1)
        recurse(minus, coeff * (1.0 - lam), depth + 1)

    recurse(pruned, 1.0, 1)
    return ChoquetDecomposition(tuple(collected.values()), depth=max_seen)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def _require_scalar_extreme(mu: DiscreteMatrixMeasure, tol: float | None) -> None:
    if mu.N != 1:
        raise PreconditionError("component measures must be scalar (N = 1)")
    report = is_extreme(mu, tol=tol)
    if not report.is_extreme:
        raise PreconditionError("component scalar measure is not extreme")


def build_special(scalar_extremes, weights, tol: float | None = None) -> DiscreteMatrixMeasure:
    """Assemble ``sum_k mu_k L_k`` from extreme scalar members and PSD weights.

    The ``L_k`` must be PSD and sum to the identity.  Atoms are merged by
    ``point_id``; a shared id must carry identical constraint values (it is
    the same support point).
    """
    tol = tolerance(tol)
    if len(scalar_extremes) != len(weights):
        raise SchemaError("need one weight matrix per scalar measure")
    if not scalar_extremes:
        raise SchemaError("need at least one component")
    weights = [_hermitize(w) for w in weights]
    n = weights[0].shape[0]
    total = np.zeros((n, n), dtype=complex)
    for w in weights:
        if w.shape != (n, n):
            raise SchemaError("weight matrices must share a common size")
        if np.linalg.eigvalsh(w).min() < -PSD_RTOL * max(1.0, np.linalg.norm(w, 2)):
            raise PreconditionError("weight matrices must be PSD")
        total += w
    if np.linalg.norm(total - np.eye(n), 2) > tol:
        raise PreconditionError("weight matrices must sum to the identity")

    m = scalar_extremes[0].m
    merged: dict = {}
    order: list = []
    for mu_k, l_k in zip(scalar_extremes, weights):
        _require_scalar_extreme(mu_k, tol)
        if mu_k.m != m:
            raise SchemaError("component measures must share the constraint count")
        for atom in mu_k.pruned().atoms:
            w = float(atom.weight[0, 0].real)
            if atom.point_id in merged:
                prev = merged[atom.point_id]
                if np.linalg.norm(prev.phi - atom.phi) > tol * max(1.0, np.abs(atom.phi).max(initial=0.0)):
                    raise PreconditionError(
                        f"point_id {atom.point_id!r} reused with different phi values")
                merged[atom.point_id] = Atom(atom.point_id, prev.phi,
                                             prev.weight + w * l_k, prev.tag)
            else:
                merged[atom.point_id] = Atom(atom.point_id, atom.phi, w * l_k, atom.tag)
                order.append(atom.point_id)
    return DiscreteMatrixMeasure(n, m, tuple(merged[k] for k in order))


def build_spectral(projections, scalar_extremes, tol: float | None = None) -> DiscreteMatrixMeasure:
    """Assemble ``sum_k mu_k P_k`` over a rank-1 orthogonal resolution of I.

    The scalar components may repeat and their supports may overlap; the
    output is always extreme.
    """
    tol = tolerance(tol)
    if not projections:
        raise SchemaError("need at least one projection")
    projections = [_hermitize(p) for p in projections]
    n = projections[0].shape[0]
    if len(projections) != n or len(scalar_extremes) != n:
        raise SchemaError("need N rank-1 projections and N scalar measures")
    total = np.zeros((n, n), dtype=complex)
    for k, p in enumerate(projections):
        if p.shape != (n, n):
            raise SchemaError("projections must share a common size")
        if np.linalg.norm(p @ p - p, 2) > tol or abs(p.trace().real - 1.0) > tol:
            raise PreconditionError("projections must be rank-1 orthogonal projections")
        for l in range(k):
            if np.linalg.norm(projections[l] @ p, 2) > tol:
                raise PreconditionError("projections must be pairwise orthogonal")
        total += p
    if np.linalg.norm(total - np.eye(n), 2) > tol:
        raise PreconditionError("projections must sum to the identity")

    m = scalar_extremes[0].m
    merged: dict = {}
    order: list = []
    for mu_k, p_k in zip(scalar_extremes, projections):
        _require_scalar_extreme(mu_k, tol)
        if mu_k.m != m:
            raise SchemaError("component measures must share the constraint count")
        for atom in mu_k.pruned().atoms:
            w = float(atom.weight[0, 0].real)
            if atom.point_id in merged:
                prev = merged[atom.point_id]
                if np.linalg.norm(prev.phi - atom.phi) > tol * max(1.0, np.abs(atom.phi).max(initial=0.0)):
                    raise PreconditionError(
                        f"point_id {atom.point_id!r} reused with different phi values")
                merged[atom.point_id] = Atom(atom.point_id, prev.phi,
                                             prev.weight + w * p_k, prev.tag)
            else:
                merged[atom.point_id] = Atom(atom.point_id, atom.phi, w * p_k, atom.tag)
                order.append(atom.point_id)
    return DiscreteMatrixMeasure(n, m, tuple(merged[k] for k in order))


def boundary_component_mass(mu: DiscreteMatrixMeasure, tol: float | None = None):
    """Per-component weight sums with invertibility verdicts.

    Extremal measures arising from boundary function theory must place
    invertible total mass on every boundary component; a singular component
    mass flags a violation of that necessary condition.
    """
    tol = tolerance(tol)
    groups: dict = {}
    order: list = []
    for atom in mu.atoms:
        if atom.tag is None:
            raise PreconditionError(f"atom {atom.point_id!r} is missing a component tag")
        if atom.tag not in groups:
            groups[atom.tag] = np.zeros((mu.N, mu.N), dtype=complex)
            order.append(atom.tag)
        groups[atom.tag] += atom.weight
    out = []
    for tag in sorted(order):
        mass = groups[tag]
        smin = float(np.linalg.svd(mass, compute_uv=False).min()) if mu.N else 0.0
        out.append((tag, mass, smin > tol))
    return out


def scalar_extremality_matches_hull_test(mu: DiscreteMatrixMeasure,
                                         tol: float | None = None) -> bool:
    """Cross-check for scalar members: the hull criterion decides extremality."""
    if mu.N != 1:
        raise SchemaError("only defined for scalar measures")
    pruned = mu.pruned()
    vectors = [a.phi for a in pruned.atoms]
    weights = [float(a.weight[0, 0].real) for a in pruned.atoms]
    if pruned.m == 0:
        direct = len(pruned.atoms) == 1
    else:
        direct = zero_interior_convex_hull(vectors, weights, tol=tolerance(tol))
    return direct == is_extreme(mu, tol=tol).is_extreme
