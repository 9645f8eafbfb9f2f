"""Random instance generators for experiments and stress tests.

Members of the constrained ball are produced constructively: random convex
mixtures of constructor outputs (spectral resolutions and weighted sums of
scalar extremes) over a shared support pool, so membership holds by
construction and extremality is genuinely undecided until tested.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError
from .geometry import solve_convex_weights
from .measures import Atom, DiscreteMatrixMeasure, build_special, build_spectral

__all__ = [
    "random_member",
    "random_phi_pool",
    "random_psd",
    "random_rank1_resolution",
    "random_scalar_extreme",
    "random_strict_contraction",
    "random_unitary",
    "random_weakly_independent_weights",
]


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    return g @ g.conj().T / rank


def random_strict_contraction(rng: np.random.Generator, n: int,
                              max_norm: float = 0.9) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    top = np.linalg.norm(a, 2)
    return a * (rng.uniform(0.1, max_norm) / top)


def random_phi_pool(rng: np.random.Generator, m: int, cells: int) -> list:
    """Support pool grouped into cells, each admitting a scalar extreme.

    Every cell holds m+1 points whose constraint vectors carry a strictly
    positive convex representation of 0 (the last point is solved for), so
    scalar extremes over the pool always exist.
    """
    pool = []
    for c in range(cells):
        if m == 0:
            pool.append([(f"p{c}:0", np.zeros(0))])
            continue
        lam = rng.uniform(0.2, 1.0, size=m + 1)
        lam /= lam.sum()
        phis = [rng.uniform(-2.0, 2.0, size=m) for _ in range(m)]
        last = -sum(l * p for l, p in zip(lam[:m], phis)) / lam[m]
        phis.append(last)
        pool.append([(f"p{c}:{j}", phis[j]) for j in range(m + 1)])
    return pool


def random_scalar_extreme(rng: np.random.Generator, m: int, pool: list) -> DiscreteMatrixMeasure:
    """A scalar extreme member supported on one random pool cell."""
    cell = pool[rng.integers(len(pool))]
    if m == 0:
        pid, phi = cell[0]
        return DiscreteMatrixMeasure(1, 0, (Atom(pid, phi, [[1.0]]),))
    weights = solve_convex_weights([phi for _, phi in cell])
    if weights is None:
        raise PreconditionError("pool cell lost its positive representation")
    atoms = tuple(Atom(pid, phi, [[w]]) for (pid, phi), w in zip(cell, weights))
    return DiscreteMatrixMeasure(1, m, atoms)


def random_rank1_resolution(rng: np.random.Generator, n: int) -> list:
    u = random_unitary(rng, n)
    return [np.outer(u[:, k], u[:, k].conj()) for k in range(n)]


def random_weakly_independent_weights(rng: np.random.Generator, n: int,
                                      tries: int = 200) -> list:
    """PSD matrices summing to I whose ranges are weakly independent.

    Alternates two constructions: blocks of an orthogonal resolution
    (projections), and rank-1 families ``c_k v_k v_k*`` with the positive
    coefficients solved from ``sum c_k v_k v_k* = I``.
    """
    if rng.uniform() < 0.5 or n == 1:
        u = random_unitary(rng, n)
        cuts = sorted(rng.choice(np.arange(1, n), size=min(n - 1, rng.integers(0, n)),
                                 replace=False)) if n > 1 else []
        bounds = [0, *cuts, n]
        return [u[:, a:b] @ u[:, a:b].conj().T for a, b in zip(bounds, bounds[1:])]
    for _ in range(tries):
        count = int(rng.integers(n + 1, n * n + 1))
        vecs = rng.standard_normal((n, count)) + 1j * rng.standard_normal((n, count))
        vecs /= np.linalg.norm(vecs, axis=0)
        gram = np.stack([np.outer(v, v.conj()).ravel() for v in vecs.T], axis=1)
        if np.linalg.matrix_rank(gram) < count:
            continue
        target = np.eye(n).ravel()
        coeffs, *_ = np.linalg.lstsq(gram, target, rcond=None)
        if np.linalg.norm(gram @ coeffs - target) > 1e-10 or np.any(coeffs.real < 1e-3):
            continue
        return [c.real * np.outer(v, v.conj()) for c, v in zip(coeffs, vecs.T)]
    u = random_unitary(rng, n)
    return [np.outer(u[:, k], u[:, k].conj()) for k in range(n)]


def random_member(rng: np.random.Generator, n_dim: int, m: int,
                  cells: int = 3, mix: int | None = None) -> DiscreteMatrixMeasure:
    """Random member: convex mixture of constructor outputs on a shared pool."""
    pool = random_phi_pool(rng, m, cells)
    components = []
    count = mix if mix is not None else int(rng.integers(1, 4))
    for _ in range(count):
        if rng.uniform() < 0.5:
            projections = random_rank1_resolution(rng, n_dim)
            scalars = [random_scalar_extreme(rng, m, pool) for _ in range(n_dim)]
            components.append(build_spectral(projections, scalars))
        else:
            weights = random_weakly_independent_weights(rng, n_dim)
            scalars = [random_scalar_extreme(rng, m, pool) for _ in weights]
            components.append(build_special(scalars, weights))
    lam = rng.uniform(0.2, 1.0, size=len(components))
    lam /= lam.sum()
    merged: dict = {}
    order: list = []
    for coeff, comp in zip(lam, components):
        for atom in comp.atoms:
            if atom.point_id in merged:
                prev = merged[atom.point_id]
                merged[atom.point_id] = Atom(atom.point_id, prev.phi,
                                             prev.weight + coeff * atom.weight, prev.tag)
            else:
                merged[atom.point_id] = Atom(atom.point_id, atom.phi,
                                             coeff * atom.weight, atom.tag)
                order.append(atom.point_id)
    return DiscreteMatrixMeasure(n_dim, m, tuple(merged[k] for k in order)).pruned()
