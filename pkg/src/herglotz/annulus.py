"""Harmonic function theory on the annulus ``q < |z| < 1``.

Real harmonic functions on the annulus truncate to

    h(z) = a0 + b0 log|z| + Re sum_{0 < |n| <= M} c_n z^n,

and the Dirichlet problem decouples per Fourier mode: mode 0 pins
``(a0, b0)`` through the two circle means, and mode ``n != 0`` solves a
2 x 2 system coupling ``z^n`` on both circles.  The harmonic conjugate of
``h`` gains ``2 pi b0`` per loop around the hole, so ``b0 = 0`` is exactly
the existence of a single-valued analytic completion.

A boundary point mass enters through its Fourier modes ``e^{-i n theta}``
(no mollification); its harmonic extension is the kernel ``K(z, zeta)``,
the density of harmonic measure at ``z`` against normalized angle measure.
The Poisson kernel normalized to 1 at the base point is
``P_z(zeta) = K(z, zeta) / K(t0, zeta)``, and the constraint functional

    phi_1(zeta) = conjugate period of z -> P_z(zeta)
                = -(2 pi / log q) / K(t0, zeta)   on the outer circle,
                = +(2 pi / log q) / K(t0, zeta)   on the inner circle,

rescaled so phi_1 = +1 at angle 0 on the outer circle.  phi_1 has a fixed
sign on each circle, opposite between circles, and ``int phi_1 domega = 0``
holds exactly on the quadrature grid.  It is *not* constant in angle: the
harmonic-measure density ``K(t0, .)`` of an off-center base point varies
along each circle (by several orders of magnitude for moderate ``q``), and
only the measure ``phi_1 domega``, not the function ``phi_1``, is
rotation-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, SchemaError
from .measures import Atom, DiscreteMatrixMeasure, choquet_decompose, validate_membership
from .schur import cayley, cayley_inverse

__all__ = [
    "Annulus",
    "BoundaryPoint",
    "INNER",
    "LaurentHarmonic",
    "HolomorphicLaurent",
    "OUTER",
    "conjugate_period",
]

OUTER = 0
INNER = 1


@dataclass(frozen=True)
class BoundaryPoint:
    """A point on the boundary: component index (OUTER/INNER) and angle."""

    component: int
    angle: float

    def __post_init__(self):
        if self.component not in (OUTER, INNER):
            raise SchemaError("component must be OUTER (0) or INNER (1)")
        object.__setattr__(self, "angle", float(self.angle) % (2.0 * np.pi))


@dataclass(frozen=True)
class LaurentHarmonic:
    """Truncated real harmonic function: constant, log term and Laurent modes.

    ``modes[M + n]`` holds ``c_n``; the center slot (n = 0) is unused and
    kept at zero.  The conjugate period around the hole is ``2 pi b0``.
    """

    a0: float
    b0: float
    modes: np.ndarray

    @property
    def order(self) -> int:
        return (self.modes.shape[0] - 1) // 2

    def _powers(self, z: np.ndarray) -> np.ndarray:
        m = self.order
        n = np.arange(-m, m + 1)
        return np.asarray(z, dtype=complex)[..., None] ** n

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0):
            raise PreconditionError("harmonic representation is singular at 0")
        val = self.a0 + self.b0 * np.log(np.abs(z)) + np.real(self._powers(z) @ self.modes)
        return val if val.ndim else float(val)

    def conjugate_period(self) -> float:
        return 2.0 * np.pi * self.b0

    def scaled(self, factor: float) -> "LaurentHarmonic":
        return LaurentHarmonic(factor * self.a0, factor * self.b0, factor * self.modes)

    def plus(self, other: "LaurentHarmonic") -> "LaurentHarmonic":
        if self.order != other.order:
            raise SchemaError("truncation orders differ")
        return LaurentHarmonic(self.a0 + other.a0, self.b0 + other.b0,
                               self.modes + other.modes)

    def analytic(self, t0: complex, period_tol: float = 1e-9) -> "HolomorphicLaurent":
        """Analytic completion ``h + i h~`` with ``Im`` vanishing at ``t0``.

        Requires a vanishing conjugate period; the log term has no
        single-valued conjugate.
        """
        if abs(self.b0) > period_tol * max(1.0, abs(self.a0)):
            raise PreconditionError(
                f"conjugate period 2*pi*{self.b0:.3e} is nonzero; no single-valued completion")
        coeffs = self.modes.copy()
        m = self.order
        n = np.arange(-m, m + 1)
        im_t0 = float(np.imag((np.asarray(t0, dtype=complex) ** n) @ coeffs))
        coeffs[m] = self.a0 - 1j * im_t0
        return HolomorphicLaurent(coeffs)


@dataclass(frozen=True)
class HolomorphicLaurent:
    """Holomorphic function given by a finite Laurent expansion."""

    coeffs: np.ndarray

    @property
    def order(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    def __call__(self, z):
        m = self.order
        n = np.arange(-m, m + 1)
        z = np.asarray(z, dtype=complex)
        val = z[..., None] ** n @ self.coeffs
        return val if val.ndim else complex(val)


def conjugate_period(h: LaurentHarmonic) -> float:
    """Increase of the harmonic conjugate per loop around the hole."""
    return h.conjugate_period()


class Annulus:
    """The annulus ``q < |z| < 1`` with a base point and quadrature grids.

    ``modes`` is the Laurent truncation order; ``grid`` the number of
    equispaced nodes per boundary circle.  ``grid > 2 * modes`` makes the
    trapezoid sums of band-limited integrands exact, which the membership
    identities of quadrature measures rely on.
    """

    def __init__(self, q: float, t0: complex, modes: int = 64, grid: int = 256):
        q = float(q)
        t0 = complex(t0)
        if not 0.0 < q < 1.0:
            raise SchemaError("need 0 < q < 1")
        if not q < abs(t0) < 1.0:
            raise SchemaError("base point must lie strictly inside the annulus")
        if modes < 8:
            raise SchemaError("need truncation order >= 8")
        if grid < 2 * modes + 2:
            raise SchemaError("need more than two grid nodes per mode")
        self.q = q
        self.t0 = t0
        self.modes = int(modes)
        self.grid = int(grid)
        self.node_angles = 2.0 * np.pi * np.arange(self.grid) / self.grid
        self._log_q = np.log(q)
        self._build_node_kernels()

    # -- solver ------------------------------------------------------------

    def _coeff_array(self, coeffs) -> np.ndarray:
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if c.ndim != 1 or c.shape[0] % 2 == 0 or c.shape[0] > 2 * self.modes + 1:
            raise SchemaError("coefficients must be a centered odd-length list"
                              f" of at most {2 * self.modes + 1} modes")
        padded = np.zeros(2 * self.modes + 1, dtype=complex)
        k = c.shape[0] // 2
        padded[self.modes - k: self.modes + k + 1] = c
        tail = padded[::-1].conj()
        if np.linalg.norm(padded - tail) > 1e-9 * max(1.0, np.linalg.norm(padded)):
            raise SchemaError("coefficients must be hermitian-symmetric (real data)")
        return padded

    def constant_coefficients(self, value: float) -> np.ndarray:
        return np.array([complex(value)])

    def delta_coefficients(self, angle: float) -> np.ndarray:
        """Modes of a unit point mass at ``angle`` against normalized angle measure."""
        n = np.arange(-self.modes, self.modes + 1)
        return np.exp(-1j * n * angle)

    def dirichlet_solve(self, outer_coeffs, inner_coeffs) -> LaurentHarmonic:
        """Harmonic function matching the two boundary Fourier expansions.

        Mode 0 determines ``(a0, b0)``; each mode ``n >= 1`` solves the
        2 x 2 coupling of ``z^n`` and ``conj(z)^{-n}`` between the circles,
        written without negative powers of ``q`` so large orders stay stable.
        """
        p = self._coeff_array(outer_coeffs)
        r = self._coeff_array(inner_coeffs)
        m = self.modes
        a0 = float(p[m].real)
        b0 = float((r[m].real - p[m].real) / self._log_q)
        n = np.arange(1, m + 1)
        qn = self.q ** n
        den = 1.0 - self.q ** (2 * n)
        if np.any(den == 0.0):
            raise RuntimeError("internal error: singular mode system")
        c_pos = 2.0 * (p[m + n] - r[m + n] * qn) / den
        c_neg = np.conj(2.0 * (r[m + n] - p[m + n] * qn) * qn / den)
        modes = np.zeros(2 * m + 1, dtype=complex)
        modes[m + n] = c_pos
        modes[m - n] = c_neg
        return LaurentHarmonic(a0, b0, modes)

    def kernel(self, point: BoundaryPoint) -> LaurentHarmonic:
        """Harmonic extension of the unit point mass at a boundary point."""
        delta = self.delta_coefficients(point.angle)
        zero = self.constant_coefficients(0.0)
        if point.component == OUTER:
            return self.dirichlet_solve(delta, zero)
        return self.dirichlet_solve(zero, delta)

    # -- grid machinery ----------------------------------------------------

    def _build_node_kernels(self):
        m, q = self.modes, self.q
        n = np.arange(1, m + 1)
        qn = q ** n
        den = 1.0 - q ** (2 * n)
        e = np.exp(-1j * np.outer(self.node_angles, n))  # (grid, m)
        out = np.zeros((self.grid, 2 * m + 1), dtype=complex)
        inn = np.zeros((self.grid, 2 * m + 1), dtype=complex)
        out[:, m + n] = 2.0 * e / den
        out[:, m - n] = -2.0 * (q ** (2 * n)) * np.conj(e) / den
        inn[:, m + n] = -2.0 * qn * e / den
        inn[:, m - n] = 2.0 * qn * np.conj(e) / den
        self._node_modes = {OUTER: out, INNER: inn}
        self._comp_a0 = {OUTER: 1.0, INNER: 0.0}
        self._comp_b0 = {OUTER: -1.0 / self._log_q, INNER: 1.0 / self._log_q}
        self._kernel_at_t0 = {
            comp: self._node_kernel_values(comp, self.t0) for comp in (OUTER, INNER)
        }
        ref = BoundaryPoint(OUTER, 0.0)
        self._phi_reference = (2.0 * np.pi * self._comp_b0[OUTER]
                               / float(self.kernel(ref)(self.t0)))

    def _node_kernel_values(self, component: int, z: complex) -> np.ndarray:
        m = self.modes
        n = np.arange(-m, m + 1)
        zp = np.asarray(z, dtype=complex) ** n
        base = self._comp_a0[component] + self._comp_b0[component] * np.log(abs(z))
        return base + np.real(self._node_modes[component] @ zp)

    def require_interior(self, z: complex) -> None:
        if not self.q < abs(z) < 1.0:
            raise PreconditionError(f"point {z} is not strictly inside the annulus")

    def boundary_nodes(self, component: int) -> np.ndarray:
        radius = 1.0 if component == OUTER else self.q
        return radius * np.exp(1j * self.node_angles)

    def harmonic_measure_weights(self) -> dict:
        """Quadrature weights of harmonic measure at the base point."""
        return {comp: self._kernel_at_t0[comp] / self.grid for comp in (OUTER, INNER)}

    def poisson_matrix_row(self, z: complex) -> np.ndarray:
        """Quadrature weights of harmonic measure at ``z`` over all nodes.

        Applying the row to sampled boundary data reproduces the harmonic
        extension at ``z``; the total is exactly 1 for every interior point.
        Node order: the outer circle nodes, then the inner ones.
        """
        self.require_interior(z)
        return np.concatenate([
            self._node_kernel_values(OUTER, z) / self.grid,
            self._node_kernel_values(INNER, z) / self.grid,
        ])

    # -- the constraint functional ------------------------------------------

    def kernel_at_base(self, point: BoundaryPoint) -> float:
        return float(self.kernel(point)(self.t0))

    def phi(self, point: BoundaryPoint) -> float:
        """Conjugate period of ``z -> P_z(zeta)``, scaled to +1 at outer angle 0."""
        raw = 2.0 * np.pi * self._comp_b0[point.component] / self.kernel_at_base(point)
        return raw / self._phi_reference

    def phi_at_nodes(self) -> dict:
        out = {}
        for comp in (OUTER, INNER):
            raw = 2.0 * np.pi * self._comp_b0[comp] / self._kernel_at_t0[comp]
            out[comp] = raw / self._phi_reference
        return out

    # -- extremal measures and functions ------------------------------------

    def extremal_weights(self, x0: BoundaryPoint, x1: BoundaryPoint):
        """Unique positive weights (summing to 1) making the two-point
        measure satisfy the period constraint."""
        if x0.component != OUTER or x1.component != INNER:
            raise PreconditionError("need one outer point and one inner point")
        phi0 = self.phi(x0)
        phi1 = self.phi(x1)
        if not (phi0 > 0.0 > phi1):
            raise PreconditionError(
                "period functional is not sign-opposite across components; "
                "solver is misconfigured")
        w0 = phi1 / (phi1 - phi0)
        w1 = 1.0 - w0
        return w0, w1

    def two_point_measure(self, x0: BoundaryPoint, x1: BoundaryPoint) -> DiscreteMatrixMeasure:
        w0, w1 = self.extremal_weights(x0, x1)
        atoms = (
            Atom(f"outer@{x0.angle:.12f}", [self.phi(x0)], [[w0]], tag=OUTER),
            Atom(f"inner@{x1.angle:.12f}", [self.phi(x1)], [[w1]], tag=INNER),
        )
        return DiscreteMatrixMeasure(1, 1, atoms)

    def extremal_herglotz(self, x0: BoundaryPoint, x1: BoundaryPoint) -> HolomorphicLaurent:
        """The positive-real function with unit value at the base point whose
        boundary measure is the extremal two-point measure on ``(x0, x1)``.

        The weight equation kills the log term exactly, so the analytic
        completion exists; ``Im f(t0) = 0`` fixes the conjugation constant.
        """
        if x0.component != OUTER or x1.component != INNER:
            raise PreconditionError("need one outer point and one inner point")
        k0 = self.kernel(x0)
        k1 = self.kernel(x1)
        denom = float(k0(self.t0) + k1(self.t0))
        h = k0.plus(k1).scaled(1.0 / denom)
        # b0(k0) and b0(k1) are exact negatives; guard anyway.
        if abs(h.b0) > 1e-12:
            raise RuntimeError("internal error: two-point combination kept a period")
        h = LaurentHarmonic(h.a0, 0.0, h.modes)
        return h.analytic(self.t0)

    def matrix_herglotz(self, mu: DiscreteMatrixMeasure, points) -> np.ndarray:
        """Matrix function with ``Re F`` the Poisson integral of ``mu`` and
        skew part vanishing at the base point.

        The scalar conjugate machinery is applied entrywise: each atom
        contributes ``W_j`` times the (log-free part of the) normalized
        kernel of its boundary point, and the measure's period constraint
        must cancel the log terms entrywise.  Atom ids must encode their
        boundary point as ``outer@<angle>`` / ``inner@<angle>``.
        """
        n = np.arange(-self.modes, self.modes + 1)
        log_coeff = np.zeros((mu.N, mu.N), dtype=complex)
        const = np.zeros((mu.N, mu.N), dtype=complex)
        mode_coeffs = np.zeros((2 * self.modes + 1, mu.N, mu.N), dtype=complex)
        for atom in mu.atoms:
            bp = self._boundary_point_of_atom(atom)
            k = self.kernel(bp)
            scale = 1.0 / self.kernel_at_base(bp)
            const += (k.a0 * scale) * atom.weight
            log_coeff += (k.b0 * scale) * atom.weight
            mode_coeffs += (scale * k.modes)[:, None, None] * atom.weight
        if np.linalg.norm(log_coeff, 2) > 1e-9:
            raise PreconditionError(
                "measure keeps a nonzero conjugate period; no single-valued completion")

        def evaluate(z: complex) -> np.ndarray:
            self.require_interior(z)
            zp = np.asarray(z, dtype=complex) ** n
            f = const + np.tensordot(zp, mode_coeffs, axes=(0, 0))
            return f

        f_t0 = evaluate(self.t0)
        skew = (f_t0 - f_t0.conj().T) / 2.0
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        return np.asarray([evaluate(z) - skew for z in pts])

    def _boundary_point_of_atom(self, atom: Atom) -> BoundaryPoint:
        if atom.tag not in (OUTER, INNER):
            raise SchemaError(f"atom {atom.point_id!r} has no boundary tag")
        try:
            angle = float(atom.point_id.split("@", 1)[1])
        except (IndexError, ValueError) as exc:
            raise SchemaError(f"atom id {atom.point_id!r} does not encode an angle") from exc
        return BoundaryPoint(atom.tag, angle)

    # -- quadrature measures and the decomposition pipeline ------------------

    def boundary_measure(self, outer_values, inner_values) -> DiscreteMatrixMeasure:
        """Atomize boundary data against harmonic measure on the node grid.

        ``outer_values``/``inner_values`` sample a nonnegative boundary
        density (relative to harmonic measure this is the Radon-Nikodym
        derivative of the represented measure).  Each node becomes an atom
        with its period-functional value and weight ``u * domega(node)``.
        """
        outer_values = np.asarray(outer_values, dtype=float)
        inner_values = np.asarray(inner_values, dtype=float)
        if outer_values.shape != (self.grid,) or inner_values.shape != (self.grid,):
            raise SchemaError("boundary values must be sampled on the node grid")
        omega = self.harmonic_measure_weights()
        phi = self.phi_at_nodes()
        atoms = []
        for comp, vals, label in ((OUTER, outer_values, "outer"),
                                  (INNER, inner_values, "inner")):
            for k in range(self.grid):
                w = vals[k] * omega[comp][k]
                atoms.append(Atom(f"{label}@{self.node_angles[k]:.12f}",
                                  [phi[comp][k]], [[w]], tag=comp))
        return DiscreteMatrixMeasure(1, 1, tuple(atoms))

    def herglotz_boundary_values(self, f) -> tuple:
        """Sample ``Re f`` on both boundary circles (f must extend there)."""
        out = np.real(np.asarray([f(z) for z in self.boundary_nodes(OUTER)]))
        inn = np.real(np.asarray([f(z) for z in self.boundary_nodes(INNER)]))
        return out, inn

    def decompose_herglotz(self, s, max_depth: int | None = None) -> list:
        """Decompose the boundary measure of ``f = (1+s)/(1-s)`` over
        extremal two-point measures.

        ``s`` must be a normalized strict Schur function (``s(t0) = 0``)
        whose boundary values exist; returns ``[(weight, (x0, x1)), ...]``
        with positive weights summing to 1.
        """
        if abs(complex(s(self.t0))) > 1e-8:
            raise PreconditionError("Schur function must vanish at the base point")
        out_vals, inn_vals = self.herglotz_boundary_values(
            lambda z: cayley_inverse(complex(s(z))))
        if min(out_vals.min(), inn_vals.min()) < -1e-12:
            raise PreconditionError(
                "boundary real part is negative; measure atomization needs a "
                "continuous nonnegative boundary density")
        mu = self.boundary_measure(out_vals, inn_vals)
        report = validate_membership(mu)
        if not report.is_member:
            raise PreconditionError(
                f"atomized boundary measure is not a member (mass residual "
                f"{report.mass_residual:.3e})")
        decomposition = choquet_decompose(mu, max_depth=max_depth)
        nu = []
        for coeff, leaf in decomposition.terms:
            pair = {atom.tag: self._boundary_point_of_atom(atom) for atom in leaf.atoms}
            if set(pair) != {OUTER, INNER}:
                raise RuntimeError("internal error: leaf is not a two-point extreme")
            nu.append((coeff, (pair[OUTER], pair[INNER])))
        return nu

    def agler_residual(self, s, nu, z_points, w_points) -> np.ndarray:
        """Residual matrix of the defect-kernel decomposition.

        Entry (i, j) is ``|1 - s(z_i) conj(s(w_j)) - sum_x nu_x h_x(z_i)
        (1 - s_x(z_i) conj(s_x(w_j))) conj(h_x(w_j))|`` with
        ``h_x = (1 - s) / (1 - s_x)``.
        """
        zs = np.asarray(z_points, dtype=complex).ravel()
        ws = np.asarray(w_points, dtype=complex).ravel()
        for z in np.concatenate([zs, ws]):
            self.require_interior(z)
        sz = np.asarray([complex(s(z)) for z in zs])
        sw = np.asarray([complex(s(w)) for w in ws])
        lhs = 1.0 - np.outer(sz, np.conj(sw))
        rhs = np.zeros_like(lhs)
        for coeff, (x0, x1) in nu:
            f_x = self.extremal_herglotz(x0, x1)
            sxz = cayley(f_x(zs))
            sxw = cayley(f_x(ws))
            hz = (1.0 - sz) / (1.0 - sxz)
            hw = (1.0 - sw) / (1.0 - sxw)
            rhs += coeff * np.outer(hz, np.conj(hw)) * (1.0 - np.outer(sxz, np.conj(sxw)))
        return np.abs(lhs - rhs)

    # -- grids ---------------------------------------------------------------

    def interior_grid(self, radii: int = 20, angles: int = 20,
                      inner_pad: float = 0.2, outer_pad: float = 0.3) -> np.ndarray:
        """Polar grid of interior points padded away from both circles.

        The pads keep the truncated Laurent series of boundary point-mass
        kernels accurate: too close to a circle the truncation tail
        dominates the exponentially small true values on the far side.
        """
        rs = self.q + (1.0 - self.q) * np.linspace(inner_pad, 1.0 - outer_pad, radii)
        ts = np.linspace(0.0, 2.0 * np.pi, angles, endpoint=False)
        return rs[:, None] * np.exp(1j * ts[None, :])

    def near_boundary_circles(self) -> tuple:
        """The two radial-limit test circles pulled slightly inside."""
        pad = 1.0 / (4.0 * self.modes)
        return (1.0 - pad) * np.exp(1j * self.node_angles), \
            self.q * (1.0 + pad) * np.exp(1j * self.node_angles)
