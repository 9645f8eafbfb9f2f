import numpy as np
import pytest

from herglotz.annulus import Annulus, BoundaryPoint, INNER, OUTER, conjugate_period
from herglotz.errors import PreconditionError, SchemaError
from herglotz.measures import is_extreme, validate_membership
from herglotz.schur import cayley
from oracles import flux_conjugate_period

Q = 0.5
T0 = np.sqrt(0.5)

# frozen from the flux-quadrature oracle at (outer@0, inner@pi/3), M = 64;
# the oracle and the solver path agree to ~2e-14
FIXTURE_W0 = 0.9829298204333957
FIXTURE_PHI1 = -57.5816918971596579


def harmonic_trace_coeffs(ann, fn):
    """Exact Fourier coefficients of fn on both circles (trapezoid DFT)."""
    coeffs = []
    for radius in (1.0, ann.q):
        vals = np.asarray([fn(radius * np.exp(1j * t)) for t in ann.node_angles])
        spec = np.fft.fft(vals) / ann.grid
        c = np.zeros(2 * ann.modes + 1, dtype=complex)
        c[ann.modes] = spec[0]
        for n in range(1, ann.modes + 1):
            c[ann.modes + n] = spec[-n % ann.grid]
            c[ann.modes - n] = spec[n]
        coeffs.append(c)
    return coeffs


class TestDirichletSolver:
    def test_constant_trace(self, ann):
        h = ann.dirichlet_solve(ann.constant_coefficients(1.0),
                                ann.constant_coefficients(1.0))
        assert h.a0 == 1.0 and h.b0 == 0.0 and np.abs(h.modes).max() == 0.0

    def test_log_trace(self, ann):
        h = ann.dirichlet_solve(ann.constant_coefficients(0.0),
                                ann.constant_coefficients(np.log(Q)))
        np.testing.assert_allclose([h.a0, h.b0], [0.0, 1.0], atol=1e-14)
        z = 0.77 * np.exp(0.3j)
        np.testing.assert_allclose(h(z), np.log(abs(z)), atol=1e-12)

    def test_real_part_trace(self, ann):
        h = ann.dirichlet_solve(np.array([0.5, 0.0, 0.5]),
                                np.array([Q / 2, 0.0, Q / 2]))
        z = 0.61 * np.exp(1.1j)
        np.testing.assert_allclose(h(z), z.real, atol=1e-12)

    def test_harmonic_family_exactness(self, ann, rng):
        zs = (Q + (1 - Q) * rng.uniform(0.15, 0.85, size=12)) \
            * np.exp(1j * rng.uniform(0, 2 * np.pi, size=12))
        functions = [lambda z: np.ones_like(np.real(z)), lambda z: np.log(np.abs(z))]
        for n in range(1, ann.modes // 2 + 1, 7):
            functions.append(lambda z, n=n: np.real(z ** n))
            functions.append(lambda z, n=n: np.imag(z ** n))
            functions.append(lambda z, n=n: np.real(z ** (-n)))
        for fn in functions:
            outer, inner = harmonic_trace_coeffs(ann, fn)
            h = ann.dirichlet_solve(outer, inner)
            np.testing.assert_allclose(h(zs), fn(zs), atol=1e-10)

    def test_maximum_principle_sampled(self, ann, rng):
        coeffs = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        coeffs[4] = coeffs[4].real
        coeffs = (coeffs + coeffs[::-1].conj()) / 2
        h = ann.dirichlet_solve(coeffs, 0.3 * coeffs)
        outer_vals = h(np.exp(1j * ann.node_angles))
        inner_vals = h(Q * np.exp(1j * ann.node_angles))
        lo = min(outer_vals.min(), inner_vals.min())
        hi = max(outer_vals.max(), inner_vals.max())
        interior = h(ann.interior_grid(10, 16))
        assert interior.min() >= lo - 1e-8 and interior.max() <= hi + 1e-8

    def test_hermitian_symmetry_enforced(self, ann):
        with pytest.raises(SchemaError):
            ann.dirichlet_solve(np.array([0.0, 1.0, 1.0]),
                                ann.constant_coefficients(0.0))

    def test_too_many_modes_rejected(self, ann):
        with pytest.raises(SchemaError):
            ann.dirichlet_solve(np.zeros(2 * ann.modes + 3), np.zeros(1))


class TestPoissonRow:
    def test_total_mass_one_everywhere(self, ann, rng):
        for _ in range(5):
            z = (Q + (1 - Q) * rng.uniform(0.1, 0.9)) * np.exp(1j * rng.uniform(0, 7))
            np.testing.assert_allclose(ann.poisson_matrix_row(z).sum(), 1.0, atol=1e-12)

    def test_reproduces_harmonic_data(self, ann):
        z = 0.66 * np.exp(0.9j)
        row = ann.poisson_matrix_row(z)
        re_data = np.concatenate([np.cos(ann.node_angles), Q * np.cos(ann.node_angles)])
        np.testing.assert_allclose(row @ re_data, z.real, atol=1e-12)
        log_data = np.concatenate([np.zeros(ann.grid),
                                   np.full(ann.grid, np.log(Q))])
        np.testing.assert_allclose(row @ log_data, np.log(abs(z)), atol=1e-12)

    def test_base_point_gives_harmonic_measure(self, ann):
        row = ann.poisson_matrix_row(ann.t0)
        omega = ann.harmonic_measure_weights()
        np.testing.assert_allclose(
            row, np.concatenate([omega[OUTER], omega[INNER]]), atol=1e-13)

    def test_exterior_point_rejected(self, ann):
        with pytest.raises(PreconditionError):
            ann.poisson_matrix_row(1.2)
        with pytest.raises(PreconditionError):
            ann.poisson_matrix_row(0.2)


class TestConjugatePeriod:
    def test_log_has_period_two_pi(self, ann):
        h = ann.dirichlet_solve(ann.constant_coefficients(0.0),
                                ann.constant_coefficients(np.log(Q)))
        np.testing.assert_allclose(conjugate_period(h), 2 * np.pi, atol=1e-12)

    def test_constant_and_real_part_have_none(self, ann):
        one = ann.dirichlet_solve(ann.constant_coefficients(1.0),
                                  ann.constant_coefficients(1.0))
        rez = ann.dirichlet_solve(np.array([0.5, 0.0, 0.5]),
                                  np.array([Q / 2, 0.0, Q / 2]))
        assert conjugate_period(one) == 0.0
        assert conjugate_period(rez) == 0.0

    def test_linearity(self, ann, rng):
        h1 = ann.kernel(BoundaryPoint(OUTER, 0.4))
        h2 = ann.kernel(BoundaryPoint(INNER, 2.2))
        a, b = rng.uniform(-2, 2, size=2)
        combo = h1.scaled(a).plus(h2.scaled(b))
        np.testing.assert_allclose(
            conjugate_period(combo),
            a * conjugate_period(h1) + b * conjugate_period(h2), atol=1e-12)

    def test_flux_oracle_agrees(self, ann):
        h = ann.kernel(BoundaryPoint(OUTER, 1.0))
        flux = flux_conjugate_period(lambda z: float(h(z)), 0.75)
        np.testing.assert_allclose(flux, conjugate_period(h), atol=1e-6)


class TestPhiFunctional:
    def test_normalization_at_outer_zero(self, ann):
        np.testing.assert_allclose(ann.phi(BoundaryPoint(OUTER, 0.0)), 1.0, atol=1e-14)

    def test_sign_pattern(self, ann):
        phi = ann.phi_at_nodes()
        assert phi[OUTER].min() > 0.0
        assert phi[INNER].max() < 0.0

    def test_integral_against_harmonic_measure_vanishes(self, ann):
        phi = ann.phi_at_nodes()
        omega = ann.harmonic_measure_weights()
        total = phi[OUTER] @ omega[OUTER] + phi[INNER] @ omega[INNER]
        np.testing.assert_allclose(total, 0.0, atol=1e-8)

    @pytest.mark.xfail(strict=True, reason=(
        "the period functional is not rotation invariant: it carries the "
        "reciprocal of the harmonic-measure density of the base point, which "
        "varies along each circle for every off-center base point"))
    def test_angle_invariance(self, ann):
        phi = ann.phi_at_nodes()
        assert np.abs(phi[OUTER] - phi[OUTER][0]).max() <= 1e-10

    def test_matches_period_of_normalized_kernel(self, ann):
        # definition check: phi is the conjugate period of z -> P_z(zeta)
        for bp in (BoundaryPoint(OUTER, 2.0), BoundaryPoint(INNER, 0.7)):
            k = ann.kernel(bp)
            period = conjugate_period(k.scaled(1.0 / float(k(ann.t0))))
            np.testing.assert_allclose(ann.phi(bp) * ann._phi_reference, period,
                                       rtol=1e-12)


class TestExtremalWeights:
    def test_positive_and_normalized(self, ann, rng):
        for _ in range(10):
            x0 = BoundaryPoint(OUTER, rng.uniform(0, 2 * np.pi))
            x1 = BoundaryPoint(INNER, rng.uniform(0, 2 * np.pi))
            w0, w1 = ann.extremal_weights(x0, x1)
            assert w0 > 0 and w1 > 0
            np.testing.assert_allclose(w0 + w1, 1.0, atol=1e-14)

    @pytest.mark.xfail(strict=True, reason=(
        "the weights inherit the angle dependence of the period functional; "
        "they are constant across angle pairs only for a rotation-invariant "
        "functional, which no base point admits"))
    def test_weights_constant_across_angles(self, ann, rng):
        reference = ann.extremal_weights(BoundaryPoint(OUTER, 0.0),
                                         BoundaryPoint(INNER, 0.0))
        for _ in range(10):
            w = ann.extremal_weights(BoundaryPoint(OUTER, rng.uniform(0, 2 * np.pi)),
                                     BoundaryPoint(INNER, rng.uniform(0, 2 * np.pi)))
            np.testing.assert_allclose(w, reference, atol=1e-10)

    def test_regression_fixture(self, ann):
        x0 = BoundaryPoint(OUTER, 0.0)
        x1 = BoundaryPoint(INNER, np.pi / 3)
        w0, w1 = ann.extremal_weights(x0, x1)
        np.testing.assert_allclose(w0, FIXTURE_W0, atol=1e-12)
        np.testing.assert_allclose(ann.phi(x1), FIXTURE_PHI1, atol=1e-9)

    def test_flux_oracle_agreement(self, ann):
        x0 = BoundaryPoint(OUTER, 0.0)
        x1 = BoundaryPoint(INNER, np.pi / 3)

        def period(bp):
            k = ann.kernel(bp)
            scale = float(k(ann.t0))
            return flux_conjugate_period(lambda z: float(k(z)) / scale, 0.78)

        p0, p1 = period(x0), period(x1)
        w0_oracle = p1 / (p1 - p0)
        w0, _ = ann.extremal_weights(x0, x1)
        np.testing.assert_allclose(w0, w0_oracle, atol=1e-9)

    def test_component_order_enforced(self, ann):
        with pytest.raises(PreconditionError):
            ann.extremal_weights(BoundaryPoint(INNER, 0.0), BoundaryPoint(OUTER, 0.0))

    def test_two_point_measure_is_extreme(self, ann, rng):
        for _ in range(5):
            mu = ann.two_point_measure(
                BoundaryPoint(OUTER, rng.uniform(0, 2 * np.pi)),
                BoundaryPoint(INNER, rng.uniform(0, 2 * np.pi)))
            assert validate_membership(mu).is_member
            assert is_extreme(mu).is_extreme


class TestExtremalHerglotz:
    def test_base_point_normalization(self, ann, rng):
        for _ in range(5):
            f = ann.extremal_herglotz(
                BoundaryPoint(OUTER, rng.uniform(0, 2 * np.pi)),
                BoundaryPoint(INNER, rng.uniform(0, 2 * np.pi)))
            val = f(ann.t0)
            np.testing.assert_allclose(val.real, 1.0, atol=1e-10)
            np.testing.assert_allclose(val.imag, 0.0, atol=1e-12)

    def test_positive_real_part_on_interior_grid(self, ann):
        grid = ann.interior_grid(20, 20)
        for angles in ((0.0, 0.0), (0.0, np.pi), (np.pi, 0.0), (1.0, 2.0)):
            f = ann.extremal_herglotz(BoundaryPoint(OUTER, angles[0]),
                                      BoundaryPoint(INNER, angles[1]))
            assert np.real(f(grid)).min() > 0.0

    def test_normalized_schur_vanishes_at_base(self, ann):
        f = ann.extremal_herglotz(BoundaryPoint(OUTER, 0.5), BoundaryPoint(INNER, 2.5))
        np.testing.assert_allclose(abs(cayley(f(ann.t0))), 0.0, atol=1e-10)

    @pytest.mark.xfail(strict=True, reason=(
        "a strict self-map of the disk has |s| < 1 inside; at distance "
        "1/(4M) from the boundary the gap is O(distance) ~ 1e-2, far above "
        "1e-4, independent of truncation order"))
    def test_boundary_modulus_tight_band(self, ann):
        f = ann.extremal_herglotz(BoundaryPoint(OUTER, 0.0),
                                  BoundaryPoint(INNER, np.pi / 3))
        for circle in ann.near_boundary_circles():
            s = cayley(f(circle))
            assert np.abs(np.abs(s) - 1.0).max() <= 1e-4

    def test_boundary_modulus_contraction_trend(self, ann):
        # the honest version: values stay inside the closed disk and the
        # maximum modulus climbs toward 1 as the circles approach the boundary
        f = ann.extremal_herglotz(BoundaryPoint(OUTER, 0.0),
                                  BoundaryPoint(INNER, np.pi / 3))
        outer_near, inner_near = ann.near_boundary_circles()
        for circle in (outer_near, inner_near):
            s = np.abs(cayley(f(circle)))
            assert s.max() <= 1.0 + 1e-9
            assert s.max() > 0.75
        mid = np.abs(cayley(f(0.75 * np.exp(1j * ann.node_angles))))
        assert mid.max() < np.abs(cayley(f(outer_near))).max()

    def test_matrix_measure_completion(self, ann):
        # two-point scalar extremes on orthogonal projections: Re F PSD,
        # F(t0) = I, skew part vanishing at the base point
        from herglotz.measures import Atom, DiscreteMatrixMeasure
        x0 = BoundaryPoint(OUTER, 0.3)
        x1 = BoundaryPoint(INNER, 1.4)
        y0 = BoundaryPoint(OUTER, 3.0)
        y1 = BoundaryPoint(INNER, 5.1)
        wx = ann.extremal_weights(x0, x1)
        wy = ann.extremal_weights(y0, y1)
        p = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
        atoms = (
            Atom(f"outer@{x0.angle:.12f}", [ann.phi(x0)], wx[0] * p[0], tag=OUTER),
            Atom(f"inner@{x1.angle:.12f}", [ann.phi(x1)], wx[1] * p[0], tag=INNER),
            Atom(f"outer@{y0.angle:.12f}", [ann.phi(y0)], wy[0] * p[1], tag=OUTER),
            Atom(f"inner@{y1.angle:.12f}", [ann.phi(y1)], wy[1] * p[1], tag=INNER),
        )
        mu = DiscreteMatrixMeasure(2, 1, atoms)
        assert validate_membership(mu).is_member
        grid = ann.interior_grid(6, 6).ravel()
        values = ann.matrix_herglotz(mu, np.concatenate([[ann.t0], grid]))
        np.testing.assert_allclose(values[0], np.eye(2), atol=1e-10)
        for v in values[1:]:
            assert np.linalg.eigvalsh((v + v.conj().T) / 2).min() > 0.0


class TestValidation:
    def test_bad_domain_parameters(self):
        with pytest.raises(SchemaError):
            Annulus(1.2, 0.5)
        with pytest.raises(SchemaError):
            Annulus(0.5, 0.4)
        with pytest.raises(SchemaError):
            Annulus(0.5, np.sqrt(0.5), modes=4)
        with pytest.raises(SchemaError):
            Annulus(0.5, np.sqrt(0.5), modes=64, grid=100)

    def test_analytic_completion_requires_zero_period(self, ann):
        log_h = ann.dirichlet_solve(ann.constant_coefficients(0.0),
                                    ann.constant_coefficients(np.log(Q)))
        with pytest.raises(PreconditionError):
            log_h.analytic(ann.t0)
