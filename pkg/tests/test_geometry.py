import numpy as np
import pytest

from herglotz.errors import PreconditionError, SchemaError
from herglotz.geometry import (
    PerturbationTuple,
    Subspace,
    admissible_perturbation_space,
    hermitian_coordinates,
    hermitian_from_coordinates,
    phi_constrained_weakly_independent,
    solve_convex_weights,
    weakly_independent,
    zero_interior_convex_hull,
)
from herglotz.sampling import random_unitary


def span(*cols):
    return Subspace.from_basis(np.array(cols, dtype=complex).T)


FULL_LINE = Subspace.from_basis(np.eye(1))


class TestZeroInterior:
    def test_antipodal_pair(self):
        assert zero_interior_convex_hull([[1.0], [-1.0]], [0.5, 0.5]) is True

    def test_circle_triple(self):
        angles = np.deg2rad([90.0, 210.0, 330.0])
        vectors = [np.array([np.cos(a), np.sin(a)]) for a in angles]
        weights = [1 / 3, 1 / 3, 1 / 3]
        # independent rank oracle on the stacked 3x3 system
        stacked = np.vstack([np.array(vectors).T, np.ones(3)])
        assert np.linalg.matrix_rank(stacked) == 3
        assert zero_interior_convex_hull(vectors, weights) is True

    def test_degenerate_triple_is_rejected(self):
        # (0,1) forces w3 = 0, so no strictly positive representation exists;
        # the operation must reject rather than decide.
        vectors = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]
        assert solve_convex_weights(vectors) is None
        with pytest.raises(PreconditionError):
            zero_interior_convex_hull(vectors, [0.5, 0.5, 0.0])
        with pytest.raises(PreconditionError):
            zero_interior_convex_hull(vectors, [1 / 3, 1 / 3, 1 / 3])

    def test_weight_validation(self):
        with pytest.raises(PreconditionError):
            zero_interior_convex_hull([[1.0], [-1.0]], [0.9, 0.9])

    def test_dimension_mismatch(self):
        with pytest.raises(SchemaError):
            zero_interior_convex_hull([[1.0, 0.0], [-1.0]], [0.5, 0.5])


class TestSolveConvexWeights:
    def test_symmetric_pair(self):
        np.testing.assert_allclose(solve_convex_weights([[1.0], [-1.0]]),
                                   [0.5, 0.5], atol=1e-14)

    def test_lopsided_pair(self):
        np.testing.assert_allclose(solve_convex_weights([[2.0], [-1.0]]),
                                   [1 / 3, 2 / 3], atol=1e-14)

    def test_same_sign_has_no_solution(self):
        assert solve_convex_weights([[1.0], [2.0]]) is None

    def test_rank_deficient_returns_none(self):
        # two copies of an antipodal pair: representation not unique
        assert solve_convex_weights([[1.0], [-1.0], [1.0], [-1.0]]) is None


class TestWeakIndependence:
    def test_disjoint_coordinates(self):
        assert weakly_independent([span([1, 0]), span([0, 1])]) is True

    def test_three_lines_not_linearly_independent(self):
        subspaces = [span([1, 0]), span([0, 1]), span([1, 1])]
        assert weakly_independent(subspaces) is True

    def test_repeated_line_fails(self):
        assert weakly_independent([span([1, 0]), span([1, 0])]) is False

    def test_unitary_conjugation_invariance(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 4))
            count = int(rng.integers(2, 5))
            subspaces = []
            for _ in range(count):
                dim = int(rng.integers(1, n + 1))
                basis = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
                subspaces.append(Subspace.from_basis(basis))
            u = random_unitary(rng, n)
            rotated = [Subspace.from_basis(u @ s.basis()) for s in subspaces]
            assert weakly_independent(subspaces) == weakly_independent(rotated)


class TestPhiConstrained:
    def test_m0_agrees_with_unconstrained(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 4))
            count = int(rng.integers(1, 5))
            subspaces = []
            for _ in range(count):
                dim = int(rng.integers(1, n + 1))
                basis = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
                subspaces.append(Subspace.from_basis(basis))
            phis = [np.zeros(0)] * count
            assert (phi_constrained_weakly_independent(subspaces, phis)
                    == weakly_independent(subspaces))

    def test_scalar_antipodal_pair(self):
        assert phi_constrained_weakly_independent(
            [FULL_LINE, FULL_LINE], [[1.0], [-1.0]]) is True

    def test_scalar_duplicated_value(self):
        assert phi_constrained_weakly_independent(
            [FULL_LINE] * 3, [[1.0], [1.0], [-1.0]]) is False


class TestAdmissibleSpace:
    def test_empty_iff_independent(self, rng):
        for _ in range(25):
            n = int(rng.integers(1, 4))
            count = int(rng.integers(1, 5))
            m = int(rng.integers(0, 3))
            subspaces = []
            for _ in range(count):
                dim = int(rng.integers(1, n + 1))
                basis = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
                subspaces.append(Subspace.from_basis(basis))
            phis = [rng.uniform(-2, 2, size=m) for _ in range(count)]
            basis_set = admissible_perturbation_space(subspaces, phis)
            assert (len(basis_set) == 0) == phi_constrained_weakly_independent(subspaces, phis)

    def test_scalar_witness_direction(self):
        basis = admissible_perturbation_space([FULL_LINE] * 3, [[1.0], [1.0], [-1.0]])
        assert len(basis) == 1
        t = np.array([b[0, 0].real for b in basis[0].blocks])
        t /= t[np.argmax(np.abs(t))]
        np.testing.assert_allclose(t, [1.0, -1.0, 0.0], atol=1e-10)

    def test_repeated_line_space_is_one_dimensional(self):
        basis = admissible_perturbation_space([span([1, 0]), span([1, 0])], None)
        assert len(basis) == 1

    def test_returned_tuples_satisfy_invariants(self, rng):
        for _ in range(15):
            n = int(rng.integers(1, 4))
            count = int(rng.integers(2, 5))
            m = int(rng.integers(0, 3))
            subspaces = []
            for _ in range(count):
                dim = int(rng.integers(1, n + 1))
                basis = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
                subspaces.append(Subspace.from_basis(basis))
            phis = np.array([rng.uniform(-2, 2, size=m) for _ in range(count)])
            for tup in admissible_perturbation_space(subspaces, list(phis)):
                tup.validate(subspaces, tol=1e-8)
                np.testing.assert_allclose(abs(tup.norm - 1.0), 0.0, atol=1e-10)
                total = sum(tup.blocks)
                assert np.linalg.norm(total, 2) <= 1e-9
                for i in range(m):
                    s = sum(p[i] * b for p, b in zip(phis, tup.blocks))
                    assert np.linalg.norm(s, 2) <= 1e-7


class TestConv0Equivalence:
    @staticmethod
    def generate(rng):
        """Vectors plus a strictly positive convex representation of 0."""
        m = int(rng.integers(1, 5))
        n = int(rng.integers(2, 9))
        lam = rng.uniform(0.1, 1.0, size=n)
        lam /= lam.sum()
        u = rng.uniform(-3.0, 3.0, size=(n - 1, m))
        last = -(lam[:-1] @ u) / lam[-1]
        return np.vstack([u, last]), lam

    @staticmethod
    def three_conditions(u, lam):
        n = u.shape[0]
        # (1) uniqueness of the positive weights, via a second linear solve
        cond1 = solve_convex_weights(list(u)) is not None
        # (2) the u-only system has a one-dimensional null space
        rank_u = np.linalg.matrix_rank(u.T, tol=1e-10 * max(1.0, np.abs(u).max()))
        cond2 = (n - rank_u) == 1
        # (3) only the trivial solution of the augmented system
        cond3 = zero_interior_convex_hull(list(u), list(lam))
        return cond1, cond2, cond3

    def test_three_conditions_agree(self, rng):
        outcomes = set()
        for _ in range(80):
            u, lam = self.generate(rng)
            cond1, cond2, cond3 = self.three_conditions(u, lam)
            assert cond1 == cond2 == cond3
            outcomes.add(cond1)
        assert outcomes == {True, False}


class TestHermitianCoordinates:
    def test_isometry_round_trip(self, rng):
        for d in (1, 2, 3, 4):
            a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            h = (a + a.conj().T) / 2
            x = hermitian_coordinates(h)
            assert x.shape == (d * d,)
            np.testing.assert_allclose(np.linalg.norm(x),
                                       np.linalg.norm(h, "fro"), atol=1e-12)
            np.testing.assert_allclose(hermitian_from_coordinates(x, d), h, atol=1e-12)


class TestDegenerateInputs:
    def test_empty_family_rejected(self):
        with pytest.raises(SchemaError):
            weakly_independent([])

    def test_zero_subspace_rejected(self):
        with pytest.raises(SchemaError):
            Subspace.from_matrix_range(np.zeros((2, 2)))

    def test_tuple_validation_flags_off_subspace_blocks(self):
        sub = span([1, 0])
        bad = PerturbationTuple.from_blocks([np.eye(2)])
        with pytest.raises(SchemaError):
            bad.validate([sub])
