import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from keplerreg import (
    DomainError,
    MomentumMatrix,
    PhasePoint,
    PlaneCotangentPoint,
    SphereCotangentPoint,
    Tolerances,
    kepler_energy,
    sample_bound_states,
)


class TestKeplerEnergy:
    def test_circular(self):
        assert kepler_energy(PhasePoint([1, 0], [0, 1])) == -0.5

    def test_at_rest(self):
        assert kepler_energy(PhasePoint([1, 0], [0, 0])) == -1.0

    def test_half_speed(self):
        assert kepler_energy(PhasePoint([1, 0], [0, 0.5])) == -7 / 8

    def test_collision_rejected(self):
        with pytest.raises(DomainError, match="q must be nonzero"):
            kepler_energy(PhasePoint([0, 0], [0, 1]))


class TestPhasePoint:
    def test_mismatched_lengths(self):
        with pytest.raises(DomainError):
            PhasePoint([1, 0, 0], [0, 1])

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            PhasePoint([np.nan, 0], [0, 1])

    def test_immutable(self):
        pt = PhasePoint([1, 0], [0, 1])
        with pytest.raises(ValueError):
            pt.q[0] = 2.0

    def test_predicates(self):
        assert PhasePoint([1, 0], [0, 1]).is_bound()
        assert PhasePoint([1, 0], [0, 1]).on_reference_shell()
        assert not PhasePoint([1, 0], [0, 2]).is_bound()  # H = +1
        assert not PhasePoint([1, 0], [0, 0]).on_reference_shell()  # H = -1

    def test_n_from_vectors(self):
        assert PhasePoint([1, 0, 0, 0], [0, 0, 0, 1]).n == 4


class TestSphereCotangentPoint:
    def test_constraints_enforced(self):
        with pytest.raises(DomainError, match="unit sphere"):
            SphereCotangentPoint([0, 0, 0.5], [1, 0, 0])
        with pytest.raises(DomainError, match="tangent"):
            SphereCotangentPoint([0, 0, 1], [0, 0, 1])

    def test_valid_point(self):
        sp = SphereCotangentPoint([0, 1, 0], [-1, 0, 0])
        assert sp.n == 2
        assert sp.covector_norm == 1.0
        assert sp.off_zero_section()
        assert sp.off_pole()
        assert sp.is_regular()
        assert sp.on_unit_shell()

    def test_pole_predicates(self):
        pole = SphereCotangentPoint([0, 0, 1], [1, 0, 0])
        assert pole.off_zero_section()
        assert not pole.off_pole()
        assert not pole.is_regular()
        zero = SphereCotangentPoint([1, 0, 0], [0, 0, 0])
        assert not zero.off_zero_section()

    def test_custom_tolerance(self):
        u = np.array([0.0, 0.0, 1.0 + 5e-9])
        with pytest.raises(DomainError):
            SphereCotangentPoint(u, [1, 0, 0])
        SphereCotangentPoint(u, [1, 0, 0], constraint_tol=1e-7)


class TestPlaneCotangentPoint:
    def test_y_nonzero(self):
        assert PlaneCotangentPoint([1], [2]).y_nonzero()
        assert not PlaneCotangentPoint([1], [0]).y_nonzero()


class TestMomentumMatrix:
    def test_wedge_antisymmetric_exactly(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            m = MomentumMatrix.wedge(rng.standard_normal(4), rng.standard_normal(4))
            assert np.array_equal(m.entries, -m.entries.T)

    def test_entry_reflection(self):
        m = MomentumMatrix.wedge([1.0, 0.0], [0.0, 0.5])
        assert m.entry(0, 1) == 0.5
        assert m.entry(1, 0) == -0.5
        assert m.entry(0, 0) == 0.0

    def test_lower_triangle_ignored(self):
        full = np.array([[0.0, 2.0], [99.0, 0.0]])
        m = MomentumMatrix(full)
        assert m.entry(1, 0) == -2.0

    def test_norm_squared_counts_independent_entries(self):
        m = MomentumMatrix.wedge([1.0, 0.0], [0.0, 1.0])
        assert m.norm_squared() == 1.0

    def test_must_be_square(self):
        with pytest.raises(DomainError):
            MomentumMatrix(np.zeros((2, 3)))


class TestTolerances:
    def test_defaults(self):
        tol = Tolerances()
        assert tol.constraint_tol == 1e-10
        assert tol.fd_step == 1e-6
        assert tol.root_tol == 1e-14
        assert tol.ode_tol == 1e-10

    @pytest.mark.parametrize("field", ["constraint_tol", "fd_step", "root_tol", "ode_tol"])
    def test_positive_required(self, field):
        with pytest.raises(ValueError):
            Tolerances(**{field: 0.0})


class TestSampleBoundStates:
    def test_single_point_postconditions(self):
        (pt,) = sample_bound_states(2, 1, 42)
        assert pt.radius > 0
        assert kepler_energy(pt) < 0

    def test_batch_all_bound(self):
        pts = sample_bound_states(3, 100, 7)
        assert len(pts) == 100
        for pt in pts:
            assert pt.radius >= 0.1
            assert kepler_energy(pt) <= -0.05

    def test_deterministic(self):
        a = sample_bound_states(2, 25, 123)
        b = sample_bound_states(2, 25, 123)
        for x, y in zip(a, b):
            assert np.array_equal(x.q, y.q)
            assert np.array_equal(x.p, y.p)

    def test_filters_respected(self):
        pts = sample_bound_states(
            2, 50, 5, pole_gap=0.05, max_eccentricity=0.6, min_energy=-1.0
        )
        from keplerreg import lenz_vector

        for pt in pts:
            energy = kepler_energy(pt)
            assert -1.0 <= energy <= -0.05
            assert np.linalg.norm(lenz_vector(pt)) <= 0.6
            gap = 2.0 - pt.radius * float(pt.p @ pt.p)
            assert 2.0 * gap >= 0.05**2

    def test_impossible_constraints_error(self):
        with pytest.raises(RuntimeError, match="rejection sampling"):
            sample_bound_states(2, 1, 0, max_eccentricity=1e-12)

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_seed_reproducible(self, seed):
        a = sample_bound_states(2, 3, seed)
        b = sample_bound_states(2, 3, seed)
        assert all(np.array_equal(x.q, y.q) for x, y in zip(a, b))
