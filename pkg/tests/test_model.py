from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulertop.model import (
    ChartDomainError,
    ChartPoint,
    DegenerateTopError,
    InertiaParams,
    casimir,
    chart_forward,
    chart_inverse,
    energy_to_level,
    euler_field,
    grad_hamiltonian,
    hamiltonian,
    invariant_close,
    level_to_energy,
    reduced_hamiltonian,
    structure_matrix,
)

moments = st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=20)
states = st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3).map(np.array)


def test_euler_coefficients_exact():
    p = InertiaParams(3, 2, 1)
    assert (p.alpha_q, p.beta_q, p.gamma_q) == (Fraction(1, 2), Fraction(-2, 3), Fraction(1, 6))
    assert p.orientation == 1


def test_symmetric_and_saddle_tops_rejected():
    with pytest.raises(DegenerateTopError):
        InertiaParams(1, 2, 2)  # alpha = 0
    with pytest.raises(DegenerateTopError):
        InertiaParams(2, 1, 2)  # beta = 0
    with pytest.raises(DegenerateTopError):
        InertiaParams(1, 3, 2)  # x3 is the middle axis: saddle
    with pytest.raises(ValueError):
        InertiaParams(0, 1, 2)
    assert InertiaParams(1, 3, 2, require_center=False).alpha_q * InertiaParams(
        1, 2, 3, require_center=False).beta_q > 0


def test_from_alpha_beta_round_trip():
    p = InertiaParams.from_alpha_beta(Fraction(1, 2), Fraction(-2, 3), mu3=1)
    assert p.mu == (3, 2, 1)
    with pytest.raises(ValueError):
        InertiaParams.from_alpha_beta(2, -3, mu3=1)


@settings(max_examples=60, deadline=None)
@given(moments, moments, moments, states)
def test_field_is_structure_times_gradient(m1, m2, m3, s):
    p = InertiaParams(m1, m2, m3, require_center=False)
    lhs = euler_field(p, s)
    rhs = structure_matrix(s) @ grad_hamiltonian(p, s)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)
    # both invariants are first integrals
    assert abs(lhs @ grad_hamiltonian(p, s)) < 1e-9 * (1 + np.abs(s).max() ** 3)
    assert abs(lhs @ (2 * s)) < 1e-9 * (1 + np.abs(s).max() ** 3)


def test_structure_matrix_rank():
    assert np.linalg.matrix_rank(structure_matrix([0.3, -1.0, 2.0])) == 2
    assert not structure_matrix([0.0, 0.0, 0.0]).any()


def test_chart_round_trip_and_domain():
    s = np.array([0.3, -0.4, 1.2])
    cp = chart_forward(s, 1.3)
    assert cp.z == pytest.approx(casimir(s))
    np.testing.assert_allclose(chart_inverse(cp), s, rtol=1e-14)
    with pytest.raises(ChartDomainError):
        chart_forward([0.1, 0.1, -0.5], 1)
    with pytest.raises(ChartDomainError):
        chart_inverse(ChartPoint(1.0, 1.0, 1.5, 1.0))


def test_reduced_hamiltonian_matches_energy_on_sphere():
    p = InertiaParams(3, 2, 1)
    c = 1.5
    x, y = 0.4, -0.3
    s = chart_inverse(ChartPoint(x, y, c * c, c))
    h = reduced_hamiltonian(p, x, y)
    assert level_to_energy(p, h, c) == pytest.approx(hamiltonian(p, s), rel=1e-14)
    assert energy_to_level(p, hamiltonian(p, s), c) == pytest.approx(h, rel=1e-12)


def test_invariant_close_floor():
    assert invariant_close(1.0, 1.0 + 1e-14)
    assert not invariant_close(1.0, 1.0 + 1e-10)
    assert invariant_close(0.0, 1e-16)
