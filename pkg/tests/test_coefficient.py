import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from varwave import CoefficientProfile, eta_u, kappa


def test_constant_profile_has_zero_potential():
    prof = CoefficientProfile.constant(3.0)
    x = np.linspace(0, np.pi, 7)
    np.testing.assert_array_equal(prof.u(x), 3.0)
    np.testing.assert_array_equal(prof.eta(x), 0.0)
    assert kappa(prof) == 0.0


@given(st.floats(-3.0, 3.0, allow_nan=False))
@settings(max_examples=30, deadline=None)
def test_exponential_potential_is_a_squared_over_four(a):
    prof = CoefficientProfile.exponential(a)
    x = np.linspace(0, np.pi, 11)
    np.testing.assert_allclose(prof.eta(x), a * a / 4, rtol=1e-12, atol=1e-15)
    assert kappa(prof) == pytest.approx(np.pi * a * a / 4, rel=1e-12, abs=1e-15)


def test_square_polynomial_potential_vanishes():
    prof = CoefficientProfile.square_polynomial()
    x = np.linspace(0, np.pi, 101)
    assert np.max(np.abs(prof.eta(x))) < 1e-15
    assert abs(prof.kappa()) < 1e-14


def test_sampled_profile_matches_closed_form():
    x = np.linspace(0, np.pi, 257)
    u = 1 + 0.5 * np.sin(x)
    prof = CoefficientProfile.from_samples(u, 0.5 * np.cos(x), -0.5 * np.sin(x))
    xs = np.linspace(0, np.pi, 33)
    exact = (-0.25 * np.sin(xs)) / (1 + 0.5 * np.sin(xs)) - 0.25 * (0.5 * np.cos(xs) / (1 + 0.5 * np.sin(xs))) ** 2
    np.testing.assert_allclose(eta_u(prof, xs), exact, atol=1e-6)


def test_table_round_trip(tmp_path):
    x = np.linspace(0, np.pi, 200)
    path = tmp_path / "u.txt"
    np.savetxt(path, np.column_stack([np.exp(x), np.exp(x), np.exp(x)]))
    prof = CoefficientProfile.from_table(path)
    assert prof.kind == "user_sampled"
    assert prof.kappa() == pytest.approx(np.pi / 4, rel=1e-6)


@pytest.mark.parametrize(
    "build",
    [
        lambda: CoefficientProfile.constant(0.0),
        lambda: CoefficientProfile.constant(-1.0),
        lambda: CoefficientProfile.from_samples(np.linspace(-1, 1, 50), np.ones(50), np.zeros(50)),
        lambda: CoefficientProfile("cubic", {}),
        lambda: CoefficientProfile.constant(1.0, grid_size=32),
    ],
)
def test_invalid_profiles_are_rejected(build):
    with pytest.raises(ValueError):
        build()


def test_evaluation_outside_interval_raises():
    with pytest.raises(ValueError):
        CoefficientProfile.constant(1.0).u(np.array([4.0]))


def test_to_dict_and_grid_size():
    prof = CoefficientProfile.exponential(0.5).with_grid_size(257)
    assert prof.to_dict() == {"kind": "exponential", "grid_size": 257, "a": 0.5}
