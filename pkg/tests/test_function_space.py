import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from varwave import (
    CoefficientProfile,
    GridField,
    NonlinearitySpec,
    SpectralField,
    SpectralSpace,
    analyze,
    apply_L,
    apply_nonlinearity,
    mode_field,
    multiply,
    project_parity,
    random_odd_field,
    solve_eigenbasis,
    synthesize,
    weighted_inner,
)
from varwave._validation import SymmetryError
from varwave.function_space import EVEN, MIXED, ODD, SAT_SLOPE_MAX

coef = arrays(np.float64, (16, 10), elements=st.floats(-1, 1, allow_nan=False))


def _field(space, a, b, tag=None):
    b = b.copy()
    b[0] = 0.0
    return SpectralField(a, b, space, tag)


@given(a=coef, b=coef)
@settings(max_examples=20, deadline=None)
def test_round_trip_and_parseval(small_space, a, b):
    c = _field(small_space, a, b)
    for fine in (False, True):
        g = synthesize(c, fine=fine)
        back = analyze(g, small_space)
        assert (back - c).norm() <= 1e-12 * (1 + c.norm())
        assert np.sqrt(weighted_inner(g, g)) == pytest.approx(c.norm(), rel=1e-12, abs=1e-14)


def test_round_trip_variable_coefficient(bumpy_space):
    rng = np.random.default_rng(1)
    c = _field(bumpy_space, rng.normal(size=(10, 8)), rng.normal(size=(10, 8)))
    assert (analyze(synthesize(c)) - c).norm() < 1e-12 * c.norm()


def test_odd_fields_flip_sign_under_half_period_shift(small_space):
    y = random_odd_field(small_space, np.random.default_rng(2), 3.0)
    g = synthesize(y)
    np.testing.assert_allclose(g.shift_half_period().values, -g.values, atol=1e-13)


def test_parity_classification(small_space):
    assert mode_field(small_space, [("cos", 1, 1, 1.0)]).parity_tag == ODD
    assert mode_field(small_space, [("sin", 2, 3, 1.0)]).parity_tag == EVEN
    mixed = mode_field(small_space, [("cos", 1, 1, 1.0), ("cos", 0, 1, 1.0)])
    assert mixed.parity_tag == MIXED
    assert project_parity(mixed, "odd").norm() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        mode_field(small_space, [("cos", 2, 1, 1.0)], parity_tag=ODD)
    with pytest.raises(ValueError):
        mode_field(small_space, [("sin", 0, 1, 1.0)])


def test_apply_L_is_diagonal(small_space):
    c = mode_field(small_space, [("cos", 1, 1, 2.0), ("sin", 3, 2, 1.0)])
    Lc = apply_L(c)
    assert Lc.coefficient("cos", 1, 1) == pytest.approx(1.5)
    assert Lc.coefficient("sin", 3, 2) == pytest.approx(4 - 9 / 4)


def test_multiply_scalar_and_field(small_space):
    y = random_odd_field(small_space, np.random.default_rng(3), 1.0)
    assert (multiply(-0.25, y) - y * -0.25).norm() == 0.0
    # a constant grid multiplier must agree with the exact scalar path
    grid = small_space.fine_grid_
    assert (multiply(GridField(np.full(grid.shape, 0.3), grid), y) - y * 0.3).norm() < 1e-12


def test_odd_nonlinearity_keeps_odd_subspace(small_space):
    spec = NonlinearitySpec(c_lin=0.2, c_sat=1.0, c_osc=-0.7, symmetry="odd_f1_only")
    rng = np.random.default_rng(4)
    for _ in range(5):
        y = random_odd_field(small_space, rng, 5.0)
        assert project_parity(apply_nonlinearity(spec, y), "even").norm() < 1e-12


def test_forcing_must_be_odd(small_space):
    with pytest.raises(SymmetryError):
        NonlinearitySpec(forcing=mode_field(small_space, [("cos", 2, 1, 1.0)]))
    with pytest.raises(SymmetryError):
        NonlinearitySpec(forcing=mode_field(small_space, [("cos", 1, 1, 1.0)]), symmetry="odd_f1_only")


@given(
    st.floats(-2, 2, allow_nan=False),
    st.floats(-2, 2, allow_nan=False),
    st.floats(-2, 2, allow_nan=False),
    st.floats(-30, 30, allow_nan=False),
)
def test_derivative_and_slope_enclosure(c_lin, c_sat, c_osc, y):
    spec = NonlinearitySpec(c_lin, c_sat, c_osc)
    h = 1e-6
    fd = (spec.value(np.array(y + h)) - spec.value(np.array(y - h))) / (2 * h)
    assert spec.derivative(np.array(y)) == pytest.approx(fd, abs=1e-6)
    lo, hi = spec.slope_range()
    assert lo - 1e-12 <= spec.derivative(np.array(y)) <= hi + 1e-12


def test_saturation_slope_maximum():
    y = np.linspace(0, 5, 200001)
    d = NonlinearitySpec(c_sat=1.0).derivative(y)
    assert d.max() == pytest.approx(SAT_SLOPE_MAX, rel=1e-8)


def test_serialisation_round_trip(small_space):
    y = random_odd_field(small_space, np.random.default_rng(5), 2.0)
    back = SpectralField.from_dict(y.to_dict(), small_space)
    assert (back - y).norm() == 0.0
    vec = y.odd_vector()
    assert vec.size == small_space.odd_size
    assert (SpectralField.from_odd_vector(vec, small_space) - y).norm() == 0.0


def test_estimator_transform(small_space):
    y = random_odd_field(small_space, np.random.default_rng(6), 1.0)
    samples = small_space.inverse_transform(y)
    assert (small_space.transform(samples) - y).norm() < 1e-12
    assert small_space.get_params() == {"m_max": 15, "n_max": 10, "dealias": True}


def test_under_resolved_x_grid_is_rejected(period21):
    basis = solve_eigenbasis(CoefficientProfile.constant(1.0, grid_size=129), 40)
    with pytest.raises(ValueError, match="under-resolved"):
        SpectralSpace(3, 40).fit(basis, period21)
