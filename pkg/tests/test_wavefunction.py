import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import sweeps
from boundstate import presets
from boundstate import wavefunction as wfn
from boundstate.errors import InvalidParams, ScaleError
from boundstate.model import PotentialSpec, RadialProblem
from boundstate.spectrum import BoundState, bound_state

HULTHEN = PotentialSpec(v3=-0.5, v4=0.5, alpha=0.1)
S3 = RadialProblem(1.0, 3, 0)


def _wave(pot, problem, n):
    return wfn.build_wavefunction(bound_state(pot, problem, n), pot.alpha)


@pytest.mark.parametrize(
    "n, b, c, s, expected",
    [(0, 3.0, 2.0, 0.7, 1.0), (1, 4.0, 2.0, 0.5, 0.0), (2, 1.0, 1.0, 0.5, 0.25), (3, 2.0, 3.0, 1.0, 0.1)],
)
def test_2f1_examples(n, b, c, s, expected):
    assert wfn.hypergeometric_2f1_terminating(n, b, c, s) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10), st.floats(0.5, 30.0), st.floats(1.0, 30.0), st.floats(0.0, 1.0))
def test_2f1_matches_mpmath(n, b, c, s):
    ref = float(mpmath.hyp2f1(-n, b, c, s))
    # a sum of alternating terms is only good to eps times its absolute-term sum
    size = float(mpmath.hyp2f1(-n, b, c, -s)) if n else 1.0
    assert wfn.hypergeometric_2f1_terminating(n, b, c, s) == pytest.approx(ref, abs=1e-13 * max(abs(size), 1.0))


def test_2f1_shapes_and_validation():
    out = wfn.hypergeometric_2f1_terminating(2, 1.0, 2.0, np.zeros((2, 2)))
    assert out.shape == (2, 2) and np.all(out == 1.0)
    with pytest.raises(InvalidParams):
        wfn.hypergeometric_2f1_terminating(-1, 1.0, 2.0, 0.5)
    with pytest.raises(InvalidParams):
        wfn.series_coefficients(3, 1.0, -1.0)


def test_normalization_against_adaptive_quadrature():
    for n in range(3):
        wf = _wave(HULTHEN, S3, n)
        val, _ = integrate.quad(lambda r: wfn.radial_eval(wf, HULTHEN, r) ** 2, 0, np.inf, epsabs=0, epsrel=1e-11, limit=400)
        assert val == pytest.approx(1.0, rel=1e-9)
        assert wfn.norm_integral(wf) == pytest.approx(1.0, abs=1e-10)


def test_normalization_on_random_states():
    for pot, problem, n in sweeps.random_states(3, 8):
        assert wfn.norm_integral(_wave(pot, problem, n)) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("c, gamma, n", [(0.7, 1.0, 1), (2.5, 1.8, 1), (1.2, 2.0, 3)])
def test_integral_identity(c, gamma, n):
    a, b = c, gamma - 1.0
    closed = wfn.jacobi_square_integral(a, b, n)
    ref = mpmath.quad(
        lambda s: s ** (2 * a - 1) * (1 - s) ** (2 * (b + 1)) * mpmath.hyp2f1(-n, 2 * (a + b + 1) + n, 1 + 2 * a, s) ** 2,
        [0, 0.5, 1],
    )
    assert closed == pytest.approx(float(ref), rel=1e-12)
    assert wfn.jacobi_square_quadrature(a, b, n) == pytest.approx(closed, rel=1e-10)


def test_node_count_hulthen():
    wf = _wave(HULTHEN, S3, 2)
    assert wfn.count_nodes(wf, wfn.node_grid(wf)) == 2
    assert len(wfn.node_grid(wf)) >= 512 * 3


def test_node_count_deng_fan():
    case = presets.PresetCase("deng_fan", {"De": 30.0, "sigma": 1.0, "re": 1.0})
    pot, _ = presets.to_mixed(case)
    wf = _wave(pot, RadialProblem(1.0, 3, 0), 3)
    assert wfn.count_nodes(wf, wfn.node_grid(wf)) == 3


def test_count_nodes_rejects_bad_grids():
    wf = _wave(HULTHEN, S3, 1)
    for grid in ([1.0], [2.0, 1.0], [0.0, 1.0], np.ones((2, 2))):
        with pytest.raises(InvalidParams):
            wfn.count_nodes(wf, grid)


def test_ode_residual_small_at_eigenvalue_and_large_off_it():
    wf = _wave(HULTHEN, S3, 1)
    s = np.linspace(0.02, 0.98, 50)
    assert np.max(wfn.ode_residual(wf, HULTHEN, S3, s)) < 1e-12
    st_ = wf.state
    off = wfn.build_wavefunction(BoundState(st_.n, st_.ell, st_.energy * 1.01, st_.c, st_.gamma), HULTHEN.alpha)
    assert np.max(wfn.ode_residual(off, HULTHEN, S3, s)) > 1e-4
    with pytest.raises(InvalidParams):
        wfn.ode_residual(wf, HULTHEN, S3, [0.0])


def test_radial_value_matches_the_defining_formula():
    wf = _wave(HULTHEN, S3, 2)
    st_ = wf.state
    r = np.array([0.3, 2.0, 9.0])
    s = np.exp(-2 * HULTHEN.alpha * r)
    poly = [float(mpmath.hyp2f1(-2, 2 * (st_.c + st_.gamma) + 2, 1 + 2 * st_.c, x)) for x in s]
    expected = wf.k_norm * s**st_.c * (1 - s) ** st_.gamma * np.array(poly)
    np.testing.assert_allclose(wfn.radial_eval(wf, HULTHEN, r), expected, rtol=1e-12)
    assert isinstance(wfn.radial_eval(wf, HULTHEN, 1.0), float)
    with pytest.raises(InvalidParams):
        wfn.radial_eval(wf, HULTHEN, [-1.0])


def test_full_radial_factor_examples():
    wf = _wave(HULTHEN, S3, 0)
    r = np.array([0.5, 1.0, 4.0])
    np.testing.assert_allclose(wfn.full_radial_factor(wf, S3, r), wfn.radial_eval(wf, HULTHEN, r) / r, rtol=1e-15)
    one_d = RadialProblem(1.0, 1, 0)
    np.testing.assert_allclose(wfn.full_radial_factor(wf, one_d, r), wfn.radial_eval(wf, HULTHEN, r), rtol=1e-15)


def test_decay_radius_bounds_the_tail():
    wf = _wave(HULTHEN, S3, 1)
    r = wfn.decay_radius(wf)
    assert math.exp(-2 * HULTHEN.alpha * wf.state.c * r) == pytest.approx(1e-10, rel=1e-12)


def test_scale_error_for_absurd_decay_exponent():
    with pytest.raises(ScaleError):
        wfn.normalization_constant(BoundState(0, 0, -1.0, 1e300, 3.0), 1.0)


def test_invalid_normalization_inputs():
    with pytest.raises(InvalidParams):
        wfn.normalization_constant(BoundState(0, 0, -1.0, 0.0, 1.0), 1.0)
    with pytest.raises(InvalidParams):
        wfn.normalization_constant(BoundState(0, 0, -1.0, 1.0, 1.0), 0.0)


def test_wavefunction_record_validation():
    st_ = bound_state(HULTHEN, S3, 1)
    with pytest.raises(InvalidParams):
        wfn.RadialWavefunction(st_, (1.0,), 1.0, 0.1)
    with pytest.raises(InvalidParams):
        wfn.RadialWavefunction(st_, (2.0, 1.0), 1.0, 0.1)
    with pytest.raises(InvalidParams):
        wfn.RadialWavefunction(st_, (1.0, 1.0), float("inf"), 0.1)
