import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specframes import kernels
from specframes.errors import ParameterError
from specframes.kernels import CosineWindow


def test_hann_values():
    h = kernels.make_hann()
    assert h(0.5) == pytest.approx(1.0, abs=1e-15)
    assert h(0.0) == pytest.approx(0.0, abs=1e-15)
    assert h(1.0) == 0.0 and h(-0.1) == 0.0


def test_blackman_continuity():
    b = kernels.make_blackman()
    assert sum((-1) ** k * a for k, a in enumerate(b.coefficients)) == pytest.approx(0, abs=1e-15)
    assert b(0.0) == pytest.approx(0.0, abs=1e-15)


def test_discontinuous_window_rejected():
    with pytest.raises(ParameterError):
        CosineWindow((0.5, 0.4))


@pytest.mark.parametrize("R", [3, 4, 5, 8, 12])
def test_hann_constant_is_three_eighths_R(R):
    assert kernels.make_hann().frame_constant(R) == pytest.approx(3 * R / 8)
    assert kernels.translate_identity_check(kernels.make_hann(), R) == pytest.approx(3 * R / 8)


def test_blackman_constant_R5():
    assert kernels.translate_identity_check(kernels.make_blackman(), 5) == pytest.approx(
        5 * 0.42**2 + 2.5 * (0.5**2 + 0.08**2), rel=1e-12)


def test_identity_check_requires_R_above_2K():
    with pytest.raises(ParameterError):
        kernels.translate_identity_check(kernels.make_blackman(), 4)


def test_smoothness_orders():
    assert kernels.window_smoothness(kernels.make_hann()) == 1
    assert kernels.window_smoothness(kernels.make_blackman()) == 1
    # null vector of the K = 2 constraint matrix is C^3
    A = kernels.smoothness_constraints(2)
    _, _, vt = np.linalg.svd(A)
    a = vt[-1] / vt[-1][0] * 0.375
    assert kernels.window_smoothness(CosineWindow(tuple(a))) == 3
    np.testing.assert_allclose(a, [0.375, 0.5, 0.125], atol=1e-12)


def test_uniform_translates_supports():
    bank = kernels.uniform_translates(kernels.make_hann(), 12.0, 9, 3)
    d = 12.0 / (9 + 1 - 3)
    for m, g in enumerate(bank.kernels, 1):
        assert g.support == pytest.approx(((m - 3) * d, m * d))
    assert bank.tightness_error() < 1e-12
    assert bank.frame_constant == pytest.approx(9 / 8)


@pytest.mark.parametrize("M, R", [(3, 2), (3, 4), (5, 2)])
def test_uniform_translates_parameter_checks(M, R):
    with pytest.raises(ParameterError, match="2 < R <= M"):
        kernels.uniform_translates(kernels.make_hann(), 1.0, M, R)


def test_blackman_needs_R_above_4():
    with pytest.raises(ParameterError, match="K < R/2"):
        kernels.uniform_translates(kernels.make_blackman(), 1.0, 8, 4)


def test_half_open_support():
    g = kernels.CosineBase(kernels.make_hann(), 1.0, 2.0)
    assert g(np.array([1.0]))[0] == pytest.approx(0.0, abs=1e-15)
    assert g(np.array([3.0]))[0] == 0.0
    assert g(np.array([2.0]))[0] == pytest.approx(1.0)


def test_log_wavelet_bank_is_tight_and_vanishes_at_zero():
    bank = kernels.log_wavelet_bank(kernels.make_hann(), 8.0, 6, 3)
    assert bank.tightness_error() < 1e-12
    vals = bank.evaluate(np.array([0.0]))
    assert vals[0, 0] == pytest.approx(math.sqrt(bank.frame_constant))
    assert np.all(vals[1:, 0] == 0)
    lam = np.linspace(0, 8, 5000)
    assert np.all(bank.evaluate(lam) >= 0)


def test_log_wavelet_bank_needs_lambda_above_one():
    with pytest.raises(ParameterError):
        kernels.log_wavelet_bank(kernels.make_hann(), 0.9, 6, 3)


def test_spectrum_adapted_bank_endpoint_check():
    with pytest.raises(ParameterError):
        kernels.spectrum_adapted_wavelet_bank(kernels.make_hann(), lambda x: 0.5 * np.asarray(x),
                                              4.0, 6, 3)
    bank = kernels.spectrum_adapted_wavelet_bank(
        kernels.make_hann(), lambda x: 4.0 * np.sqrt(np.asarray(x) / 4.0), 4.0, 6, 3)
    assert bank.tightness_error() < 1e-12


def test_warp_range_checked():
    bank = kernels.uniform_translates(kernels.make_hann(), 1.0, 5, 3)
    with pytest.raises(ParameterError):
        kernels.warp_bank(bank, lambda x: 2 * np.asarray(x), 1.0)
    with pytest.raises(ParameterError):
        kernels.warp_bank(bank, lambda x: 1 - np.asarray(x), 1.0)


def test_scaling_complement_clamps_and_rejects():
    c = kernels.ScalingComplement((kernels.ConstantKernel(1.0),), 1.0)
    assert c(np.array([0.3]))[0] == 0.0
    bad = kernels.ScalingComplement((kernels.ConstantKernel(2.0),), 1.0)
    with pytest.raises(Exception):
        bad(np.array([0.3]))


def test_chebyshev_reproduces_polynomials():
    p = np.polynomial.Polynomial([1.0, -2.0, 0.5, 0.1])
    approx = kernels.chebyshev_fit(p, (0.0, 3.0), 5)
    x = np.linspace(0, 3, 50)
    np.testing.assert_allclose(approx(x), p(x), atol=1e-12)
    A = np.diag([0.0, 1.0, 2.5])
    f = np.array([1.0, -1.0, 2.0])
    np.testing.assert_allclose(approx.apply(A, f), p(np.diag(A)) * f, atol=1e-12)


def test_eval_kernel_rejects_negative():
    with pytest.raises(ParameterError):
        kernels.eval_kernel(kernels.make_hann(), np.array([-1.0]))


windows = st.sampled_from([kernels.make_hann(), kernels.make_blackman(),
                           CosineWindow((0.375, 0.5, 0.125))])


@settings(max_examples=60, deadline=None)
@given(windows, st.integers(5, 12), st.integers(0, 8), st.floats(0.5, 50.0))
def test_uniform_translates_sum_to_constant(w, R, extra, gamma):
    M = R + extra
    bank = kernels.uniform_translates(w, gamma, M, R)
    lam = np.linspace(0, gamma, 2000)
    G = bank.G(lam)
    assert np.abs(G - bank.frame_constant).max() <= 1e-12 * bank.frame_constant * 10


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10), st.floats(1.5, 100.0), st.data())
def test_log_wavelets_tight(R, lmax, data):
    M = data.draw(st.integers(R + 1, R + 8))
    bank = kernels.log_wavelet_bank(kernels.make_hann(), lmax, M, R)
    assert bank.tightness_error(3000) <= 1e-12


def test_chebyshev_error_drops_tenfold_from_20_to_160():
    bank = kernels.uniform_translates(kernels.make_hann(), 4.0, 8, 3)
    grid = np.linspace(0, 4.0, 5000)
    for g in bank.kernels:
        e20 = np.abs(kernels.chebyshev_fit(g, (0.0, 4.0), 20)(grid) - g(grid)).max()
        e160 = np.abs(kernels.chebyshev_fit(g, (0.0, 4.0), 160)(grid) - g(grid)).max()
        assert e160 * 10 <= e20
