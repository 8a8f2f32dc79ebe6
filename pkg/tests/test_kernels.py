import math

import numpy as np
import pytest

from wavesurge.kernels import SmoothingKernel, kernel_eval


def midpoint_disk_integral(ell: float, n_radial: int = 10_000) -> float:
    """Oracle: midpoint quadrature of W over its support disk.

    The kernel is radially symmetric, so the angular integral is exactly
    2 pi and the polar grid reduces to n_radial midpoint nodes in r.
    """
    dr = 2.0 * ell / n_radial
    r = (np.arange(n_radial) + 0.5) * dr
    w = np.array([kernel_eval(ri, ell)[0] for ri in r])
    return float((w * r).sum() * dr * 2.0 * math.pi)


def test_compact_support_boundary():
    w, dw = kernel_eval(2.0 * 0.0195, 0.0195)
    assert w == 0.0
    assert dw == 0.0
    w, dw = kernel_eval(5.0, 0.0195)
    assert w == 0.0 and dw == 0.0


def test_peak_at_zero_separation():
    ell = 0.0195
    w0, dw0 = kernel_eval(0.0, ell)
    assert dw0 == 0.0
    rs = np.linspace(1e-6, 2 * ell, 200)
    assert all(kernel_eval(r, ell)[0] < w0 for r in rs)
    assert w0 == pytest.approx(7.0 / (4.0 * math.pi * ell**2))


@pytest.mark.parametrize("ell", [0.5, 0.0195, 3.7])
def test_unit_normalization(ell):
    assert midpoint_disk_integral(ell) == pytest.approx(1.0, abs=1e-6)


def test_gradient_matches_finite_difference():
    ell = 0.7
    for r in [0.1, 0.35, 0.9, 1.3]:
        h = 1e-6
        fd = (kernel_eval(r + h, ell)[0] - kernel_eval(r - h, ell)[0]) / (2 * h)
        assert kernel_eval(r, ell)[1] == pytest.approx(fd, rel=1e-7)


def test_kernel_nonnegative_and_monotone_support():
    ell = 1.0
    r = np.linspace(0, 3 * ell, 500)
    vals = np.array([kernel_eval(ri, ell)[0] for ri in r])
    assert (vals >= 0).all()
    assert (vals[r >= 2 * ell] == 0).all()


def test_invalid_arguments():
    with pytest.raises(ValueError):
        kernel_eval(0.1, 0.0)
    with pytest.raises(ValueError):
        kernel_eval(0.1, -1.0)
    with pytest.raises(ValueError):
        kernel_eval(0.1, float("nan"))
    with pytest.raises(ValueError):
        kernel_eval(-0.1, 1.0)
    with pytest.raises(ValueError):
        SmoothingKernel(float("inf"))


def test_bound_kernel_properties():
    k = SmoothingKernel(0.0195)
    assert k.cutoff_radius == pytest.approx(0.039)
    assert k(0.0)[0] == pytest.approx(k.normalization)
