import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xi_limit.errors import InsufficientReplicas, NotCoupled, WindowTooSmall
from xi_limit.ensemble import grow_replica
from xi_limit.sine_stats import (
    bernstein_bound,
    count_in_interval,
    coupling_error_profile,
    deviation_profile,
    empirical_pair_correlation,
    interval_counts,
    rho2_sine,
    sine_kernel_determinant,
    variance_profile,
)
from xi_limit.spectrum import RescaledPointSet, Spectrum, rescaled_points


def test_count_in_interval(haar_spectrum):
    spec = haar_spectrum(64)
    pts = rescaled_points(spec, 200)
    assert count_in_interval(pts, 0, 64) == 64
    gap = 0.5 * (pts.y(3) + pts.y(4))
    assert count_in_interval(pts, gap, gap) == 0
    with pytest.raises(WindowTooSmall):
        count_in_interval(pts, 0, 1000)
    with pytest.raises(ValueError):
        count_in_interval(pts, 2, 1)


def test_interval_counts_agree_with_points(haar_spectrum):
    spec = haar_spectrum(64)
    pts = rescaled_points(spec, 200)
    A = np.array([1.0, 5.5, 8.0])
    offs = [0.0, 13.3, 60.0]
    got = interval_counts(spec, A, offs)
    for i, o in enumerate(offs):
        for j, a in enumerate(A):
            assert got[i, j] == count_in_interval(pts, o, o + a)


def test_sine_determinant_values():
    assert sine_kernel_determinant([0.3]) == 1.0
    assert abs(sine_kernel_determinant([0.7, 0.7])) <= 1e-15
    assert np.isclose(sine_kernel_determinant([0.0, 0.5]), 1 - 4 / np.pi**2, atol=1e-14)
    assert np.isclose(rho2_sine(0.5), 1 - 4 / np.pi**2)
    with pytest.raises(ValueError):
        sine_kernel_determinant([])


@given(x=st.lists(st.floats(-5, 5), min_size=1, max_size=6))
@settings(max_examples=60, deadline=None)
def test_sine_determinant_symmetric_and_nonnegative(x):
    d = sine_kernel_determinant(x)
    assert d >= -1e-12
    assert np.isclose(d, sine_kernel_determinant(x[::-1]), atol=1e-12)


def test_deviation_profile_fixtures():
    K = 50
    k = np.arange(-K, K + 1, dtype=float)
    assert deviation_profile(RescaledPointSet.from_values(-K, k - 0.5 * (k == 0))) == 0.0
    shifted = k.copy()
    shifted[-1] = K + np.log(2 + K)
    assert np.isclose(deviation_profile(RescaledPointSet.from_values(-K, shifted)), 1.0)


def test_bernstein_bound():
    assert bernstein_bound(0.0, 1.0) == 2.0
    assert np.isclose(bernstein_bound(2.0, 1.0), 2 * np.exp(-1.0))
    assert np.isclose(bernstein_bound(10.0, 100.0), 2 * np.exp(-0.25))


def test_coupling_checks():
    _, a = grow_replica(5, 0, [16, 256])
    _, b = grow_replica(5, 1, [256])
    with pytest.raises(NotCoupled):
        coupling_error_profile(a[16], b[256], 2)
    with pytest.raises(NotCoupled):
        coupling_error_profile(Spectrum(a[16].theta), Spectrum(a[256].theta), 2)
    with pytest.raises(ValueError):
        coupling_error_profile(a[16], a[256], 3)
    prof = coupling_error_profile(a[16], a[256], 2)
    assert prof.constant > 0 and len(prof.rows()) == 5


def test_minimum_replicas(haar_spectrum):
    specs = [haar_spectrum(64, replica=r) for r in range(10)]
    with pytest.raises(InsufficientReplicas):
        variance_profile(specs, [2, 4])
    with pytest.raises(InsufficientReplicas):
        empirical_pair_correlation(specs, 8)


def test_poisson_points_fail_pair_correlation():
    # independent uniform angles have rho2 = 1, which the chi^2 test must reject
    g = np.random.default_rng(0)
    specs = [Spectrum.from_angles(g.uniform(0, 2 * np.pi, 128)) for _ in range(300)]
    pc = empirical_pair_correlation(specs, 16)
    assert pc.p_value < 1e-3
    var = variance_profile(specs, [2, 4, 8, 16])
    # Poisson counts have variance A, far above the sine-process slope
    assert var.slope > 1.0
