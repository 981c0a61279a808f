import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xi_limit.errors import NearDegenerateSpectrum, NearUnityEigenvalue
from xi_limit.spectrum import Spectrum, eigenangles, periodized_angle, rescaled_points

TWO_PI = 2 * np.pi

angle_sets = st.lists(
    st.floats(1e-6, TWO_PI - 1e-6), min_size=1, max_size=20, unique=True
).filter(lambda a: len(a) < 2 or np.diff(np.sort(a)).min() > 1e-9)


def test_diagonal_angles():
    spec = eigenangles(np.diag([1j, -1]))
    assert np.allclose(spec.theta, [np.pi / 2, np.pi], atol=1e-12)


def test_scalar_multiple_of_identity_is_degenerate():
    with pytest.raises(NearDegenerateSpectrum) as info:
        eigenangles(np.exp(0.7j) * np.eye(3))
    assert info.value.min_gap < 1e-12


def test_eigenvalue_at_one_rejected():
    with pytest.raises(NearUnityEigenvalue):
        eigenangles(np.diag([1.0, -1.0]))


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        eigenangles(np.diag([2.0, 0.5]))


def test_angle_sum_matches_det():
    from xi_limit.ensemble import grow_replica

    chain, spectra = grow_replica(11, 0, [8])
    d = np.angle(np.linalg.det(chain.snapshots[8].dense))
    diff = (spectra[8].theta.sum() - d) % TWO_PI
    assert min(diff, TWO_PI - diff) <= 1e-8


def test_periodized_angle():
    spec = Spectrum.from_angles([1.0, 2.0, 3.0])
    assert periodized_angle(spec, 1) == 1.0
    assert periodized_angle(spec, 4) == 1.0 + TWO_PI
    assert periodized_angle(spec, 0) == 3.0 - TWO_PI
    assert np.allclose(periodized_angle(spec, np.array([-2, 7])), [1.0 - TWO_PI, 1.0 + 2 * TWO_PI])


def test_rescaled_small_fixture():
    spec = Spectrum.from_angles([np.pi / 2, np.pi, 3 * np.pi / 2, 7 * np.pi / 4])
    pts = rescaled_points(spec, 8)
    assert np.allclose(pts.y([1, 2, 3, 4]), [1, 2, 3, 3.5], atol=1e-14)
    assert abs(pts.y(5) - 5.0) <= 1e-14
    assert pts.shift(5) == 4 and pts.shift(0) == -4
    with pytest.raises(IndexError):
        pts.y(9)
    with pytest.raises(ValueError):
        rescaled_points(spec, 0)


def test_mean_spacing(haar_spectrum):
    pts = rescaled_points(haar_spectrum(512), 64)
    assert abs((pts.y(64) - pts.y(-64)) / 128 - 1) <= 0.2


def test_count_consistency(haar_spectrum):
    spec = haar_spectrum(64)
    pts = rescaled_points(spec, 200)
    for A in [0.5, 3.0, 17.25, 63.9]:
        a = np.count_nonzero((pts.values >= 0) & (pts.values <= A))
        b = np.count_nonzero(spec.theta <= TWO_PI * A / 64)
        assert a == b


def test_reconstruction(haar_spectrum):
    spec = haar_spectrum(32)
    assert abs(abs(np.prod(-spec.eigenvalues)) - 1) <= 1e-8


def test_conjugate_spectrum():
    spec = Spectrum.from_angles([0.5, 2.0])
    assert np.allclose(spec.conjugate().theta, [TWO_PI - 2.0, TWO_PI - 0.5])


@given(angles=angle_sets, K=st.integers(1, 50))
@settings(max_examples=80, deadline=None)
def test_rescaled_invariants(angles, K):
    spec = Spectrum.from_angles(angles)
    n = spec.n
    pts = rescaled_points(spec, K)
    assert np.all(np.diff(pts.values) > 0)
    assert pts.y(0) < 0 < pts.y(1)
    k = np.arange(-K, K + 1 - n)
    if k.size:
        assert np.all(pts.shift(k + n) - pts.shift(k) == n)
        assert np.allclose(pts.y(k + n) - pts.y(k), n, rtol=0, atol=1e-12 * (K + n))
    for j in range(1, min(n, K) + 1):
        assert np.isclose(pts.y(j), n * periodized_angle(spec, j) / TWO_PI, rtol=1e-15)
