import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xi_limit.errors import InvalidPoints, NearUnityEigenvalue
from xi_limit.spectrum import RescaledPointSet, Spectrum, rescaled_points
from xi_limit.xi import (
    functional_equation_residual,
    growth_profile,
    log_abs_xi_imaginary_axis,
    xi_direct,
    xi_product,
)

HALF_TURN = Spectrum.from_angles([np.pi])


def test_xi_at_zero_is_exactly_one(haar_spectrum):
    spec = haar_spectrum(64)
    assert xi_direct(spec, 0).value == 1
    assert xi_product(rescaled_points(spec, 500), 0, 500).value == 1


def test_vanishes_at_rescaled_points(haar_spectrum):
    spec = haar_spectrum(32)
    pts = rescaled_points(spec, 200)
    for k in [-40, -1, 0, 1, 7, 33]:
        assert abs(xi_direct(spec, pts.y(k)).value) <= 1e-10
    for k in [-200, 0, 1, 150]:
        assert xi_product(pts, pts.y(k), 200).value == 0


def test_single_half_turn_closed_form():
    z = np.array([0.0, 0.25, 0.5, 1 + 1j, -0.3 - 0.7j])
    expect = (np.exp(2j * np.pi * z) + 1) / 2
    got = xi_direct(HALF_TURN, z).value
    assert np.allclose(got, expect, rtol=1e-13, atol=1e-15)
    assert abs(xi_direct(HALF_TURN, 0.5).value) <= 1e-15


def test_large_imaginary_part_does_not_overflow(haar_spectrum):
    v = xi_direct(haar_spectrum(16), -40j).value
    assert np.isfinite(v)


def test_rejects_eigenvalue_at_one():
    spec = Spectrum.from_angles([1e-13, 2.0], check_unity=False)
    with pytest.raises(NearUnityEigenvalue):
        xi_direct(spec, 0.3)


def test_zero_point_rejected():
    pts = RescaledPointSet.from_values(-1, [-1.0, 0.0, 1.0])
    with pytest.raises(InvalidPoints):
        xi_product(pts, 0.5, 1)


def test_functional_equation_small():
    assert functional_equation_residual(HALF_TURN, 2.0) <= 1e-14
    with pytest.raises(ValueError):
        functional_equation_residual(HALF_TURN, 0)


def test_functional_equation_on_circle(haar_spectrum):
    spec = haar_spectrum(64)
    assert functional_equation_residual(spec, 1.0) <= 1e-10 * 64
    for phi in np.linspace(0.1, 6.0, 25):
        assert functional_equation_residual(spec, np.exp(1j * phi)) <= 1e-10 * 64


def test_conjugation_symmetry(haar_spectrum):
    # the conjugate spectrum has rescaled points -y_k, so
    # xi_conj(-conj z) = conj xi(z)
    spec = haar_spectrum(48)
    z = np.array([0.3 + 0.2j, -1.7 + 0.9j, 2.2 - 1.1j])
    lhs = xi_direct(spec.conjugate(), -np.conj(z)).value
    assert np.allclose(lhs, np.conj(xi_direct(spec, z).value), rtol=0, atol=1e-10)


def test_product_converges_to_direct(haar_spectrum):
    spec = haar_spectrum(64)
    z = 1 + 1j
    exact = xi_direct(spec, z).value
    pts = rescaled_points(spec, 64 * 64)
    errs = []
    for A in [64, 256, 1024, 4096]:
        ev = xi_product(pts, z, A)
        err = abs(ev.value - exact)
        assert err <= ev.tail_bound
        errs.append(err)
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_xi_infinity_is_real_on_real_axis_up_to_phase(haar_spectrum):
    pts = rescaled_points(haar_spectrum(64), 1000)
    x = 0.37
    v = xi_product(pts, x, 1000).value
    assert abs(np.angle(v * np.exp(-1j * np.pi * x))) <= 1e-12 or abs(
        abs(np.angle(v * np.exp(-1j * np.pi * x))) - np.pi
    ) <= 1e-12


def _sinh_fixture(A):
    vals = np.arange(-A, A + 1, dtype=float)
    vals[A] = -0.5
    return RescaledPointSet.from_values(-A, vals)


def test_growth_matches_sinh_oracle():
    A = 10**7
    x = 2.0
    got = log_abs_xi_imaginary_axis(_sinh_fixture(A), x, A)[0]
    expect = 0.5 * np.log(1 + 4 * x * x) + np.log(np.sinh(np.pi * x) / (np.pi * x))
    assert abs(got - expect) <= 1e-6


def test_growth_at_zero_and_exponential_flag():
    pts = _sinh_fixture(1000)
    assert log_abs_xi_imaginary_axis(pts, 0.0, 1000)[0] == 0.0
    a = log_abs_xi_imaginary_axis(pts, 1.5, 1000)[0]
    b = log_abs_xi_imaginary_axis(pts, 1.5, 1000, include_exponential=True)[0]
    assert np.isclose(a - b, 1.5 * np.pi)
    # modulus on the imaginary axis agrees with the product evaluation
    ev = xi_product(pts, 1.5j, 1000).value
    assert np.isclose(np.log(abs(ev)), b, atol=1e-12)


def test_growth_envelopes(haar_spectrum):
    pts = rescaled_points(haar_spectrum(256), 20000)
    x = np.linspace(1, 40, 40)
    prof = growth_profile(pts, x, 20000)
    assert prof.lower_constant > 0
    assert np.all(prof.log_abs_xi >= prof.lower_envelope - 1e-12)
    assert np.all(prof.log_abs_xi <= prof.upper_envelope + 1e-12)
    assert len(prof.rows()) == 40


@given(z=st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False))
@settings(max_examples=60, deadline=None)
def test_reflection_in_real_axis_of_points(z):
    pts = rescaled_points(Spectrum.from_angles([0.4, 1.3, 2.9, 5.1]), 200)
    mirrored = RescaledPointSet.from_values(-200, -pts.values[::-1])
    a = xi_product(pts, z, 200).value
    b = xi_product(mirrored, -np.conj(z), 200).value
    assert np.isclose(b, np.conj(a), rtol=1e-9, atol=1e-12)
