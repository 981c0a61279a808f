"""The rescaled characteristic-polynomial ratio ``xi_n`` and its limit.

``xi_n(z) = Z_n(exp(2 i pi z / n)) / Z_n(1)`` with ``Z_n(X) = det(X - U_n)``.
Two evaluation routes are provided: the finite product over the spectrum
(:func:`xi_direct`) and the regrouped product over rescaled points
(:func:`xi_product`), which also defines the ``xi_infinity`` approximant.
Everything is accumulated as a sum of logarithms and exponentiated once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPoints, NearUnityEigenvalue
from .spectrum import UNITY_TOL, RescaledPointSet, Spectrum

__all__ = [
    "XiEvaluation",
    "GrowthProfile",
    "xi_direct",
    "xi_product",
    "xi_infinity_approx",
    "product_tail_estimate",
    "functional_equation_residual",
    "growth_profile",
    "log_abs_xi_imaginary_axis",
]


@dataclass(frozen=True)
class XiEvaluation:
    z: complex | np.ndarray
    value: complex | np.ndarray
    method: str
    A: int | None = None
    tail_bound: float | np.ndarray | None = None
    tail_constant: float | np.ndarray | None = None


def _unwrap(x):
    return complex(x) if np.ndim(x) == 0 else x


def _log_factor_direct(w, log_w, lam):
    """log(w - lam) for arrays w (shape S) and lam (shape n), summed over lam.

    For |w| > 1 the factor is rewritten as w (1 - lam / w) to avoid overflow.
    """
    big = np.abs(w) > 1.0
    out = np.empty(w.shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        if np.any(~big):
            ws = w[~big][..., None]
            out[~big] = np.log(ws - lam).sum(axis=-1)
        if np.any(big):
            wb = w[big][..., None]
            out[big] = lam.size * log_w[big] + np.log1p(-lam / wb).sum(axis=-1)
    return out


def xi_direct(spec: Spectrum, z) -> XiEvaluation:
    """``prod_k (e^{2 i pi z/n} - e^{i theta_k}) / (1 - e^{i theta_k})``."""
    if spec.gap_to_one <= UNITY_TOL:
        raise NearUnityEigenvalue("eigenvalue too close to 1; Z_n(1) is unstable")
    z_arr = np.asarray(z, dtype=complex)
    zz = np.atleast_1d(z_arr)
    lam = spec.eigenvalues
    log_w = 2j * np.pi * zz / spec.n
    w = np.exp(log_w)
    num = _log_factor_direct(w, log_w, lam)
    den = np.log(1.0 - lam).sum()
    with np.errstate(invalid="ignore"):
        val = np.exp(num - den)
    val = np.where(np.isneginf(num.real), 0.0, val)
    # exact at z = 0: numerator and denominator are the same numbers
    val = val.reshape(z_arr.shape)
    return XiEvaluation(_unwrap(z_arr), _unwrap(val), "direct")


def _one_minus_ratio(z, y):
    # 1 - z / y in real arithmetic: exact 1 at z = 0, exact 0 at z = y.
    # A point at infinity contributes the factor 1.
    with np.errstate(invalid="ignore"):
        re = np.where(np.isinf(y), 1.0, (y - z.real) / y)
        im = np.where(np.isinf(y), 0.0, -z.imag / y)
    return re + 1j * im


def _pair_log_sum(points, zz, A):
    neg, y0, pos = points.symmetric(A)
    if y0 == 0.0 or np.any(pos == 0.0) or np.any(neg == 0.0):
        raise InvalidPoints("a rescaled point equals 0")
    zc = zz[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        pair = np.log(_one_minus_ratio(zc, pos) * _one_minus_ratio(zc, neg)).sum(axis=-1)
        head = np.log(_one_minus_ratio(zz, y0))
    return head + pair


def product_tail_estimate(points: RescaledPointSet, z, A: int, partial=None):
    """Estimate of ``|prod_{|k|<=A} - prod_{k in Z}|`` for the paired product.

    With ``d`` bounding ``|y_k - k|`` (exact for periodized sets), the
    neglected pairs contribute ``log(1 + u)`` with
    ``|u| <~ (2 d |z| + |z|^2) / (A - d)``. Returns ``(bound, c)`` where
    ``bound = c log A / A``.
    """
    d = points.deviation_bound()
    az = np.abs(np.asarray(z))
    if A <= d + 1:
        bound = np.full(az.shape, np.inf)
    else:
        t = (2.0 * d * az + az**2) / (A - d - 1)
        mag = np.ones_like(az) if partial is None else np.abs(partial)
        bound = mag * np.expm1(t)
    c = bound * A / max(np.log(A), 1.0)
    return bound, c


def xi_product(points: RescaledPointSet, z, A: int) -> XiEvaluation:
    """``e^{i pi z} (1 - z/y_0) prod_{k=1..A} (1 - z/y_k)(1 - z/y_{-k})``."""
    if A < 0:
        raise ValueError("A must be >= 0")
    z_arr = np.asarray(z, dtype=complex)
    zz = np.atleast_1d(z_arr)
    logs = 1j * np.pi * zz + _pair_log_sum(points, zz, A)
    with np.errstate(invalid="ignore"):
        val = np.where(np.isneginf(logs.real), 0.0, np.exp(logs))
    bound, c = product_tail_estimate(points, zz, A, partial=val)
    val = val.reshape(z_arr.shape)
    return XiEvaluation(
        _unwrap(z_arr), _unwrap(val), "product", A,
        bound.reshape(z_arr.shape) if z_arr.ndim else float(bound[0]),
        c.reshape(z_arr.shape) if z_arr.ndim else float(c[0]),
    )


def xi_infinity_approx(terminal_points: RescaledPointSet, z, A: int) -> XiEvaluation:
    """Approximant of ``xi_infinity`` built on the terminal snapshot's points.

    ``y_k`` is replaced by ``y_k^{(N)}`` for the largest simulated ``N``; the
    coupling makes ``y_k^{(N)} -> y_k`` almost surely.
    """
    ev = xi_product(terminal_points, z, A)
    return XiEvaluation(ev.z, ev.value, "product", ev.A, ev.tail_bound, ev.tail_constant)


def functional_equation_residual(spec: Spectrum, z) -> float:
    """``|conj-coeff Z_n(1/z) - z^{-n} (-1)^n det(U^{-1}) Z_n(z)|``."""
    z = complex(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    lam = spec.eigenvalues
    n = spec.n
    lhs = np.prod(1.0 / z - lam.conj())
    rhs = z ** (-n) * (-1) ** n * np.prod(lam.conj()) * np.prod(z - lam)
    return float(abs(lhs - rhs))


def log_abs_xi_imaginary_axis(points: RescaledPointSet, x, A: int, include_exponential=False):
    """``(1/2) sum_{|k|<=A} log(1 + x^2 / y_k^2)``.

    This is ``log |prod_k (1 - i x / y_k)|``. With ``include_exponential`` the
    modulus ``|e^{i pi (i x)}| = e^{-pi x}`` of the prefactor is added, giving
    ``log |xi(i x)|`` itself.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    neg, y0, pos = points.symmetric(A)
    inv2 = np.concatenate([neg, [y0], pos]) ** -2.0
    out = np.empty(x.shape)
    for i, xi in enumerate(x):
        out[i] = 0.5 * np.log1p(xi * xi * inv2).sum()
    if include_exponential:
        out = out - np.pi * x
    return out


@dataclass(frozen=True)
class GrowthProfile:
    x: np.ndarray
    log_abs_xi: np.ndarray
    lower_constant: float
    upper_constant: float

    @property
    def lower_envelope(self):
        return self.lower_constant * np.abs(self.x)

    @property
    def upper_envelope(self):
        ax = np.abs(self.x)
        return self.upper_constant * ax * np.log(2.0 + ax)

    def rows(self):
        return list(zip(self.x, self.log_abs_xi, self.lower_envelope, self.upper_envelope))


def growth_profile(points: RescaledPointSet, x_values, A: int) -> GrowthProfile:
    """``log |xi(i x)|`` on the imaginary axis with fitted order-one envelopes.

    ``c = min log|xi(ix)| / |x|`` and ``C = max log|xi(ix)| / (|x| log(2+|x|))``
    over the nonzero ``x`` supplied, so both envelopes touch the data.
    """
    x = np.asarray(x_values, dtype=float)
    vals = log_abs_xi_imaginary_axis(points, x, A)
    nz = x != 0
    ax = np.abs(x[nz])
    if nz.any():
        c = float(np.min(vals[nz] / ax))
        C = float(np.max(vals[nz] / (ax * np.log(2.0 + ax))))
    else:
        c = C = float("nan")
    return GrowthProfile(x, vals, c, C)
