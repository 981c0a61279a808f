"""Argument of ``Z_n`` on the unit circle, zero counting, and the law of ``X_n``.

The determination of ``log Z_n`` is the one continuous on the plane cut along
the rays ``{r e^{i theta_k}, r >= 1}`` with ``log Z_n(0)`` in ``i(-pi, pi]``.
On the circle each factor ``log(1 - e^{i phi}/lambda_k)`` is principal and has
imaginary part ``(psi_k - pi)/2`` with ``psi_k = (phi - theta_k) mod 2 pi``,
so the profile is exact and piecewise linear.
"""
from __future__ import annotations

import numpy as np
from scipy.special import loggamma

from .errors import FormulaInconsistency, OnBranchCut
from .spectrum import Spectrum, periodized_angle

__all__ = [
    "CHERNOFF_C",
    "im_log_Z0",
    "im_log_Z",
    "x_n",
    "count_zeros_arc",
    "count_direct",
    "index_identity_residual",
    "profile_extrema",
    "arg_supremum",
    "mgf_exact",
    "chernoff_bound",
]

TWO_PI = 2.0 * np.pi
CUT_TOL = 1e-13
COUNT_RESIDUAL_TOL = 1e-6
CHERNOFF_C = np.pi**2 / 6.0 + 1.0


def im_log_Z0(spec: Spectrum) -> float:
    """Principal argument of ``Z_n(0) = (-1)^n e^{i sum theta_k}``."""
    total = np.mod(np.sum(spec.theta) + np.pi * spec.n, TWO_PI)
    # map [0, 2 pi) onto (-pi, pi]
    return float(total - TWO_PI) if total > np.pi else float(total)


def im_log_Z(spec: Spectrum, phi):
    """``Im log Z_n(e^{i phi})``; ``phi`` may be an array."""
    phi_arr = np.asarray(phi, dtype=float)
    p = np.atleast_1d(phi_arr)[:, None]
    psi = np.mod(p - spec.theta[None, :], TWO_PI)
    dist = np.minimum(psi, TWO_PI - psi)
    if np.any(dist < CUT_TOL):
        raise OnBranchCut("evaluation point lies on an eigenvalue ray")
    out = im_log_Z0(spec) + 0.5 * (psi - np.pi).sum(axis=1)
    return float(out[0]) if phi_arr.ndim == 0 else out.reshape(phi_arr.shape)


def x_n(spec: Spectrum) -> float:
    """``X_n = Im(log Z_n(1) - log Z_n(0)) = sum_k (pi - theta_k) / 2``."""
    return float(0.5 * np.sum(np.pi - spec.theta))


def count_zeros_arc(spec: Spectrum, phi_a, phi_b):
    """Zeros of ``Z_n`` on the counterclockwise arc from ``phi_a`` to ``phi_b``.

    Uses ``N = n l / (2 pi) - (Im log Z(B) - Im log Z(A)) / pi`` and checks that
    the right-hand side is an integer to within 1e-6.
    """
    a = np.asarray(phi_a, dtype=float)
    b = np.asarray(phi_b, dtype=float)
    length = np.mod(b - a, TWO_PI)
    raw = spec.n * length / TWO_PI - (im_log_Z(spec, b) - im_log_Z(spec, a)) / np.pi
    count = np.rint(raw)
    resid = np.max(np.abs(raw - count)) if np.size(raw) else 0.0
    if resid >= COUNT_RESIDUAL_TOL:
        raise FormulaInconsistency(f"counting formula off an integer by {resid:.3e}")
    count = count.astype(np.int64)
    return int(count) if count.ndim == 0 else count


def count_direct(spec: Spectrum, phi_a, phi_b):
    """Reference count of eigenangles strictly inside the arc."""
    a = np.atleast_1d(np.asarray(phi_a, dtype=float))[:, None]
    b = np.atleast_1d(np.asarray(phi_b, dtype=float))[:, None]
    length = np.mod(b - a, TWO_PI)
    offset = np.mod(spec.theta[None, :] - a, TWO_PI)
    out = np.sum(offset < length, axis=1)
    return int(out[0]) if np.ndim(phi_a) == 0 and np.ndim(phi_b) == 0 else out


def index_identity_residual(spec: Spectrum, k: int) -> float:
    """``|k - y_k + (Im log Z(e^{i(theta_k+eps)}) - Im log Z(e^{i eps})) / pi|``.

    ``eps`` is half of the smaller of the gap ``(0, theta_1)`` and the gap
    following ``theta_k``.
    """
    n = spec.n
    theta_k = periodized_angle(spec, k)
    gap_after = periodized_angle(spec, k + 1) - theta_k
    eps = 0.5 * min(spec.theta[0], gap_after)
    y_k = n * theta_k / TWO_PI
    delta = im_log_Z(spec, theta_k + eps) - im_log_Z(spec, eps)
    return float(abs(k - y_k + delta / np.pi))


def profile_extrema(spec: Spectrum):
    """One-sided limits of the argument profile at each eigenangle.

    Returns ``(left, right)``: ``left[k]`` is the limit as ``phi -> theta_k``
    from below (local maximum), ``right[k]`` from above (local minimum).
    O(n) via ``sum_j (theta_k - theta_j) mod 2 pi = n theta_k - S + 2 pi #{j > k}``.
    """
    n = spec.n
    th = spec.theta
    idx = np.arange(n)
    psi_sum = n * th - th.sum() + TWO_PI * (n - 1 - idx)
    right = im_log_Z0(spec) + 0.5 * (psi_sum - n * np.pi)
    return right + np.pi, right


def arg_supremum(spec: Spectrum) -> float:
    """Exact ``sup_{|z|=1} |Im log Z_n(z)|`` from the piecewise-linear profile."""
    left, right = profile_extrema(spec)
    return float(max(np.max(np.abs(left)), np.max(np.abs(right))))


def mgf_exact(n: int, lam) -> float:
    """``E exp(lam X_n) = prod_{k<=n} Gamma(k)^2 / |Gamma(k + i lam / 2)|^2``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(1, n + 1, dtype=float)
    lam_arr = np.asarray(lam, dtype=float)
    lg = loggamma(k[:, None] + 0.5j * np.atleast_1d(lam_arr)[None, :]).real
    base = loggamma(k + 0j).real[:, None]
    log_m = np.sum(2.0 * base - 2.0 * lg, axis=0)
    out = np.exp(log_m)
    return float(out[0]) if lam_arr.ndim == 0 else out.reshape(lam_arr.shape)


def chernoff_bound(n: int, x):
    """``2 exp(-x^2 / (C + log n))`` with ``C = pi^2/6 + 1``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be > 0")
    out = 2.0 * np.exp(-(x**2) / (CHERNOFF_C + np.log(n)))
    return float(out) if out.ndim == 0 else out
