"""Inverse power sums of the rescaled points and the rational functions R_alpha.

``R_alpha(X) = (X d/dX)^alpha (X+1)/(X-1)`` is built with exact integer
coefficient arithmetic. It turns periodized lattice sums into finite sums:

    sum_k (x + 2 pi k)^{-(alpha+1)} = i^{alpha+1}/2 * (-1)^alpha/alpha! * R_alpha(e^{ix})
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import PoleProximity, WindowTooSmall
from .spectrum import RescaledPointSet, Spectrum

__all__ = [
    "RationalFunction",
    "PowerSumResult",
    "r_alpha",
    "lattice_sum_closed_form",
    "power_sum_direct",
    "power_sum_closed_form",
    "compare_power_sums",
    "MAX_ALPHA",
]

MAX_ALPHA = 12
POLE_TOL = 1e-10
IMAG_TOL = 1e-10
_EPS = np.finfo(float).eps

# Polynomials are lists of Python ints, lowest degree first.


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _add(a, b):
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _scale(a, c):
    return _trim([c * x for x in a])


def _mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _deriv(a):
    return _trim([i * a[i] for i in range(1, len(a))] or [0])


def _shift(a):
    """Multiply by X."""
    return _trim([0] + list(a))


def _eval_int(a, x):
    return sum(c * x**i for i, c in enumerate(a))


def _divide_by_x_minus_1(a):
    """Synthetic division by (X - 1); caller guarantees a(1) == 0."""
    n = len(a) - 1
    q = [0] * n
    carry = 0
    for i in range(n, 0, -1):
        carry = a[i] + carry
        q[i - 1] = carry
    return _trim(q)


@dataclass(frozen=True)
class RationalFunction:
    """``num(X) / den(X)`` with integer coefficients, lowest degree first.

    When ``den == (X - 1)^pole_order`` the denominator is evaluated in
    factored form; the expanded form cancels catastrophically near ``X = 1``.
    """

    num: tuple
    den: tuple
    pole_order: int | None = None

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        top = P.polyval(x, np.array(self.num, dtype=float))
        if self.pole_order is not None:
            return top / (x - 1.0) ** self.pole_order
        return top / P.polyval(x, np.array(self.den, dtype=float))

    def on_circle(self, theta):
        """Evaluate at ``X = e^{i theta}``, with ``X - 1 = 2i sin(theta/2) e^{i theta/2}``."""
        theta = np.asarray(theta, dtype=float)
        x = np.exp(1j * theta)
        if self.pole_order is None:
            return self(x)
        top = P.polyval(x, np.array(self.num, dtype=float))
        return top / (2j * np.sin(theta / 2) * np.exp(0.5j * theta)) ** self.pole_order

    @property
    def degrees(self):
        return len(self.num) - 1, len(self.den) - 1

    def __str__(self):
        def fmt(p):
            return " + ".join(f"{c}*X^{i}" for i, c in enumerate(p) if c) or "0"

        return f"({fmt(self.num)}) / ({fmt(self.den)})"


def r_alpha(alpha: int) -> RationalFunction:
    """``(X d/dX)^alpha`` applied to ``(X+1)/(X-1)``, reduced.

    Keeping ``R = N / (X-1)^m``, one application of ``X d/dX`` gives
    ``X (N' (X-1) - m N) / (X-1)^{m+1}``.
    """
    if not 0 <= alpha <= MAX_ALPHA:
        raise ValueError(f"alpha must be in [0, {MAX_ALPHA}]")
    num, m = [1, 1], 1
    for _ in range(alpha):
        num = _shift(_add(_mul(_deriv(num), [-1, 1]), _scale(num, -m)))
        m += 1
    while m > 0 and _eval_int(num, 1) == 0 and num != [0]:
        num = _divide_by_x_minus_1(num)
        m -= 1
    den = [1]
    for _ in range(m):
        den = _mul(den, [-1, 1])
    return RationalFunction(tuple(num), tuple(den), m)


def lattice_sum_closed_form(alpha: int, x):
    """``sum_{k in Z} (x + 2 pi k)^{-(alpha+1)}`` (symmetric sum for alpha = 0)."""
    coef = (1j ** (alpha + 1)) / 2.0 * (-1) ** alpha / math.factorial(alpha)
    return coef * r_alpha(alpha).on_circle(x)


@dataclass(frozen=True)
class PowerSumResult:
    """``tail_bound`` covers truncation only; ``roundoff`` estimates float error."""

    alpha: int
    direct: float | None = None
    closed_form: float | None = None
    K: int | None = None
    tail_bound: float | None = None
    roundoff: float = 0.0

    def agrees(self):
        """Closed form and direct sum agree within truncation plus roundoff."""
        return self.abs_diff <= self.tail_bound + self.roundoff

    @property
    def abs_diff(self):
        if self.direct is None or self.closed_form is None:
            return None
        return abs(self.direct - self.closed_form)

    def as_dict(self):
        return {
            "alpha": self.alpha,
            "direct": self.direct,
            "closed_form": self.closed_form,
            "K": self.K,
            "tail_bound": self.tail_bound,
            "abs_diff": self.abs_diff,
            "roundoff": self.roundoff,
        }


def _tail_bound(alpha, K, d):
    # |y_k| >= |k| - d for all k; sum_{k>K} (k-d)^{-a} <= (K-d)^{1-a} / (a-1)
    if K <= d + 1:
        return math.inf
    if alpha >= 2:
        return 2.0 * (K - d) ** (1 - alpha) / (alpha - 1)
    # paired terms: |1/y_k + 1/y_{-k}| <= 2 d / (k - d)^2
    return 2.0 * d / (K - d - 1)


def power_sum_direct(points: RescaledPointSet, alpha: int, K: int) -> PowerSumResult:
    """``sum_{|k|<=K} y_k^{-alpha}``; for ``alpha = 1`` the terms are paired ``(k, -k)``."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if K > points.K:
        raise WindowTooSmall(f"K={K} exceeds materialized window K={points.K}")
    neg, y0, pos = points.symmetric(K)
    if alpha == 1:
        terms = np.concatenate([[1.0 / y0], 1.0 / pos + 1.0 / neg])
    else:
        terms = np.concatenate([[y0**-alpha], pos**-float(alpha), neg**-float(alpha)])
    y = np.concatenate([[y0], pos, neg])
    y = y[np.isfinite(y)]
    mag = np.abs(y) ** -float(alpha)
    mass = np.sum(mag)
    total = np.sum(terms)
    tail = _tail_bound(alpha, K, points.deviation_bound())
    # Each term carries a few ulps from the power plus summation error.
    # A periodized y_k = n theta / 2 pi + shift also has absolute error
    # ~ eps (n + |y_k|), which the power amplifies alpha-fold relative to |y_k|.
    scale = points.period or 0
    cond = alpha * np.sum(mag * (scale + np.abs(y)) / np.abs(y))
    roundoff = _EPS * ((32.0 * (alpha + 1) + np.log2(terms.size)) * mass + cond)
    return PowerSumResult(alpha, direct=float(total), K=K, tail_bound=tail, roundoff=float(roundoff))


def power_sum_closed_form(spec: Spectrum, alpha: int) -> PowerSumResult:
    """Exact ``sum_{k in Z} (y_k^{(n)})^{-(alpha+1)}`` as a finite sum over eigenvalues.

    Equals ``-(1 / (2 alpha!)) (-2 i pi / n)^{alpha+1} sum_k R_alpha(e^{i theta_k})``;
    ``alpha = 0`` gives the symmetric sum of ``1/y_k``. The result is reported
    in the ``alpha + 1`` slot, i.e. ``PowerSumResult.alpha == alpha + 1``.
    """
    if not 0 <= alpha <= MAX_ALPHA:
        raise ValueError(f"alpha must be in [0, {MAX_ALPHA}]")
    lam = spec.eigenvalues
    if np.min(np.abs(lam - 1.0)) < POLE_TOL:
        raise PoleProximity("eigenvalue within 1e-10 of the pole X = 1")
    n = spec.n
    vals = r_alpha(alpha).on_circle(spec.theta)
    coef = -1.0 / (2.0 * math.factorial(alpha)) * (-2j * np.pi / n) ** (alpha + 1)
    val = coef * np.sum(vals)
    scale = abs(coef) * np.sum(np.abs(vals))
    if abs(val.imag) > IMAG_TOL * max(1.0, scale):
        raise FloatingPointError(f"closed form has imaginary part {val.imag:.3e}")
    # each R_alpha evaluation carries a few ulps per polynomial degree
    roundoff = _EPS * (32.0 * (alpha + 2) + n) * scale
    return PowerSumResult(alpha + 1, closed_form=float(val.real), roundoff=float(roundoff))


def compare_power_sums(spec: Spectrum, points: RescaledPointSet, alpha: int, K: int) -> PowerSumResult:
    """Closed form ``R_alpha`` value against the direct sum of ``y_k^{-(alpha+1)}``."""
    cf = power_sum_closed_form(spec, alpha)
    d = power_sum_direct(points, alpha + 1, K)
    return PowerSumResult(alpha + 1, d.direct, cf.closed_form, K, d.tail_bound, d.roundoff + cf.roundoff)
