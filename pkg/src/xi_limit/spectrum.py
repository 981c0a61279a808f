"""Eigenangles, their periodization over Z, and rescaled points ``y_k``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearDegenerateSpectrum, NearUnityEigenvalue, SolverFailure

__all__ = [
    "Spectrum",
    "RescaledPointSet",
    "eigenangles",
    "periodized_angle",
    "rescaled_points",
    "TIE_TOL",
    "UNITY_TOL",
]

TWO_PI = 2.0 * np.pi
TIE_TOL = 1e-12
UNITY_TOL = 1e-12
MODULUS_TOL = 1e-6
UNITARITY_PRE_TOL = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenangles ``0 < theta_1 < ... < theta_n < 2 pi`` of one matrix.

    ``replica_id`` and ``seed`` record which chain the matrix came from and are
    ``None`` for hand-built fixtures.
    """

    theta: np.ndarray
    replica_id: int | None = None
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def gap_to_one(self) -> float:
        return float(min(self.theta[0], TWO_PI - self.theta[-1]))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @classmethod
    def from_angles(cls, theta, replica_id=None, seed=None, check_unity=True):
        theta = np.sort(np.mod(np.asarray(theta, dtype=float), TWO_PI))
        if theta.ndim != 1 or theta.size == 0:
            raise ValueError("need a nonempty 1-d array of angles")
        gaps = np.diff(theta)
        if gaps.size and gaps.min() < TIE_TOL:
            raise NearDegenerateSpectrum(
                f"eigenangles tie within {TIE_TOL:g} (min gap {gaps.min():.3e})", float(gaps.min())
            )
        spec = cls(theta, replica_id, seed)
        if check_unity and spec.gap_to_one < UNITY_TOL:
            raise NearUnityEigenvalue(f"eigenangle within {spec.gap_to_one:.3e} of 0")
        return spec

    def conjugate(self) -> "Spectrum":
        """Spectrum of the complex-conjugate matrix."""
        return Spectrum(np.sort(TWO_PI - self.theta), self.replica_id, self.seed)


def eigenangles(U, replica_id=None, seed=None) -> Spectrum:
    """Eigenangles of a unitary matrix, in (0, 2 pi), sorted.

    Uses the general dense eigensolver, then projects each eigenvalue radially
    onto the circle. The projection error is checked, not absorbed.
    """
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    n = U.shape[0]
    if np.max(np.abs(U.conj().T @ U - np.eye(n))) > UNITARITY_PRE_TOL:
        raise ValueError("input is not unitary to 1e-8")
    lam = np.linalg.eigvals(U)
    dev = np.max(np.abs(np.abs(lam) - 1.0))
    if dev > MODULUS_TOL:
        raise SolverFailure(f"eigenvalue modulus off the unit circle by {dev:.3e}")
    return Spectrum.from_angles(np.mod(np.angle(lam), TWO_PI), replica_id, seed)


def _split_index(n, k):
    # k = q n + r + 1 with r in [0, n)
    k = np.asarray(k, dtype=np.int64)
    q, r = np.divmod(k - 1, n)
    return q, r


def periodized_angle(spec: Spectrum, k):
    """``theta_k`` for any integer ``k`` using ``theta_{k+n} = theta_k + 2 pi``."""
    q, r = _split_index(spec.n, k)
    out = spec.theta[r] + TWO_PI * q
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class RescaledPointSet:
    """Points ``y_k`` on a contiguous index window ``k = lo .. hi``.

    For sets built from a spectrum, ``period`` is ``n`` and
    ``values = base + shift`` with ``shift`` an exact multiple of ``n``.
    Hand-made fixtures have ``period=None`` and arbitrary values.
    """

    lo: int
    values: np.ndarray
    period: int | None = None
    base: np.ndarray | None = None
    limit_proxy: bool = False
    replica_id: int | None = None
    seed: int | None = None

    @property
    def hi(self) -> int:
        return self.lo + self.values.shape[0] - 1

    @property
    def K(self) -> int:
        """Largest symmetric window ``[-K, K]`` fully materialized."""
        return min(-self.lo, self.hi)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def y(self, k):
        k = np.asarray(k, dtype=np.int64)
        if np.any(k < self.lo) or np.any(k > self.hi):
            raise IndexError(f"index outside materialized window [{self.lo}, {self.hi}]")
        out = self.values[k - self.lo]
        return float(out) if out.ndim == 0 else out

    def shift(self, k):
        """Integer offset ``n * floor((k-1)/n)`` of ``y_k`` (periodized sets only)."""
        if self.period is None:
            raise ValueError("point set is not periodized")
        q, _ = _split_index(self.period, k)
        return q * self.period

    def symmetric(self, K):
        """``(y_{-K..-1}, y_0, y_{1..K})`` as three arrays."""
        if K > self.K:
            raise IndexError(f"K={K} exceeds materialized window K={self.K}")
        neg = self.y(np.arange(-1, -K - 1, -1))
        pos = self.y(np.arange(1, K + 1))
        return neg, self.y(0), pos

    def deviation_bound(self):
        """``max |y_k - k|``; for periodized sets this bounds every ``k`` in Z."""
        if self.period is not None:
            k = np.arange(1, self.period + 1)
            return float(np.max(np.abs(self.base - k)))
        return float(np.max(np.abs(self.values - self.indices)))

    @classmethod
    def from_values(cls, lo, values, **kw):
        return cls(int(lo), np.asarray(values, dtype=float), **kw)


def rescaled_points(spec: Spectrum, K: int, limit_proxy=False) -> RescaledPointSet:
    """``y_k = n theta_k / (2 pi)`` for ``k`` in ``[-K, K]``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    n = spec.n
    base = n * spec.theta / TWO_PI
    k = np.arange(-K, K + 1, dtype=np.int64)
    q, r = _split_index(n, k)
    values = base[r] + (q * n).astype(float)
    return RescaledPointSet(
        -K, values, period=n, base=base, limit_proxy=limit_proxy,
        replica_id=spec.replica_id, seed=spec.seed,
    )
