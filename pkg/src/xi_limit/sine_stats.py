"""Sine-kernel statistics of rescaled eigenangles.

Estimators take sequences of :class:`~xi_limit.spectrum.Spectrum` (one per
replica, all of the same dimension) and use the periodized points ``y_k``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .errors import InsufficientReplicas, NotCoupled, WindowTooSmall
from .spectrum import RescaledPointSet, Spectrum, rescaled_points

__all__ = [
    "CountStatistics",
    "PairCorrelation",
    "CouplingProfile",
    "count_in_interval",
    "interval_counts",
    "variance_profile",
    "bernstein_bound",
    "deviation_profile",
    "coupling_error_profile",
    "sine_kernel_determinant",
    "rho2_sine",
    "empirical_pair_correlation",
    "INV_PI2",
]

INV_PI2 = 1.0 / np.pi**2
MIN_VARIANCE_REPLICAS = 100
MIN_PAIRCORR_REPLICAS = 200


def count_in_interval(points: RescaledPointSet, a: float, b: float) -> int:
    """Number of ``y_k`` in the closed interval ``[a, b]``."""
    if a > b:
        raise ValueError("need a <= b")
    v = points.values
    if a < v[0] or b > v[-1]:
        raise WindowTooSmall(f"[{a}, {b}] not inside materialized range [{v[0]}, {v[-1]}]")
    return int(np.searchsorted(v, b, side="right") - np.searchsorted(v, a, side="left"))


def interval_counts(spec: Spectrum, A, offsets=(0.0,)):
    """Counts of ``y`` in ``[o, o + A]`` for each offset ``o`` and length ``A``.

    Returns an array of shape ``(len(offsets), len(A))``. Works on one period
    of the circle directly, so ``o + A`` may wrap past ``n``.
    """
    n = spec.n
    y = n * spec.theta / (2 * np.pi)
    A = np.atleast_1d(np.asarray(A, dtype=float))
    out = np.empty((len(offsets), A.size), dtype=np.int64)
    # two periods cover any window with o in [0, n) and A <= n
    yy = np.concatenate([y, y + n])
    for i, o in enumerate(offsets):
        o = float(np.mod(o, n))
        lo = np.searchsorted(yy, o, side="left")
        out[i] = np.searchsorted(yy, o + A, side="right") - lo
    return out


@dataclass(frozen=True)
class CountStatistics:
    A: np.ndarray
    counts: np.ndarray  # (replicas, offsets, len(A))
    mean: np.ndarray
    var: np.ndarray
    stderr: np.ndarray
    slope: float
    intercept: float
    slope_ci: tuple

    @property
    def n_replicas(self):
        return self.counts.shape[0]

    def rows(self):
        return [
            {"A": float(a), "mean": float(m), "var": float(v), "stderr": float(s),
             "n_replicas": self.n_replicas}
            for a, m, v, s in zip(self.A, self.mean, self.var, self.stderr)
        ]


def _variances(counts):
    # counts: (R, O, L); variance across replicas, averaged over offsets
    return counts.var(axis=0, ddof=1).mean(axis=0)


def variance_profile(spectra, A_list, offsets=None, confidence=0.95) -> CountStatistics:
    """Number variance ``Var X_A`` across replicas and its slope against ``log A``.

    Rotation invariance of the Haar measure makes every window ``[o, o + A]``
    equidistributed, so the variance is estimated at each offset and averaged.
    By default offsets are ``n / 8`` apart. The slope confidence interval uses
    a replica bootstrap (500 resamples, fixed seed).
    """
    spectra = list(spectra)
    if len(spectra) < MIN_VARIANCE_REPLICAS:
        raise InsufficientReplicas(
            f"variance_profile needs >= {MIN_VARIANCE_REPLICAS} replicas, got {len(spectra)}"
        )
    n = spectra[0].n
    A = np.asarray(A_list, dtype=float)
    if A.max() > n / 8:
        raise ValueError(f"A_max={A.max()} exceeds n/8={n / 8} (edge effects)")
    if offsets is None:
        offsets = np.arange(8) * (n / 8.0)
    counts = np.stack([interval_counts(s, A, offsets) for s in spectra])
    mean = counts.mean(axis=(0, 1))
    var = _variances(counts)
    R = counts.shape[0]
    stderr = np.sqrt(var / (R * counts.shape[1]))
    logA = np.log(A)
    slope, intercept = np.polyfit(logA, var, 1)
    rng = np.random.default_rng(20240101)
    boots = np.empty(500)
    for b in range(boots.size):
        idx = rng.integers(0, R, R)
        boots[b] = np.polyfit(logA, _variances(counts[idx]), 1)[0]
    q = (1 - confidence) / 2
    ci = (float(np.quantile(boots, q)), float(np.quantile(boots, 1 - q)))
    return CountStatistics(A, counts, mean, var, stderr, float(slope), float(intercept), ci)


def bernstein_bound(t, var):
    """``2 exp(-min(t^2 / (4 Var), t / 2))``."""
    return 2.0 * np.exp(-np.minimum(t**2 / (4.0 * var), t / 2.0))


def deviation_profile(points: RescaledPointSet, K: int | None = None) -> float:
    """``max_{1 <= |k| <= K} |y_k - k| / log(2 + |k|)``."""
    K = points.K if K is None else K
    k = np.concatenate([np.arange(-K, 0), np.arange(1, K + 1)])
    return float(np.max(np.abs(points.y(k) - k) / np.log(2.0 + np.abs(k))))


@dataclass(frozen=True)
class CouplingProfile:
    k: np.ndarray
    error: np.ndarray
    envelope: np.ndarray
    constant: float
    fraction_under: float

    def rows(self):
        return list(zip(self.k, self.error, self.envelope, self.constant * self.envelope))


def coupling_error_profile(spec_n: Spectrum, spec_N: Spectrum, K: int, eps: float = 0.0) -> CouplingProfile:
    """``|y_k^{(n)} - y_k^{(N)}|`` against ``(1 + k^2) n^{-1/3 + eps}`` for ``|k| <= K``.

    The constant is fitted as the geometric mean of error/envelope, and the
    fraction of indices under ``constant * envelope`` is reported.
    """
    if spec_n.replica_id is None or (spec_n.replica_id, spec_n.seed) != (spec_N.replica_id, spec_N.seed):
        raise NotCoupled(
            f"spectra from replicas {(spec_n.seed, spec_n.replica_id)} and "
            f"{(spec_N.seed, spec_N.replica_id)}"
        )
    n = spec_n.n
    if K > n**0.25:
        raise ValueError(f"K={K} exceeds n^(1/4)={n ** 0.25:.3f}")
    k = np.arange(-K, K + 1)
    err = np.abs(rescaled_points(spec_n, K).y(k) - rescaled_points(spec_N, K).y(k))
    env = (1.0 + k.astype(float) ** 2) * n ** (-1.0 / 3.0 + eps)
    ratio = err / env
    pos = ratio[ratio > 0]
    c = float(np.exp(np.mean(np.log(pos)))) if pos.size else 0.0
    return CouplingProfile(k, err, env, c, float(np.mean(err <= c * env)))


def sine_kernel_determinant(x) -> float:
    """``det[sin(pi (x_j - x_k)) / (pi (x_j - x_k))]``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size < 1:
        raise ValueError("need at least one point")
    return float(np.linalg.det(np.sinc(x[:, None] - x[None, :])))


def rho2_sine(s):
    """Two-point function ``1 - (sin(pi s) / (pi s))^2`` of the sine process."""
    return 1.0 - np.sinc(np.asarray(s, dtype=float)) ** 2


@dataclass(frozen=True)
class PairCorrelation:
    edges: np.ndarray
    density: np.ndarray
    stderr: np.ndarray
    rho2_theory: np.ndarray
    chi2: float
    p_value: float
    n_replicas: int

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def rows(self):
        return [
            {"s_bin_center": float(c), "density": float(d), "stderr": float(e), "rho2_theory": float(t)}
            for c, d, e, t in zip(self.centers, self.density, self.stderr, self.rho2_theory)
        ]


def _window_weight_integral(lo, hi, W):
    # integral of rho2(s) (W - s) ds over [lo, hi]
    return integrate.quad(lambda s: rho2_sine(s) * (W - s), lo, hi)[0]


def empirical_pair_correlation(spectra, window: float, bins: int = 40, s_max: float = 4.0) -> PairCorrelation:
    """Histogram of differences ``y_j - y_i > 0`` for points in a centered window.

    Only pairs with both points in ``[-window/2, window/2]`` are kept. A
    stationary process with two-point function ``rho2`` puts
    ``integral (W - s) rho2(s) ds`` pairs per replica in each bin, which
    normalizes both the empirical density and the theory (bin-averaged).
    Errors are across-replica standard errors; chi^2 has ``bins`` degrees of freedom.
    """
    spectra = list(spectra)
    R = len(spectra)
    if R < MIN_PAIRCORR_REPLICAS:
        raise InsufficientReplicas(f"pair correlation needs >= {MIN_PAIRCORR_REPLICAS} replicas, got {R}")
    n = spectra[0].n
    if window > n / 8:
        raise ValueError(f"window={window} exceeds n/8={n / 8}")
    edges = np.linspace(0.0, s_max, bins + 1)
    W = float(window)
    norm = np.array([integrate.quad(lambda s: W - s, lo, hi)[0] for lo, hi in zip(edges[:-1], edges[1:])])
    theory = np.array(
        [_window_weight_integral(lo, hi, W) for lo, hi in zip(edges[:-1], edges[1:])]
    ) / norm
    K = int(np.ceil(W)) + 8
    per = np.empty((R, bins))
    for r, spec in enumerate(spectra):
        y = rescaled_points(spec, K).values
        y = y[(y >= -W / 2) & (y <= W / 2)]
        d = y[None, :] - y[:, None]
        d = d[(d > 0) & (d < s_max)]
        per[r] = np.histogram(d, bins=edges)[0] / norm
    density = per.mean(axis=0)
    stderr = per.std(axis=0, ddof=1) / np.sqrt(R)
    chi2 = float(np.sum(((density - theory) / stderr) ** 2))
    return PairCorrelation(edges, density, stderr, theory, chi2, float(stats.chi2.sf(chi2, bins)), R)
