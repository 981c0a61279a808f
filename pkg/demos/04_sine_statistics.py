"""Number variance and pair correlation of rescaled CUE eigenangles.

Both are compared with the sine process: variance grows like log(A) / pi^2 and
the two-point function is 1 - (sin pi s / pi s)^2.
"""
import numpy as np

from xi_limit import empirical_pair_correlation, variance_profile
from xi_limit.ensemble import grow_spectra
from xi_limit.sine_stats import INV_PI2

spectra = grow_spectra(9, range(200), [128])[128]

vp = variance_profile(spectra, [1, 2, 4, 8, 16])
for row in vp.rows():
    print(f"A={row['A']:5.1f}  mean={row['mean']:7.3f}  var={row['var']:.4f}")
print(f"slope {vp.slope:.4f}  (1/pi^2 = {INV_PI2:.4f})")

pc = empirical_pair_correlation(spectra, 16, bins=20, s_max=2.0)
for c, d, t in zip(pc.centers[::4], pc.density[::4], pc.rho2_theory[::4]):
    print(f"s={c:4.2f}  empirical {d:.3f}  sine {t:.3f}")
print(f"chi2 = {pc.chi2:.1f}, p = {pc.p_value:.3f}")
