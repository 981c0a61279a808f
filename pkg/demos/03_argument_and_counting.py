"""The argument of Z_n on the circle counts eigenvalues and is light-tailed.

Between eigenangles the profile rises with slope n/2 and drops by pi at each
one. Its value at 1, X_n, has an exact moment generating function.
"""
import numpy as np

from xi_limit import arg_supremum, count_zeros_arc, im_log_Z, mgf_exact, x_n
from xi_limit.ensemble import grow_spectra

spectra = grow_spectra(5, range(2000), [16])[16]
spec = spectra[0]

phi = np.linspace(0.01, 1.0, 6)
print("profile", np.round(im_log_Z(spec, phi), 3))
print("zeros on arc (0.1, 2.0):", count_zeros_arc(spec, 0.1, 2.0))
print("sup |Im log Z| =", round(arg_supremum(spec), 4))

xs = np.array([x_n(s) for s in spectra])
for lam in (0.5, 1.0):
    e = np.exp(lam * xs)
    print(f"lambda={lam}: Monte Carlo {e.mean():.4f} +- {e.std(ddof=1) / np.sqrt(e.size):.4f}, "
          f"exact {mgf_exact(16, lam):.4f}")
