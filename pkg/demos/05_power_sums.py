"""Inverse power sums of the rescaled points through R_alpha.

Summing ``y_k^{-(alpha+1)}`` over all periodized points collapses to a finite
sum of ``R_alpha(e^{i theta})`` over the eigenvalues.
"""
from xi_limit import compare_power_sums, r_alpha, rescaled_points
from xi_limit.ensemble import grow_replica

for a in range(4):
    print(f"R_{a}(X) = {r_alpha(a)}")

_, spectra = grow_replica(3, 0, [128])
spec = spectra[128]
pts = rescaled_points(spec, 10**5)
for a in range(3):
    r = compare_power_sums(spec, pts, a, 10**5)
    print(f"power {a + 1}: closed {r.closed_form:+.10f}  direct {r.direct:+.10f}  "
          f"tail bound {r.tail_bound:.1e}")
