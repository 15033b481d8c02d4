# Convergence of the split sum vs the direct sum
# ==============================================
#
# Both series represent the same kernel, but the split form subtracts the
# unscreened log kernel so its coefficients fall like l^-3 instead of l^-1.
# This script races the two and then measures the split sum's error-decay
# exponent.

import numpy as np

from sphgreen import (
    EvalPoint,
    TruncationPolicy,
    convergence_crossings,
    error_curve,
    green_split,
    loglog_slope,
    make_params,
)

params = make_params(6371.0, 1000.0)

# --- the race, at a small separation (cos gamma = 0.9) ------------------
point = EvalPoint.from_cos(0.9)
reference = green_split(params, point, TruncationPolicy.auto(1e-18),
                        precision="dd").value
print(f"converged value: {reference:.15e}")

for tol in (1e-6, 1e-9, 1e-12):
    _, last_split = convergence_crossings(params, point, reference, tol,
                                          100_000, "split")
    _, last_direct = convergence_crossings(params, point, reference, tol,
                                           100_000_000, "direct")
    print(f"|error| <= {tol:.0e}: split after {last_split + 1:>6} terms, "
          f"direct after {last_direct + 1:>9} "
          f"({(last_direct + 1) / (last_split + 1):,.0f}x)")

# --- error versus number of terms ----------------------------------------
# E(l) = |G_ref - G_l| against the truncation index, log-spaced.  On a
# log-log plot the envelope falls with slope ~ -3.5 (coefficients l^-3
# times the l^-1/2 decay of the oscillating Legendre polynomials).
for ld, l_max in ((1000.0, 300_000), (100.0, 2_000_000)):
    p = make_params(6371.0, ld)
    curve = error_curve(p, EvalPoint.from_gamma(p.gamma_star), l_max,
                        n_points=150)
    slope = loglog_slope(curve, l_max / 10, l_max)
    print(f"\nL_d = {ld:6.0f} km: slope over the final decade = {slope:+.2f}")
    shown = curve[:: len(curve) // 8]
    for l, err in shown:
        bar = "#" * max(1, int(40 + 2.2 * np.log10(err + 1e-300)))
        print(f"  l = {int(l):>8}  E = {err:9.2e}  {bar}")
