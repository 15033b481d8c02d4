# Screening-induced localization of the kernel
# ============================================
#
# The unscreened (Poisson) kernel G* falls off logarithmically; screening
# makes G decay much faster once gamma exceeds a few gamma*.  Equivalently,
# beyond the screening scale the curve -G* collapses onto G - G*: the
# difference between them is G itself, and it has died off.

import numpy as np

from sphgreen import EvalPoint, g_star, make_params, split_values

radius = 6371.0
ratios = np.array([0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 10.0, 15.0, 20.0])

print("|G| versus gamma/gamma*:")
print(f"{'L_d km':>7} | " + "".join(f"{r:9.2f}" for r in ratios))
print("-" * (10 + 9 * len(ratios)))
table = {}
for ld in (50.0, 200.0, 1000.0):
    params = make_params(radius, ld)
    gammas = ratios * params.gamma_star
    keep = gammas <= np.pi
    pts = [EvalPoint.from_gamma(g) for g in gammas[keep]]
    g = split_values(params, np.array([p.one_minus_cos for p in pts]), eps=1e-14)
    table[ld] = (pts, g)
    cells = "".join(f"{abs(v):9.1e}" for v in g)
    print(f"{ld:7.0f} | {cells}")

# Against the log kernel.  G* itself changes sign at 1 - cos(gamma) = 2/e
# (gamma ~ 1.30 rad), so the ratio is only meaningful away from that zero;
# for L_d = 1000 km that angle sits near ratio 8.3.
print("\n|G| / |G*|:")
print(f"{'L_d km':>7} | " + "".join(f"{r:9.2f}" for r in ratios))
print("-" * (10 + 9 * len(ratios)))
for ld, (pts, g) in table.items():
    gs = np.array([g_star(p) for p in pts])
    cells = ""
    for v, s, p in zip(g, gs, pts):
        near_zero = abs(p.one_minus_cos - 2.0 / np.e) < 0.2
        cells += "     (G*~0)" if near_zero else f"{abs(v) / abs(s):9.1e}"
    print(f"{ld:7.0f} | {cells}")

print("\nBy ten screening lengths the kernel retains well under 1e-3 of the "
      "log kernel's\nmagnitude, and the fall-off steepens as L_d shrinks: the "
      "response to a point\nsource is confined to a neighbourhood of order "
      "gamma*.")
