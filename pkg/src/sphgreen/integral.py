"""Quadrature of the integral form of the kernel, plus its closed forms.

The integral form is

    G = -(1/2pi) int_0^inf exp(-z/2) cos(beta z) / D(z) dz,
    D(z) = sqrt(exp(-2z) - 2 exp(-z) cos(gamma) + 1),

an independent cross-check of the series routes.  The denominator is
evaluated as sqrt((1 - e^-z)^2 + 2 e^-z (1 - cos gamma)), which is the same
quantity without the cancellation between exp(-2z) + 1 and 2 exp(-z) cos(gamma)
that otherwise loses half the digits for small z and small gamma.

At cos(gamma) = -1 and 0 the integral collapses to closed forms in cosh and
the gamma function; those are exposed directly and double as oracles for
both the quadrature and the series.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .geometry import EvalPoint, ShellParams
from .series import GreenResult, _check_point


class NoConvergence(ArithmeticError):
    """Adaptive refinement hit max_subdiv before reaching tolerance."""


class DomainError(ValueError):
    """Argument outside the supported half-plane."""


@dataclass(frozen=True, slots=True)
class QuadratureSpec:
    """Tolerances and truncation controls for the semi-infinite axis.

    z_cut <= 0 derives the truncation point from abs_tol via the tail bound
    |tail| <= exp(-z_cut/2) / (pi (1 - exp(-z_cut))).  max_subdiv caps the
    number of adaptive bisections on top of the oscillation-resolving base
    grid (whose size is set by beta, not by this knob).
    """

    rel_tol: float = 1e-13
    abs_tol: float = 1e-15
    z_cut: float = 0.0
    max_subdiv: int = 4000

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise ValueError("tolerances must be positive")


# Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
_XGK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]


def _integrand(z: np.ndarray, beta: float, one_minus_cos: float) -> np.ndarray:
    ez = np.exp(-z)
    d = (1.0 - ez) ** 2 + 2.0 * ez * one_minus_cos
    return np.exp(-0.5 * z) * np.cos(beta * z) / np.sqrt(d)


def _gk15(beta, omc, a, b):
    """Kronrod value and |K15 - G7| estimate for a batch of panels."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fz = _integrand(mid[:, None] + half[:, None] * _XGK[None, :], beta, omc)
    ik = half * (fz @ _WGK)
    ig = half * (fz @ _WG)
    return ik, np.abs(ik - ig)


def green_quadrature(
    params: ShellParams, p: EvalPoint, spec: QuadratureSpec | None = None
) -> GreenResult:
    """Adaptive panel quadrature of the integral form.

    Base panels are at most a quarter period of cos(beta z) wide so the
    embedded rule sees the oscillation resolved; panels failing the global
    budget are bisected until the (conservative) |K15 - G7| estimates sum
    below tolerance.
    """
    _check_point(p)
    if spec is None:
        spec = QuadratureSpec()
    beta, omc = params.beta, p.one_minus_cos
    z_cut = spec.z_cut
    if z_cut <= 0.0:
        z_cut = 2.0 * math.log(4.0 / (math.pi * spec.abs_tol))
    tail = math.exp(-0.5 * z_cut) / (math.pi * (1.0 - math.exp(-z_cut)))

    width = min(math.pi / (4.0 * beta), z_cut / 8.0)
    n0 = int(math.ceil(z_cut / width))
    edges = np.linspace(0.0, z_cut, n0 + 1)
    a, b = edges[:-1], edges[1:]
    ik, err = _gk15(beta, omc, a, b)

    two_pi = 2.0 * math.pi
    splits = 0
    while True:
        total = float(ik.sum())
        # tolerances are stated on G = -total/(2 pi); compare on integral scale
        tol = max(spec.abs_tol * two_pi, spec.rel_tol * abs(total))
        if float(err.sum()) <= tol:
            break
        if splits > spec.max_subdiv:
            raise NoConvergence(
                f"{splits} bisections exceed max_subdiv={spec.max_subdiv}"
            )
        bad = err > tol / (2.0 * err.shape[0])
        if not bad.any():
            bad = err == err.max()
        splits += int(bad.sum())
        mid = 0.5 * (a[bad] + b[bad])
        na = np.concatenate([a[~bad], a[bad], mid])
        nb = np.concatenate([b[~bad], mid, b[bad]])
        ik_bad, err_bad = _gk15(beta, omc, np.concatenate([a[bad], mid]),
                                np.concatenate([mid, b[bad]]))
        ik = np.concatenate([ik[~bad], ik_bad])
        err = np.concatenate([err[~bad], err_bad])
        a, b = na, nb

    value = -float(ik.sum()) / two_pi
    est = float(err.sum()) / two_pi + tail
    return GreenResult(value, "quadrature", a.shape[0], est)


def green_antipode(params: ShellParams) -> float:
    """Closed form at cos(gamma) = -1: -1/(4 cosh(pi beta)), overflow-safe."""
    t = math.exp(-math.pi * params.beta)
    return -t / (2.0 * (1.0 + t * t))


def green_equator(params: ShellParams) -> float:
    """Closed form at cos(gamma) = 0.

    -(1/(8 pi^1.5)) Gamma(1/4 + i beta/2) Gamma(1/4 - i beta/2); the product
    of the conjugate pair is exp(2 Re log Gamma).
    """
    lg = complex_log_gamma(0.25 + 0.5j * params.beta)
    return -math.exp(2.0 * lg.real) / (8.0 * math.pi ** 1.5)


# Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients);
# relative accuracy ~1e-15 on the right half-plane.
_LANCZOS_G = 4.7421875
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    3.3994649984811888699e-5,
    4.6523628927048575665e-5,
    -9.8374475304879564677e-5,
    1.5808870322491248884e-4,
    -2.1026444172410488319e-4,
    2.1743961811521264320e-4,
    -1.6431810653676389022e-4,
    8.4418223983852743293e-5,
    -2.6190838401581408670e-5,
    3.6899182659531622704e-6,
])
_LOG_SQRT_2PI = 0.91893853320467274178


def complex_log_gamma(z: complex) -> complex:
    """Principal log Gamma on Re z > 0 via the Lanczos approximation."""
    z = complex(z)
    if z.real <= 0.0:
        raise DomainError(f"Re z = {z.real} must be > 0")
    zz = z - 1.0
    series = _LANCZOS_C[0]
    for k in range(1, 15):
        series += _LANCZOS_C[k] / (zz + k)
    t = zz + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zz + 0.5) * cmath.log(t) - t + cmath.log(series)
