"""Shell geometry: physical parameters and central angles between points.

Angles are radians throughout; kilometres appear only inside ShellParams.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

# cos(gamma) at or above 1 - COINCIDENT_COS_TOL means the two points are
# numerically coincident; the kernel diverges there, so we refuse rather
# than clamp.
COINCIDENT_COS_TOL = 1e-15

_FALLBACK_RADIUS_KM = 6371.0


def default_radius_km() -> float:
    """Default sphere radius (Earth), overridable via GREEN_DEFAULT_RADIUS_KM."""
    env = os.environ.get("GREEN_DEFAULT_RADIUS_KM")
    return float(env) if env else _FALLBACK_RADIUS_KM


class InvalidParams(ValueError):
    """Non-positive radius or screening length."""


class BetaImaginary(ValueError):
    """radius/rossby <= 1/2 makes beta = sqrt(R^2/L_d^2 - 1/4) imaginary."""


class DegenerateSeparation(ValueError):
    """Evaluation point too close to the source (cos gamma ~ 1)."""


@dataclass(frozen=True, slots=True)
class ShellParams:
    """Sphere radius, screening (Rossby) radius, and derived constants.

    gamma_star = rossby_km / radius_km is the characteristic angle,
    w = 1/gamma_star**2 the dimensionless screening strength, and
    beta = sqrt(w - 1/4) the oscillation rate of the integral form.
    """

    radius_km: float
    rossby_km: float
    gamma_star: float
    w: float
    beta: float


def make_params(radius_km: float, rossby_km: float) -> ShellParams:
    """Validate the radii and populate every derived constant."""
    radius_km = float(radius_km)
    rossby_km = float(rossby_km)
    if not (radius_km > 0.0) or not (rossby_km > 0.0):
        raise InvalidParams(
            f"radii must be positive, got R={radius_km}, L_d={rossby_km}"
        )
    if radius_km / rossby_km <= 0.5:
        raise BetaImaginary(
            f"R/L_d = {radius_km / rossby_km} <= 1/2: screening too weak for a real beta"
        )
    gamma_star = rossby_km / radius_km
    w = 1.0 / (gamma_star * gamma_star)
    beta = math.sqrt(w - 0.25)
    return ShellParams(radius_km, rossby_km, gamma_star, w, beta)


@dataclass(frozen=True, slots=True)
class SphericalPoint:
    """Point on the shell: colatitude theta in [0, pi], longitude phi in [0, 2 pi]."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"colatitude {self.theta} outside [0, pi]")
        if not 0.0 <= self.phi <= 2.0 * math.pi:
            raise ValueError(f"longitude {self.phi} outside [0, 2 pi]")


@dataclass(frozen=True, slots=True)
class EvalPoint:
    """Central angle gamma in (0, pi] with cached cos and 1 - cos.

    one_minus_cos is kept separately because near gamma = 0 it carries the
    full relative precision that 1.0 - cos_gamma would destroy; the log
    kernel is evaluated from it.
    """

    gamma: float
    cos_gamma: float
    one_minus_cos: float

    @classmethod
    def from_gamma(cls, gamma: float) -> "EvalPoint":
        gamma = float(gamma)
        if not 0.0 < gamma <= math.pi:
            raise ValueError(f"central angle {gamma} outside (0, pi]")
        s = math.sin(0.5 * gamma)
        omc = 2.0 * s * s
        if omc <= COINCIDENT_COS_TOL:
            raise DegenerateSeparation(
                f"gamma = {gamma} is inside the coincidence tolerance"
            )
        # cos directly (absolute accuracy ~ulp(cos)); 1 - cos via the half
        # angle (relative accuracy near gamma = 0); each feeds the evaluation
        # route that needs it
        return cls(gamma, math.cos(gamma), omc)

    @classmethod
    def from_cos(cls, cos_gamma: float) -> "EvalPoint":
        cos_gamma = float(cos_gamma)
        if cos_gamma < -1.0 or cos_gamma > 1.0:
            raise ValueError(f"cos gamma {cos_gamma} outside [-1, 1]")
        if cos_gamma > 1.0 - COINCIDENT_COS_TOL:
            raise DegenerateSeparation(f"cos gamma = {cos_gamma} too close to 1")
        return cls(math.acos(cos_gamma), cos_gamma, 1.0 - cos_gamma)


def central_angle(a: SphericalPoint, b: SphericalPoint) -> EvalPoint:
    """Central angle between two shell points.

    Uses 1 - cos(gamma) = 2 sin^2((theta-theta')/2)
                        + sin(theta) sin(theta') * 2 sin^2((phi-phi')/2),
    which is a rearrangement of the spherical law of cosines whose terms are
    all non-negative, so small separations keep full relative precision.
    """
    sd = math.sin(0.5 * (a.theta - b.theta))
    sp = math.sin(0.5 * (a.phi - b.phi))
    omc = 2.0 * sd * sd + math.sin(a.theta) * math.sin(b.theta) * 2.0 * sp * sp
    # rounding can push cos just past the [-1, 1) range
    omc = min(omc, 2.0)
    if omc <= COINCIDENT_COS_TOL:
        raise DegenerateSeparation(
            f"points separated by 1 - cos(gamma) = {omc}: too close to coincident"
        )
    gamma = 2.0 * math.asin(math.sqrt(0.5 * omc))
    return EvalPoint(gamma, math.cos(gamma), omc)
