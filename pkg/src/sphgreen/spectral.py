"""Spherical-harmonic solvers for the screened Poisson equation on the shell.

Two independent routes to psi from a forcing field f:

* solve_spectral: expand f in real orthonormal spherical harmonics and divide
  each (l, m) coefficient by -l(l+1)/R^2 - 1/L_d^2 (never zero, so there is
  no zero-mode headache).
* solve_convolution: quadrature of psi(x) = sum_j G(gamma(x, x_j)) f_j w_j
  over the grid.  The kernel is split into its smooth screened-minus-log
  part (finite at gamma = 0) plus the pure log kernel, whose singularity is
  subtracted exactly using int G* dA == 0 over the sphere.

The grid is Gauss-Legendre in cos(theta) times uniform longitudes, which
integrates products of harmonics up to the stated band limit exactly, so
analyze/synthesize round-trip at machine precision on band-limited fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ShellParams
from .series import screened_minus_log_limit, split_values

SQRT2 = math.sqrt(2.0)


class UnderResolved(ValueError):
    """Grid too coarse for the requested band limit."""


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre colatitudes x longitude ring, theta-major node order."""

    n_theta: int
    n_phi: int
    radius_km: float
    theta: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)          # cos(theta), descending
    gl_weights: np.ndarray = field(repr=False)  # unit-sphere cos(theta) weights
    phi: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, n_theta: int, n_phi: int, radius_km: float) -> "SphereGrid":
        if n_theta < 1 or n_phi < 2:
            raise ValueError("need n_theta >= 1 and n_phi >= 2")
        x, glw = np.polynomial.legendre.leggauss(n_theta)
        x, glw = x[::-1].copy(), glw[::-1].copy()  # theta ascending
        theta = np.arccos(x)
        phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
        return cls(n_theta, n_phi, float(radius_km), theta, x, glw, phi)

    @property
    def node_count(self) -> int:
        return self.n_theta * self.n_phi

    @property
    def row_weights(self) -> np.ndarray:
        """Per-node area weight (km^2), constant along each theta row."""
        return self.gl_weights * (2.0 * math.pi / self.n_phi) * self.radius_km**2

    def total_area(self) -> float:
        return float(self.row_weights.sum() * self.n_phi)


@dataclass(frozen=True)
class SphereField:
    """Scalar samples on a SphereGrid, shape (n_theta, n_phi)."""

    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_theta, self.grid.n_phi):
            raise ValueError(
                f"samples shaped {v.shape}, grid wants "
                f"{(self.grid.n_theta, self.grid.n_phi)}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite samples")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class HarmonicCoeffs:
    """Real-basis coefficients f_lm, packed as coeffs[l*(l+1) + m]."""

    l_max: int
    coeffs: np.ndarray

    def get(self, l: int, m: int) -> float:
        if not (0 <= l <= self.l_max and -l <= m <= l):
            raise IndexError(f"(l, m) = ({l}, {m}) outside band limit {self.l_max}")
        return float(self.coeffs[l * (l + 1) + m])


def norm_assoc_legendre(l_max: int, x: np.ndarray) -> list[np.ndarray]:
    """Orthonormal associated Legendre values.

    Returns per-m arrays table[m][i] = Pbar_{m+i, m}(x) such that
    Y_l0 = Pbar_l0 and Y_l,+-m = sqrt(2) Pbar_lm {cos, sin}(m phi) form an
    orthonormal basis on the unit sphere.  Standard stable recurrences on the
    normalized functions; no factorials appear.
    """
    x = np.asarray(x, dtype=float)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    table: list[np.ndarray] = []
    pmm = np.full_like(x, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(l_max + 1):
        rows = np.empty((l_max - m + 1, x.shape[0]))
        rows[0] = pmm
        if m + 1 <= l_max:
            rows[1] = math.sqrt(2.0 * m + 3.0) * x * pmm
        for l in range(m + 2, l_max + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(
                ((2.0 * l + 1.0) * ((l - 1.0) ** 2 - m * m))
                / ((2.0 * l - 3.0) * (l * l - m * m))
            )
            rows[l - m] = a * x * rows[l - m - 1] - b * rows[l - m - 2]
        table.append(rows)
        if m + 1 <= l_max:
            pmm = math.sqrt((2.0 * m + 3.0) / (2.0 * m + 2.0)) * sin_t * pmm
    return table


def _check_resolves(grid: SphereGrid, l_max: int):
    if grid.n_theta < l_max + 1 or grid.n_phi < 2 * l_max + 1:
        raise UnderResolved(
            f"grid ({grid.n_theta} x {grid.n_phi}) cannot hold l_max={l_max}; "
            f"need n_theta >= {l_max + 1}, n_phi >= {2 * l_max + 1}"
        )


def analyze(fld: SphereField, l_max: int) -> HarmonicCoeffs:
    """Project a field onto the real harmonics through grid quadrature."""
    grid = fld.grid
    _check_resolves(grid, l_max)
    table = norm_assoc_legendre(l_max, grid.x)
    # phi transform: sum_j f cos(m phi_j), sum_j f sin(m phi_j)
    spec = np.fft.rfft(fld.values, axis=1)
    dphi = 2.0 * math.pi / grid.n_phi
    coeffs = np.zeros((l_max + 1) ** 2)
    for m in range(l_max + 1):
        cos_part = grid.gl_weights * spec[:, m].real * dphi
        ls = np.arange(m, l_max + 1)
        if m == 0:
            coeffs[ls * (ls + 1)] = table[0] @ cos_part
        else:
            sin_part = grid.gl_weights * (-spec[:, m].imag) * dphi
            coeffs[ls * (ls + 1) + m] = SQRT2 * (table[m] @ cos_part)
            coeffs[ls * (ls + 1) - m] = SQRT2 * (table[m] @ sin_part)
    return HarmonicCoeffs(l_max, coeffs)


def synthesize(coeffs: HarmonicCoeffs, grid: SphereGrid) -> SphereField:
    """Pointwise sum of the harmonic expansion on the grid nodes."""
    l_max = coeffs.l_max
    table = norm_assoc_legendre(l_max, grid.x)
    values = np.zeros((grid.n_theta, grid.n_phi))
    mphi = np.outer(np.arange(l_max + 1), grid.phi)
    cos_m, sin_m = np.cos(mphi), np.sin(mphi)
    for m in range(l_max + 1):
        ls = np.arange(m, l_max + 1)
        if m == 0:
            g = coeffs.coeffs[ls * (ls + 1)] @ table[0]
            values += g[:, None]
        else:
            gc = coeffs.coeffs[ls * (ls + 1) + m] @ table[m]
            gs = coeffs.coeffs[ls * (ls + 1) - m] @ table[m]
            values += SQRT2 * (np.outer(gc, cos_m[m]) + np.outer(gs, sin_m[m]))
    return SphereField(grid, values)


def solve_spectral(fld: SphereField, params: ShellParams, l_max: int) -> SphereField:
    """Invert the screened Laplace-Beltrami operator coefficient-wise.

    u_lm = f_lm / (-l(l+1)/R^2 - 1/L_d^2); every denominator is strictly
    negative, so no mode needs special treatment.
    """
    c = analyze(fld, l_max)
    ls = np.repeat(np.arange(l_max + 1), 2 * np.arange(l_max + 1) + 1)
    denom = -ls * (ls + 1.0) / params.radius_km**2 - 1.0 / params.rossby_km**2
    return synthesize(HarmonicCoeffs(l_max, c.coeffs / denom), fld.grid)


def _pair_one_minus_cos(grid: SphereGrid) -> np.ndarray:
    """1 - cos(central angle) for every (theta_i, theta_j, delta_phi_k) triple.

    Uses 2 sin^2(dtheta/2) + sin(theta_i) sin(theta_j) 2 sin^2(dphi/2), exact
    to relative rounding even for neighbouring nodes.
    """
    th = grid.theta
    sd = np.sin(0.5 * (th[:, None] - th[None, :]))
    sp = np.sin(0.5 * grid.phi)
    st = np.sin(th)
    return (
        2.0 * sd[:, :, None] ** 2
        + (st[:, None] * st[None, :])[:, :, None] * 2.0 * sp[None, None, :] ** 2
    )


def kernel_table(
    params: ShellParams,
    grid: SphereGrid,
    eps: float = 1e-14,
    evaluator: str = "split",
) -> np.ndarray:
    """G(gamma(node_i, node_j)) for all node pairs, as a (n_t, n_t, n_phi) table.

    The angle between nodes depends only on the two colatitudes and the
    longitude offset, so the table is built over unique 1 - cos(gamma)
    values (split series double path, or quadrature) and broadcast back.
    The singular i == j, offset 0 entries are patched with the analytic mean
    of the kernel over an equal-area polar cap:

        <G*>_cap = (1/4pi) log(t_c / 2),  t_c = cell_area / (2 pi R^2),

    plus the finite screened-minus-log limit at gamma -> 0.
    """
    omc = _pair_one_minus_cos(grid)
    flat = omc.reshape(-1)
    diag = (
        np.arange(grid.n_theta) * grid.n_theta * grid.n_phi
        + np.arange(grid.n_theta) * grid.n_phi
    )
    mask = np.ones(flat.shape[0], dtype=bool)
    mask[diag] = False
    uniq, inverse = np.unique(flat[mask], return_inverse=True)
    if evaluator == "split":
        uniq_g = split_values(params, uniq, eps)
    elif evaluator == "quadrature":
        from .geometry import EvalPoint
        from .integral import green_quadrature

        uniq_g = np.array(
            [
                green_quadrature(params, EvalPoint.from_cos(1.0 - v)).value
                for v in uniq
            ]
        )
    else:
        raise ValueError(f"unknown evaluator {evaluator!r}")
    g = np.empty(flat.shape[0])
    g[mask] = uniq_g[inverse]
    d0 = screened_minus_log_limit(params, eps)
    t_c = grid.row_weights / (2.0 * math.pi * params.radius_km**2)
    g[diag] = np.log(0.5 * t_c) / (4.0 * math.pi) + d0
    return g.reshape(grid.n_theta, grid.n_theta, grid.n_phi)


def _split_kernel_tables(params, grid, eps, evaluator):
    """(D, G*) node-pair tables with D(0) on the diagonal and G* zeroed there.

    D = G - G* is smooth through gamma = 0, G* is the pure log kernel.
    """
    omc = _pair_one_minus_cos(grid)
    flat = omc.reshape(-1)
    diag = (
        np.arange(grid.n_theta) * grid.n_theta * grid.n_phi
        + np.arange(grid.n_theta) * grid.n_phi
    )
    mask = np.ones(flat.shape[0], dtype=bool)
    mask[diag] = False
    uniq, inverse = np.unique(flat[mask], return_inverse=True)
    gstar_uniq = (1.0 + np.log(0.5 * uniq)) / (4.0 * math.pi)
    if evaluator == "split":
        d_uniq = split_values(params, uniq, eps) - gstar_uniq
    elif evaluator == "quadrature":
        from .geometry import EvalPoint
        from .integral import green_quadrature

        d_uniq = np.array(
            [
                green_quadrature(params, EvalPoint.from_cos(1.0 - v)).value
                for v in uniq
            ]
        ) - gstar_uniq
    else:
        raise ValueError(f"unknown evaluator {evaluator!r}")
    dtab = np.empty(flat.shape[0])
    dtab[mask] = d_uniq[inverse]
    dtab[diag] = screened_minus_log_limit(params, eps)
    gtab = np.zeros(flat.shape[0])
    gtab[mask] = gstar_uniq[inverse]
    shape = (grid.n_theta, grid.n_theta, grid.n_phi)
    return dtab.reshape(shape), gtab.reshape(shape)


def solve_convolution(
    fld: SphereField,
    params: ShellParams,
    eps: float = 1e-14,
    evaluator: str = "split",
) -> SphereField:
    """psi by direct quadrature against the kernel.

    The kernel is applied as D + G* with the log singularity subtracted:

        psi_i = sum_j w_j D_ij f_j                     (D(0) on the diagonal)
              + sum_{j != i} w_j G*_ij (f_j - f_i),

    which uses the exact identity  int G* dA == 0  (the log kernel has no
    degree-0 component), so the divergent self-entry of G* never appears and
    the quadrature sees an integrand that vanishes at the singular point.
    The longitude sum for each pair of theta rows is a circular convolution
    with an even kernel, done with FFTs; rows are otherwise independent.
    """
    grid = fld.grid
    dtab, gtab = _split_kernel_tables(params, grid, eps, evaluator)
    w = grid.row_weights
    fhat = np.fft.rfft(fld.values, axis=1)            # (n_t, n_f)
    # even in delta phi, so the transforms are real and correlation == convolution
    dghat = np.fft.rfft(dtab, axis=2).real + np.fft.rfft(gtab, axis=2).real
    psi_hat = np.einsum("j,ijf,jf->if", w, dghat, fhat)
    values = np.fft.irfft(psi_hat, n=grid.n_phi, axis=1)
    # the -f_i term of the subtraction: row sums of w_j G*_ij over all j != i
    gstar_rows = np.einsum("j,ij->i", w, np.sum(gtab, axis=2))
    values -= gstar_rows[:, None] * fld.values
    return SphereField(grid, values)


def l2_discrepancy(a: SphereField, b: SphereField) -> float:
    """Grid-weighted relative L2 distance between two fields."""
    w = a.grid.row_weights[:, None]
    num = float((w * (a.values - b.values) ** 2).sum())
    den = float((w * b.values**2).sum())
    return math.sqrt(num / den) if den > 0.0 else math.sqrt(num)
