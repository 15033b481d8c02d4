"""Command-line interface: kernel evaluation, reference tables, curve data,
and the PDE solvers on file-based fields.

Commands: eval, table, error-curve, gg-star, solve.  Exit codes: 0 success,
2 invalid configuration, 3 numerical failure.  All numeric CSV output uses
%.17e, comma delimiters and LF endings, so identical configurations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import spectral
from .geometry import EvalPoint, ShellParams, default_radius_km, make_params
from .integral import QuadratureSpec, green_antipode, green_equator, green_quadrature
from .series import (
    GreenResult,
    TruncationPolicy,
    error_curve,
    g_star,
    green_direct,
    green_split,
    split_values,
)

# gamma/gamma_star ratios of the L_d = 1000 km reference table, as decimal
# strings: the published split-sum column was generated with the ratios
# rounded through binary32, so the preset reproduces that rounding exactly
# while the quadrature column uses the decimal values.
TABLE1_RATIOS = [
    "0.001", "0.005", "0.01", "0.02", "0.03", "0.04", "0.05", "0.06", "0.07",
    "0.08", "0.09", "0.1", "0.15", "0.2", "0.25", "0.3", "0.4", "0.5", "0.6",
    "0.7", "0.8", "0.9", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10",
]
TABLE2_EQUATOR_LD = [300 + 100 * k for k in range(18)]   # cos(gamma) = 0
TABLE2_ANTIPODE_LD = [600 + 100 * k for k in range(15)]  # cos(gamma) = -1
FIG3_LD = [50.0, 100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0,
           900.0, 1000.0]
PRESET_EPS = 1e-18


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from exc


def _fmt(x: float) -> str:
    return "%.17e" % x


def _write_rows(header, rows, fmt, output) -> None:
    if fmt == "csv":
        lines = [",".join(header)]
        for row in rows:
            lines.append(
                ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row)
            )
        text = "\n".join(lines) + "\n"
    else:
        objs = [dict(zip(header, row)) for row in rows]
        text = json.dumps(objs, indent=2) + "\n"
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _single(values, flag) -> float:
    if values is None or len(values) != 1:
        raise ConfigError(f"{flag} requires exactly one value here")
    return values[0]


def cmd_eval(args) -> int:
    params = make_params(args.radius_km, _single(args.ld_km, "--ld-km"))
    has_ratio = args.gamma_ratio is not None
    has_cos = args.cos_gamma is not None
    if has_ratio == has_cos:
        raise ConfigError("exactly one of --gamma-ratio or --cos-gamma is required")
    if has_ratio:
        gamma = _single(args.gamma_ratio, "--gamma-ratio") * params.gamma_star
        if not 0.0 < gamma <= math.pi:
            raise ConfigError(f"gamma = {gamma} outside (0, pi]")
        point = EvalPoint.from_gamma(gamma)
    else:
        point = EvalPoint.from_cos(_single(args.cos_gamma, "--cos-gamma"))

    method = "split" if args.method == "auto" else args.method
    if args.precision == "dd" and method != "split":
        raise ConfigError("--precision dd is only available with the split method")
    if method == "closed":
        if point.cos_gamma == -1.0:
            res = GreenResult(green_antipode(params), "closed_form", 0, 0.0)
        elif point.cos_gamma == 0.0:
            res = GreenResult(green_equator(params), "closed_form", 0, 0.0)
        else:
            raise ConfigError("closed forms exist only at --cos-gamma -1 or 0")
    elif method == "direct":
        if args.l_trunc is None:
            raise ConfigError("--method direct requires --l-trunc")
        res = green_direct(params, point, args.l_trunc)
    elif method == "split":
        if args.l_trunc is not None:
            policy = TruncationPolicy.fixed(args.l_trunc)
        else:
            policy = TruncationPolicy.auto(args.epsilon)
        res = green_split(params, point, policy, precision=args.precision)
    else:
        res = green_quadrature(params, point, _quad_spec(args.rel_tol))
    _write_rows(
        ["value", "method", "terms_used", "est_error"],
        [[res.value, res.method, res.terms_used, res.est_error]],
        args.format,
        args.output,
    )
    return 0


def _quad_spec(rel_tol: float) -> QuadratureSpec:
    # a very tight relative request should not silently stop at the default
    # absolute floor
    return QuadratureSpec(rel_tol=rel_tol, abs_tol=min(1e-15, rel_tol))


def _table_row(params: ShellParams, ratio, p_split, p_quad, closed, rel_tol):
    g_split = green_split(
        params, p_split, TruncationPolicy.auto(PRESET_EPS), precision="dd"
    ).value
    g_quad = green_quadrature(params, p_quad, _quad_spec(rel_tol)).value
    ref = closed if closed is not None else g_quad
    rel = abs(g_split - ref) / abs(ref)
    return [
        params.rossby_km, ratio, p_quad.gamma, g_split, g_quad,
        "" if closed is None else _fmt(closed), rel,
    ]


def cmd_table(args) -> int:
    header = ["ld_km", "gamma_ratio", "gamma_rad", "g_split", "g_quadrature",
              "g_closed", "rel_diff"]
    rows = []
    if args.preset == "table1":
        params = make_params(args.radius_km, 1000.0)
        for rs in TABLE1_RATIOS:
            p_split = EvalPoint.from_gamma(float(np.float32(rs)) * params.gamma_star)
            p_quad = EvalPoint.from_gamma(float(rs) * params.gamma_star)
            rows.append(
                _table_row(params, float(rs), p_split, p_quad, None, args.rel_tol)
            )
    elif args.preset == "table2":
        for cos_g, lds in ((0.0, TABLE2_EQUATOR_LD), (-1.0, TABLE2_ANTIPODE_LD)):
            for ld in lds:
                params = make_params(args.radius_km, float(ld))
                point = EvalPoint.from_cos(cos_g)
                closed = (
                    green_equator(params) if cos_g == 0.0 else green_antipode(params)
                )
                rows.append(
                    _table_row(params, point.gamma / params.gamma_star,
                               point, point, closed, args.rel_tol)
                )
    else:
        if not args.ld_km:
            raise ConfigError("custom tables need --ld-km")
        ratios = args.gamma_ratio or []
        coss = args.cos_gamma or []
        if not ratios and not coss:
            raise ConfigError("no angles requested: give --gamma-ratio or --cos-gamma")
        for ld in args.ld_km:
            params = make_params(args.radius_km, ld)
            for r in ratios:
                gamma = r * params.gamma_star
                if not 0.0 < gamma <= math.pi:
                    raise ConfigError(f"gamma-ratio {r} puts gamma outside (0, pi]")
                point = EvalPoint.from_gamma(gamma)
                rows.append(_table_row(params, r, point, point, None, args.rel_tol))
            for c in coss:
                point = EvalPoint.from_cos(c)
                closed = None
                if c == -1.0:
                    closed = green_antipode(params)
                elif c == 0.0:
                    closed = green_equator(params)
                rows.append(
                    _table_row(params, point.gamma / params.gamma_star,
                               point, point, closed, args.rel_tol)
                )
    _write_rows(header, rows, args.format, args.output)
    return 0


def cmd_error_curve(args) -> int:
    if args.preset == "fig2":
        cases = [(1000.0, 300_000), (100.0, 2_000_000)]
    else:
        if args.l_max is None or args.l_max < 2:
            raise ConfigError("--l-max must be >= 2")
        cases = [(_single(args.ld_km, "--ld-km"), args.l_max)]
    ratio = args.gamma_ratio[0] if args.gamma_ratio else 1.0
    rows = []
    for ld, l_max in cases:
        params = make_params(args.radius_km, ld)
        point = EvalPoint.from_gamma(ratio * params.gamma_star)
        for l, err in error_curve(params, point, l_max):
            rows.append([ld, int(l), err])
    _write_rows(["ld_km", "l", "abs_error"], rows, args.format, args.output)
    return 0


def cmd_gg_star(args) -> int:
    if args.preset == "fig3":
        lds = FIG3_LD
        ratios = np.logspace(math.log10(0.1), math.log10(20.0), 41)
    else:
        lds = args.ld_km
        if not lds:
            raise ConfigError("gg-star needs --ld-km")
        ratios = np.asarray(args.gamma_ratio or [], dtype=float)
        if ratios.size == 0:
            raise ConfigError("gg-star needs --gamma-ratio")
    rows = []
    for ld in lds:
        params = make_params(args.radius_km, ld)
        gammas = ratios * params.gamma_star
        keep = (gammas > 0.0) & (gammas <= math.pi)
        for r in ratios[~keep]:
            print(
                f"warning: skipping gamma-ratio {r} for L_d={ld}: "
                "angle outside (0, pi]",
                file=sys.stderr,
            )
        pts = [EvalPoint.from_gamma(g) for g in gammas[keep]]
        g_vals = split_values(
            params, np.array([p.one_minus_cos for p in pts]), args.epsilon
        )
        for r, p, g in zip(ratios[keep], pts, g_vals):
            gs = g_star(p)
            rows.append([ld, float(r), float(g), gs, float(g) - gs])
    _write_rows(
        ["ld_km", "gamma_ratio", "g", "g_star", "g_minus_g_star"],
        rows, args.format, args.output,
    )
    return 0


def _field_header_line(grid: spectral.SphereGrid) -> str:
    return (
        f"# sphere-grid n_theta={grid.n_theta} n_phi={grid.n_phi} "
        f"radius_km={grid.radius_km!r}"
    )


def write_field(fld: spectral.SphereField, path: str | None) -> None:
    """theta-major rows of theta,phi,value under a self-describing header."""
    grid = fld.grid
    lines = [_field_header_line(grid)]
    for i in range(grid.n_theta):
        for j in range(grid.n_phi):
            lines.append(
                f"{_fmt(grid.theta[i])},{_fmt(grid.phi[j])},{_fmt(fld.values[i, j])}"
            )
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def read_field(path: str) -> spectral.SphereField:
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read field file: {exc}") from exc
    if not lines or not lines[0].startswith("# sphere-grid"):
        raise ConfigError("field file missing '# sphere-grid' header")
    meta = {}
    for tok in lines[0].removeprefix("# sphere-grid").split():
        key, _, val = tok.partition("=")
        meta[key] = val
    try:
        grid = spectral.SphereGrid.build(
            int(meta["n_theta"]), int(meta["n_phi"]), float(meta["radius_km"])
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad field header: {exc}") from exc
    body = lines[1:]
    if len(body) != grid.node_count:
        raise ConfigError(f"field has {len(body)} rows, grid wants {grid.node_count}")
    values = np.empty((grid.n_theta, grid.n_phi))
    for k, ln in enumerate(body):
        parts = ln.split(",")
        if len(parts) != 3:
            raise ConfigError(f"malformed field row {k + 1}: {ln!r}")
        i, j = divmod(k, grid.n_phi)
        try:
            theta, phi, val = (float(s) for s in parts)
        except ValueError as exc:
            raise ConfigError(f"malformed field row {k + 1}: {ln!r}") from exc
        if abs(theta - grid.theta[i]) > 1e-9 or abs(phi - grid.phi[j]) > 1e-9:
            raise ConfigError(f"node {k + 1} does not match the declared grid")
        values[i, j] = val
    if not np.all(np.isfinite(values)):
        raise ConfigError("field contains non-finite values")
    return spectral.SphereField(grid, values)


def _preset_field(name: str, grid: spectral.SphereGrid, params: ShellParams):
    th = grid.theta[:, None]
    ph = grid.phi[None, :]
    if name == "y20":
        vals = math.sqrt(5.0 / (16.0 * math.pi)) * (3.0 * np.cos(th) ** 2 - 1.0)
        vals = np.broadcast_to(vals, (grid.n_theta, grid.n_phi)).copy()
    elif name == "gaussian-bump":
        # bump of angular width 5 gamma*, centred off-pole so all orders mix
        th0, ph0 = 1.0, 1.0
        cosd = np.cos(th) * math.cos(th0) + np.sin(th) * math.sin(th0) * np.cos(ph - ph0)
        gam = np.arccos(np.clip(cosd, -1.0, 1.0))
        width = 5.0 * params.gamma_star
        vals = np.exp(-((gam / width) ** 2))
    else:
        raise ConfigError(f"unknown forcing preset {name!r}")
    return spectral.SphereField(grid, vals)


def cmd_solve(args) -> int:
    params = make_params(args.radius_km, _single(args.ld_km, "--ld-km"))
    if args.input and args.preset:
        raise ConfigError("give either --input or --preset, not both")
    if args.input:
        fld = read_field(args.input)
    elif args.preset:
        grid = spectral.SphereGrid.build(args.n_theta, args.n_phi, args.radius_km)
        fld = _preset_field(args.preset, grid, params)
    else:
        raise ConfigError("solve needs --input FILE or --preset NAME")
    l_max = args.l_max
    if l_max is None:
        l_max = min(fld.grid.n_theta - 1, (fld.grid.n_phi - 1) // 2)
    if args.method in ("spectral", "both"):
        psi = spectral.solve_spectral(fld, params, l_max)
    else:
        psi = spectral.solve_convolution(fld, params, args.epsilon)
    if args.method == "both":
        psi_conv = spectral.solve_convolution(fld, params, args.epsilon)
        disc = spectral.l2_discrepancy(psi_conv, psi)
        print(f"relative_l2_discrepancy,{_fmt(disc)}")
    write_field(psi, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sphgreen",
        description="Screened-Poisson kernel on the sphere: evaluation, "
        "reference tables, convergence data, and PDE solves.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, angles=True):
        sp.add_argument("--ld-km", type=_floats, default=None,
                        help="screening (Rossby) radius in km, value or comma list")
        sp.add_argument("--radius-km", type=float, default=None,
                        help="sphere radius in km (default 6371, "
                        "env GREEN_DEFAULT_RADIUS_KM)")
        if angles:
            sp.add_argument("--gamma-ratio", type=_floats, default=None,
                            help="gamma / gamma_star, value or comma list")
        sp.add_argument("--epsilon", type=float, default=1e-14,
                        help="bracket-coefficient cutoff for auto truncation")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", default=None, help="output path (default stdout)")

    sp = sub.add_parser("eval", help="evaluate the kernel at one angle")
    common(sp)
    sp.add_argument("--cos-gamma", type=_floats, default=None)
    sp.add_argument("--method",
                    choices=("direct", "split", "quadrature", "closed", "auto"),
                    default="auto")
    sp.add_argument("--precision", choices=("double", "dd"), default="double")
    sp.add_argument("--l-trunc", type=int, default=None, help="fixed truncation index")
    sp.add_argument("--rel-tol", type=float, default=1e-13)

    sp = sub.add_parser("table", help="kernel tables across angles and radii")
    common(sp)
    sp.add_argument("--cos-gamma", type=_floats, default=None)
    sp.add_argument("--preset", choices=("table1", "table2"), default=None)
    sp.add_argument("--rel-tol", type=float, default=1e-13)

    sp = sub.add_parser("error-curve", help="split-sum error vs number of terms")
    common(sp)
    sp.add_argument("--preset", choices=("fig2",), default=None)
    sp.add_argument("--l-max", type=int, default=None)

    sp = sub.add_parser("gg-star", help="kernel against the unscreened log kernel")
    common(sp)
    sp.add_argument("--preset", choices=("fig3",), default=None)

    sp = sub.add_parser("solve", help="solve the screened Poisson equation")
    common(sp, angles=False)
    sp.add_argument("--method", choices=("spectral", "convolution", "both"),
                    default="spectral")
    sp.add_argument("--preset", choices=("y20", "gaussian-bump"), default=None)
    sp.add_argument("--input", default=None, help="forcing field CSV")
    sp.add_argument("--l-max", type=int, default=None)
    sp.add_argument("--n-theta", type=int, default=33)
    sp.add_argument("--n-phi", type=int, default=65)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.radius_km is None:
        args.radius_km = default_radius_km()
    handlers = {
        "eval": cmd_eval,
        "table": cmd_table,
        "error-curve": cmd_error_curve,
        "gg-star": cmd_gg_star,
        "solve": cmd_solve,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
