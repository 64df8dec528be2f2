"""Command-line front end: ``garsia-kit <subcommand> [options]``.

Every subcommand reads function specs from JSON files, runs one computation
and writes a single CSV, JSON or SVG document (to ``--out`` or stdout).

Output columns
--------------
phi-grid (csv)
    ``r,theta,phi``
norm, lipschitz (csv)
    ``r,max_phi``: the boundary trend of the search
section5 (csv)
    ``k,P_eta,P_log_inv_eta,omega_I,omega_J_log_inv_eps``
probe-extreme (csv)
    ``index,norm_plus,norm_minus,margin,oscillation,violation``

Exit codes: 0 on success, 2 on input errors (bad flags, unreadable or
malformed specs, failed preconditions), 3 when ``--assert`` is given and the
computed result violates the subcommand's invariant.  Floats are written with
17 significant digits so that repeated runs are byte identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .boundary import make_grid
from .errors import GarsiaError
from .extremal import (
    EvidenceVerdict,
    Section5Config,
    build_extremal_blaschke,
    check_inner_identity,
    check_product_identity,
    disk_algebra_test,
    outer_extremal_witness,
    product_extremal_witness,
    section5_build,
    section5_csv,
    section5_report,
)
from .garsia import PhiEvaluator, SearchConfig, Verdict, garsia_norm, sup_norm
from .geometry import extreme_probe, lipschitz_garsia_norm, nonextreme_decompose
from .specs import Outer, dump_spec, load_spec

__all__ = ["main", "run", "build_parser", "dumps"]

EXIT_OK, EXIT_INPUT, EXIT_ASSERT = 0, 2, 3

PHI_GRID_COLUMNS = ("r", "theta", "phi")
PROBE_COLUMNS = ("index", "norm_plus", "norm_minus", "margin", "oscillation", "violation")

# Linear ramp for SVG heatmaps: Phi = min maps to RAMP_LOW, Phi = max to RAMP_HIGH.
RAMP_LOW = (247, 251, 255)
RAMP_HIGH = (8, 48, 107)


class InputError(Exception):
    """Bad command-line input that argparse itself cannot detect."""


def _fail(args, message: str):
    """Record a failed ``--assert`` invariant; output is still written."""
    args.failures.append(message)


# -- deterministic serialization ----------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with sorted keys and floats written as ``format(v, '.17g')``.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj, key=str)
        ]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return _fmt(v) if np.isfinite(v) else json.dumps(str(v))
    if obj is None:
        return "null"
    if hasattr(obj, "value") and isinstance(obj.value, str):  # str enums
        return json.dumps(obj.value)
    return json.dumps(str(obj))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# -- argument parsing -----------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--spec", type=Path, help="path to a FunctionSpec JSON file")
    p.add_argument("--grid", type=int, default=14, metavar="LOG2_N", help="circle grid exponent (default 14)")
    p.add_argument("--rmax", type=float, default=None, help="largest interior radius")
    p.add_argument("--out", type=Path, default=None, help="output path (default stdout)")
    p.add_argument("--format", default=None, help="output format")
    p.add_argument("--assert", dest="check", action="store_true", help="exit 3 if the invariant fails")
    p.add_argument("--tol", type=float, default=None, help="tolerance used by --assert")
    p.add_argument("--echo-spec", action="store_true", help="print the canonical input spec(s) and exit")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="garsia-kit", description="Garsia norms and G-extremality on the disk.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_)

    p = add("phi-grid", "Phi_f over a polar grid (csv or svg).")
    p.add_argument("--nr", type=int, default=32, help="number of radii (default 32)")
    p.add_argument("--ntheta", type=int, default=64, help="number of angles (default 64)")

    add("norm", "Garsia norm estimate and attainment verdict (json, or csv trend).")

    p = add("identities", "Residuals of the inner, product and parallelogram identities (json).")
    p.add_argument("--inner", type=Path, required=True, help="inner function spec I")
    p.add_argument("--outer", type=Path, required=True, help="bounded analytic spec F")
    p.add_argument("--points", type=int, default=100, help="number of random points (default 100)")
    p.add_argument("--seed", type=int, default=0, help="seed for the random points (default 0)")

    p = add("extremal-check", "Outer, product and disk-algebra extremality verdicts (json).")
    p.add_argument("--outer", type=Path, required=True, help="outer or bounded analytic spec F")
    p.add_argument("--inner", type=Path, default=None, help="inner function spec I")

    p = add("build-blaschke", "Extremal Blaschke product for the modulus of --spec (json).")
    p.add_argument("--k", type=int, default=12, help="number of zeros (default 12)")

    p = add("section5", "Section-5 construction table (csv or json).")
    p.add_argument("--k", type=int, default=12, help="depth K (default 12)")

    p = add("decompose", "Midpoint decomposition of B phi for non-extreme phi (json).")
    p.add_argument("--mode", choices=("analytic", "real"), default="analytic")
    p.add_argument("--k", type=int, default=12, help="zeros of the Blaschke factor (default 12)")

    p = add("probe-extreme", "Norm margins around a norm-attaining unit-norm f (csv or json).")
    p.add_argument("--perturb", type=Path, action="append", default=None, help="perturbation spec (repeatable)")

    p = add("lipschitz", "Lipschitz-Garsia norm for 0 < alpha < 1/2 (json, or csv trend).")
    p.add_argument("--alpha", type=float, required=True)
    return parser


FORMATS = {
    "phi-grid": ("csv", "svg"),
    "norm": ("json", "csv"),
    "identities": ("json",),
    "extremal-check": ("json",),
    "build-blaschke": ("json",),
    "section5": ("csv", "json"),
    "decompose": ("json",),
    "probe-extreme": ("csv", "json"),
    "lipschitz": ("json", "csv"),
}

NEEDS_SPEC = {"phi-grid", "norm", "build-blaschke", "decompose", "probe-extreme", "lipschitz"}


def _read_spec(path: Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read spec ({exc.strerror})") from exc
    try:
        return load_spec(text)
    except GarsiaError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _spec_paths(args) -> list:
    paths = [getattr(args, name, None) for name in ("spec", "inner", "outer")]
    paths += list(getattr(args, "perturb", None) or [])
    return [p for p in paths if p is not None]


def _search_cfg(args) -> SearchConfig:
    return SearchConfig(r_max=args.rmax)


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


# -- subcommands ----------------------------------------------------------------


def _ramp(t: float) -> str:
    rgb = [round(lo + t * (hi - lo)) for lo, hi in zip(RAMP_LOW, RAMP_HIGH)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _svg(radii, theta, values) -> str:
    """Annular-sector heatmap; colors are linear in Phi between min and max."""
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo if hi > lo else 1.0
    size, c, R = 360, 180.0, 160.0
    dr = radii[1] - radii[0] if len(radii) > 1 else radii[0] or 1.0
    dt = theta[1] - theta[0] if len(theta) > 1 else 2 * np.pi
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size + 40}" '
        f'viewBox="0 0 {size} {size + 40}">',
        f'<circle cx="{c:.3f}" cy="{c:.3f}" r="{R:.3f}" fill="none" stroke="#000000" stroke-width="0.5"/>',
    ]
    for i, r in enumerate(radii):
        r0, r1 = max(r - dr / 2, 0.0) * R, min(r + dr / 2, 1.0) * R
        for j, t in enumerate(theta):
            a0, a1 = t - dt / 2, t + dt / 2
            pts = [(r0, a0), (r1, a0), (r1, a1), (r0, a1)]
            poly = " ".join(f"{c + rr * np.cos(a):.3f},{c - rr * np.sin(a):.3f}" for rr, a in pts)
            color = _ramp((values[i, j] - lo) / span)
            out.append(f'<polygon points="{poly}" fill="{color}" stroke="none"/>')
    out.append(
        f'<text x="10" y="{size + 25}" font-family="monospace" font-size="11">'
        f"Phi min {_fmt(lo)} ({_ramp(0.0)}) max {_fmt(hi)} ({_ramp(1.0)})</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_phi_grid(args, specs):
    f = specs["spec"]
    grid = make_grid(args.grid)
    if args.nr < 1 or args.ntheta < 1:
        raise InputError("--nr and --ntheta must be positive")
    rmax = 0.95 if args.rmax is None else args.rmax
    if not 0.0 < rmax < 1.0:
        raise InputError(f"--rmax must lie in (0, 1), got {rmax}")
    radii = np.linspace(0.0, rmax, args.nr)
    theta = 2 * np.pi * np.arange(args.ntheta) / args.ntheta
    ev = PhiEvaluator(f, grid)
    z = radii[:, None] * np.exp(1j * theta[None, :])
    values = np.asarray(ev(z.ravel()), dtype=float).reshape(z.shape)
    if args.check:
        bound = sup_norm(f, grid) ** 2 + _tol(args, 1e-9)
        if values.min() < -_tol(args, 1e-9) or values.max() > bound:
            _fail(args, f"Phi outside [0, ||f||_inf^2]: range [{values.min()}, {values.max()}]")
    if args.format == "svg":
        return _svg(radii, theta, values)
    rows = [(float(r), float(t), float(values[i, j])) for i, r in enumerate(radii) for j, t in enumerate(theta)]
    return _csv(PHI_GRID_COLUMNS, rows)


def _norm_output(args, est, check):
    if args.check:
        check(est)
    if args.format == "csv":
        return est.trend_csv()
    return dumps(est.to_dict()) + "\n"


def cmd_norm(args, specs):
    f = specs["spec"]
    grid = make_grid(args.grid)
    est = garsia_norm(f, _search_cfg(args), grid)

    def check(e):
        sup = sup_norm(f, grid)
        if e.lower_bound > sup + _tol(args, 1e-9):
            _fail(args, f"lower bound {e.lower_bound} exceeds sup norm {sup}")

    return _norm_output(args, est, check)


def cmd_lipschitz(args, specs):
    est = lipschitz_garsia_norm(specs["spec"], args.alpha, _search_cfg(args), make_grid(args.grid))

    def check(e):
        if e.attained is not Verdict.ATTAINED:
            _fail(args, f"weighted supremum verdict is {e.attained}, expected Attained")

    return _norm_output(args, est, check)


def cmd_identities(args, specs):
    I, F = specs["inner"], specs["outer"]
    grid = make_grid(args.grid)
    rmax = 0.9 if args.rmax is None else args.rmax
    if not 0.0 < rmax < 1.0:
        raise InputError(f"--rmax must lie in (0, 1), got {rmax}")
    rng = np.random.default_rng(args.seed)
    z = np.sqrt(rng.uniform(0, rmax**2, args.points)) * np.exp(2j * np.pi * rng.uniform(size=args.points))
    from .geometry import parallelogram_check

    res = {
        "inner_identity": check_inner_identity(I, z, grid=grid),
        "product_identity": check_product_identity(I, F, z, grid=grid),
        "parallelogram": parallelogram_check(I, F, z, grid),
    }
    tol = _tol(args, 1e-8)
    report = {"residuals": res, "points": args.points, "seed": args.seed, "rmax": rmax, "tol": tol}
    if args.check:
        bad = {k: v for k, v in res.items() if not v <= tol}
        if bad:
            _fail(args, f"residuals above {tol}: {bad}")
    return dumps(report) + "\n"


def cmd_extremal_check(args, specs):
    F, I = specs["outer"], specs.get("inner")
    grid = make_grid(args.grid)
    report = {}
    if isinstance(F, Outer):
        report["outer_witness"] = outer_extremal_witness(F).to_dict()
    if I is not None:
        report["product_witness"] = product_extremal_witness(F, I).to_dict()
        report["disk_algebra"] = disk_algebra_test(F, I, grid=grid)
    if not report:
        raise InputError("--outer must be an outer spec unless --inner is given")
    verdicts = [v["verdict"] for k, v in report.items() if k.endswith("witness")]
    report["evidence"] = any(v == str(EvidenceVerdict.EVIDENCE) for v in verdicts)
    if args.check and not report["evidence"]:
        _fail(args, "no witness ladder produced Extremal-evidence")
    return dumps(report) + "\n"


def cmd_build_blaschke(args, specs):
    phi = specs["spec"]
    build = build_extremal_blaschke(phi, args.k, phi=phi if phi.analytic else None, grid=make_grid(args.grid))
    out = build.to_dict()
    if args.check:
        tol = _tol(args, 1e-8)
        if build.max_residual is None:
            _fail(args, "--assert needs an analytic spec so the residual can be evaluated")
        elif not build.max_residual <= tol:
            _fail(args, f"max residual {build.max_residual} above {tol}")
    return dumps(out) + "\n"


def cmd_section5(args, specs):
    grid = make_grid(args.grid)
    res = section5_build(Section5Config(K=args.k), grid)
    report = section5_report(result=res)
    if args.check:
        failures = []
        rows = report["rows"]
        if not (report["trends"]["P_eta"]["k>=3"] and rows[-1][1] > 0.99):
            failures.append("P_eta not strictly increasing for k >= 3 with last value > 0.99")
        if not (report["trends"]["P_log_inv_eta"]["all"] and rows[-1][2] > 3.0):
            failures.append("P(log 1/eta) not strictly increasing with last value > 3")
        gap = abs(report["log_integral_grid"] - report["log_integral_exact"])
        if not gap <= 2 * args.k / grid.n:
            failures.append(f"log integral differs from closed form by {gap}")
        for msg in failures:
            _fail(args, msg)
    if args.format == "json":
        return dumps(report) + "\n"
    return section5_csv(report)


def cmd_decompose(args, specs):
    dec = nonextreme_decompose(specs["spec"], args.mode, K=args.k, cfg=_search_cfg(args), grid=make_grid(args.grid))
    if args.check and not dec.valid:
        _fail(args, "decomposition checks failed")
    return dumps(dec.to_dict()) + "\n"


def cmd_probe_extreme(args, specs):
    perts = specs.get("perturb")
    res = extreme_probe(specs["spec"], perts, _search_cfg(args), make_grid(args.grid))
    if args.check and any(res.violations):
        _fail(args, f"extreme-point violations at indices {[i for i, v in enumerate(res.violations) if v]}")
    if args.format == "json":
        return dumps(res.to_dict()) + "\n"
    rows = [
        (i, float(pm[0]), float(pm[1]), float(m), float(o), str(bool(v)).lower())
        for i, (pm, m, o, v) in enumerate(zip(res.norms, res.margins, res.oscillations, res.violations))
    ]
    return _csv(PROBE_COLUMNS, rows)


COMMANDS = {
    "phi-grid": cmd_phi_grid,
    "norm": cmd_norm,
    "identities": cmd_identities,
    "extremal-check": cmd_extremal_check,
    "build-blaschke": cmd_build_blaschke,
    "section5": cmd_section5,
    "decompose": cmd_decompose,
    "probe-extreme": cmd_probe_extreme,
    "lipschitz": cmd_lipschitz,
}


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    """Parse ``argv``, run one subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    cmd = args.command
    try:
        allowed = FORMATS[cmd]
        if args.format is None:
            args.format = allowed[0]
        elif args.format not in allowed:
            raise InputError(f"--format for {cmd} must be one of {', '.join(allowed)}")
        if cmd in NEEDS_SPEC and args.spec is None:
            raise InputError(f"{cmd} requires --spec")
        specs = {}
        for name in ("spec", "inner", "outer"):
            path = getattr(args, name, None)
            if path is not None:
                specs[name] = _read_spec(path)
        if getattr(args, "perturb", None):
            specs["perturb"] = [_read_spec(p) for p in args.perturb]
        if args.echo_spec:
            _emit("".join(dump_spec(_read_spec(p)) + "\n" for p in _spec_paths(args)), args.out)
            return EXIT_OK
        args.failures = []
        text = COMMANDS[cmd](args, specs)
    except (InputError, GarsiaError) as exc:
        print(f"garsia-kit {cmd}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(text, args.out)
    for msg in args.failures:
        print(f"garsia-kit {cmd}: assertion failed: {msg}", file=sys.stderr)
    return EXIT_ASSERT if args.failures else EXIT_OK


def run(argv=None) -> int:
    """Alias of :func:`main`."""
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
