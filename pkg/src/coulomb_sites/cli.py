"""Command-line interface.

Exit codes: 0 success (``certify``: convexity violated), 1 convexity holds or
a verification suite failed, 2 bad input, 3 infeasible density.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import asymptotics, canonical, grandcanonical, search, verify
from .config import ConfigError, RunConfig, load_config, load_fixture
from .errors import InfeasibleDensity, SiteModelError
from .fixtures import diamond

EXIT_OK, EXIT_CONVEX, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3


class _InputError(Exception):
    pass


def _sig12(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _sig12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sig12(v) for v in obj]
    if isinstance(obj, np.generic):
        return _sig12(obj.item())
    return obj


def dumps(obj) -> str:
    return json.dumps(_sig12(obj), indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    """Write to ``out`` atomically (no partial file on failure) or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _load(args) -> RunConfig:
    if args.config and args.fixture:
        raise _InputError("give either --config or --fixture, not both")
    if args.fixture:
        return load_fixture(args.fixture, args.exponent)
    if args.config:
        return load_config(args.config, args.exponent)
    raise _InputError("missing --config PATH (or --fixture NAME)")


def _int_param(args, rc: RunConfig, name: str, section: dict, default=None):
    val = getattr(args, name, None)
    if val is None:
        val = section.get(name, rc.run.get(name, default))
    if val is None:
        raise _InputError(f"missing parameter {name}")
    return int(val)


def format_table(profile: canonical.EnergyProfile) -> str:
    lines = [f"{'N':>2}  {'E[V,N]':>9}  minimizer"]
    for N in sorted(profile.energies):
        if N == 0:
            continue
        labels = " | ".join(o.label() for o in profile.minimizers[N])
        lines.append(f"{N:>2}  {profile.energies[N]:>9.4f}  {labels}")
    if profile.violations:
        lines.append(f"convexity violated at N = {', '.join(map(str, profile.violations))}")
    return "\n".join(lines) + "\n"


def cmd_table(args) -> int:
    rc = _load(args)
    cfg, V = rc.require_geometry(), rc.require_potential()
    profile = canonical.energy_profile(cfg, V)
    sys.stdout.write(format_table(profile))
    if args.out:
        _emit(dumps(profile.to_dict()), args.out)
    return EXIT_OK


def cmd_dual(args) -> int:
    rc = _load(args)
    cfg, rho = rc.require_geometry(), rc.require_density()
    sym = rc.symmetry if args.symmetrize else None
    cert = grandcanonical.dual_potential(cfg, rho, sym, args.selection)
    _emit(dumps(cert.to_dict()), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    rc = _load(args)
    cfg, V = rc.require_geometry(), rc.require_potential()
    N = _int_param(args, rc, "N", rc.run)
    report = search.certify_counterexample(cfg, V, N)
    _emit(dumps(report.to_dict()), args.out)
    return EXIT_OK if report.passed else EXIT_CONVEX


def cmd_grid(args) -> int:
    rc = _load(args)
    cfg = rc.require_geometry()
    g = rc.grid
    try:
        rows = search.hardness_grid(cfg, tuple(g["v1_range"]), tuple(g["v3_range"]),
                                    args.steps or g.get("steps", 100), float(g.get("fixed", -2.0)),
                                    int(g.get("N", 3)))
    except KeyError as exc:
        raise _InputError(f"[grid] missing {exc.args[0]}") from None
    buf = io.StringIO()
    buf.write(",".join(search.GRID_HEADER) + "\n")
    for r in rows:
        buf.write(",".join(repr(x) for x in r) + "\n")
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    rc = _load(args)
    s = rc.search
    K = int(s.get("K", rc.config.K if rc.config is not None else 6))
    seed = args.seed if args.seed is not None else int(s.get("seed", 0))
    trials = args.trials if args.trials is not None else int(s.get("trials", 1000))
    center = None
    if s.get("center") == "diamond":
        center = diamond()
    elif rc.config is not None and "jitter" in s:
        center = rc.config
    samples = search.random_geometry_search(
        K, trials, float(s.get("box_halfwidth", 2.0)), seed,
        rho=rc.density, planar=bool(s.get("planar", True)),
        keep_all=bool(s.get("keep_all", False)), jobs=args.jobs,
        center=center, jitter=float(s.get("jitter", 0.05)),
    )
    _emit(dumps([x.to_dict() for x in samples]), args.out)
    return EXIT_OK


def cmd_quantum(args) -> int:
    rc = _load(args)
    cfg, V = rc.require_geometry(), rc.require_potential()
    ell = float(args.ell if args.ell is not None else rc.quantum.get("ell", 1.0))
    report = asymptotics.binding_report(cfg, V, ell, rc.quantum.get("n_max"))
    doc = report.to_dict()
    if np.all(np.asarray(V) < 0):
        system = asymptotics.scale_system(cfg, V, ell)
        doc["charges"] = system.charges.tolist()
        doc["lieb_max_binding"] = asymptotics.lieb_max_binding(system)
    if args.csv:
        lines = ["N,ell_E"] + [f"{N},{e!r}" for N, e in asymptotics.step_profile(cfg, V)]
        _emit("\n".join(lines) + "\n", args.csv)
    _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 0
    trials = args.trials if args.trials is not None else 200
    results = [
        verify.four_site_suite(trials, seed),
        verify.collinear_suite(trials, seed),
        verify.exchange_identity_suite(trials, seed),
        verify.lp_oracle_suite(trials, seed),
    ]
    _emit(dumps([r.to_dict() for r in results]), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CONVEX


COMMANDS = {
    "table": (cmd_table, "canonical energies and minimizers for N = 1..K"),
    "dual": (cmd_dual, "dual potential certificate at the configured density"),
    "certify": (cmd_certify, "exhaustive convexity check at N (exit 0 when violated)"),
    "grid": (cmd_grid, "hardness CSV over (|v1|, |v3|)"),
    "search": (cmd_search, "random geometry search for functional gaps"),
    "quantum": (cmd_quantum, "leading-order binding report for scaled nuclei"),
    "verify": (cmd_verify, "randomized suites: functional equality, exchange identity, LP oracle"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--fixture", metavar="NAME", help="bundled config, e.g. diamond_vstar")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--seed", type=int)
    common.add_argument("--exponent", type=float, help="override the Riesz exponent")
    common.add_argument("--jobs", type=int, default=1)
    parser = argparse.ArgumentParser(prog="coulomb-sites", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (func, help_) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        if name == "dual":
            p.add_argument("--symmetrize", action="store_true")
            p.add_argument("--selection", choices=grandcanonical.SELECTIONS, default="flat")
        if name == "certify":
            p.add_argument("--N", type=int)
        if name == "grid":
            p.add_argument("--steps", type=int)
        if name in ("search", "verify"):
            p.add_argument("--trials", type=int)
        if name == "quantum":
            p.add_argument("--ell", type=float)
            p.add_argument("--csv", metavar="PATH", help="step profile (N, ell*E)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InfeasibleDensity as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, SiteModelError, _InputError, ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
