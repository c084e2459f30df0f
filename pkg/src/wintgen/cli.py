"""Command line front end.

Subcommands: generate | lift | construct | check-wintgen | gauss-check |
centers | roundtrip | all.  Configuration comes from a JSON document plus
flag overrides; every run is deterministic for a fixed config and seed.
Exit codes: 0 all checked residuals within tolerance, 1 a tolerance was
exceeded, 2 usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import exports
from .pipeline import PipelineConfig, run_full
from .weierstrass import PoleNormalizationError

STAGE_BY_COMMAND = {
    "generate": ("generate",),
    "lift": ("lift",),
    "construct": ("construct",),
    "check-wintgen": ("construct",),
    "gauss-check": ("construct", "gauss"),
    "centers": ("construct", "centers"),
    "roundtrip": ("roundtrip",),
    "all": ("all",),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wintgen",
        description="Construct Wintgen ideal submanifolds from isotropic "
        "holomorphic curves and verify their invariants numerically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGE_BY_COMMAND:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON pipeline configuration")
        p.add_argument("--fixture", help="fixture name (e.g. enneper5)")
        p.add_argument("--weierstrass", type=Path, help="Weierstrass data JSON file")
        p.add_argument("--out", type=Path, help="output directory for reports/exports")
        p.add_argument("--seed", type=int, help="seed for randomized checks")
        p.add_argument("--m", type=int, help="submanifold dimension")
        p.add_argument("--nu", type=int)
        p.add_argument("--nv", type=int)
        p.add_argument("--u-range", help="min,max")
        p.add_argument("--v-range", help="min,max")
        p.add_argument("--fiber-samples", type=int)
        p.add_argument("--fd-step", type=float)
        p.add_argument("--fd-outer", type=float)
        p.add_argument("--fd-centers", type=float)
        p.add_argument("--pole-wp", help="comma separated pole vector")
        p.add_argument("--pole-wps", help="comma separated second pole vector")
        if name == "roundtrip":
            p.add_argument("--trials", type=int, default=1000)
    return parser


def load_config(args) -> PipelineConfig:
    doc = {}
    if args.config is not None:
        with open(args.config) as fh:
            doc = json.load(fh)
    config = PipelineConfig.from_dict(doc) if doc else PipelineConfig()

    if args.fixture is not None:
        config.fixture = args.fixture
        config.weierstrass = None
    if args.weierstrass is not None:
        with open(args.weierstrass) as fh:
            config.weierstrass = json.load(fh)
        config.fixture = None
    for attr in ("seed", "m", "nu", "nv"):
        val = getattr(args, attr)
        if val is not None:
            setattr(config, attr, val)
    if args.fiber_samples is not None:
        config.fiber_samples = args.fiber_samples
    if args.fd_step is not None:
        config.fd_step = args.fd_step
    if args.fd_outer is not None:
        config.fd_outer = args.fd_outer
    if args.fd_centers is not None:
        config.fd_centers = args.fd_centers
    if args.u_range is not None:
        config.u_range = tuple(float(x) for x in args.u_range.split(","))
    if args.v_range is not None:
        config.v_range = tuple(float(x) for x in args.v_range.split(","))
    if args.pole_wp is not None or args.pole_wps is not None:
        if args.pole_wp is None or args.pole_wps is None:
            raise ValueError("provide both --pole-wp and --pole-wps")
        config.poles = [
            [float(x) for x in args.pole_wp.split(",")],
            [float(x) for x in args.pole_wps.split(",")],
        ]
    config.__post_init__()
    return config


def write_outputs(command, report, config, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    public = {k: v for k, v in report.items() if not k.startswith("_")}
    exports.write_report(public, outdir / f"{command.replace('-', '_')}_report.json")
    env = report.get("_env")
    fields = report.get("_fields")
    if env is not None and command in ("construct", "check-wintgen", "all"):
        exports.write_envelope_csv(env, outdir / "envelope.csv")
        exports.write_envelope_obj(env, outdir / "envelope.obj")
        exports.write_mask_json(env, outdir / "regular_mask.json")
        if fields is not None:
            exports.write_defect_csv(env, fields, outdir / "defect.csv")
            exports.write_moebius_json(
                env, fields, outdir / "moebius.json", checks=report.get("_third")
            )
    if command in ("centers", "all") and report.get("centers") is not None:
        from .pipeline import config_poles, resolve_curve
        from .centers import center_samples

        xi = resolve_curve(config)[3]
        u = np.linspace(config.u_range[0], config.u_range[1], config.nu)
        v = np.linspace(config.v_range[0], config.v_range[1], config.nv)
        data = center_samples(xi, u[:, None] + 1j * v[None, :], config_poles(config))
        exports.write_centers_csv(u, v, data["chart"], outdir / "centers.csv")
        exports.write_centers_obj(data["chart"], outdir / "centers.obj")


def summarize(report: dict) -> str:
    lines = []
    for name, chk in sorted(report["checks"].items()):
        status = "ok " if chk["pass"] else "FAIL"
        if isinstance(chk["value"], bool):
            lines.append(f"[{status}] {name}: {chk['value']}")
        else:
            lines.append(
                f"[{status}] {name}: {chk['value']:.3e} (tolerance {chk['tolerance']:.1e})"
            )
    verdict = "PASS" if report["passed"] else "FAIL"
    lines.append(f"overall: {verdict}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "roundtrip":
        from .pipeline import roundtrip_check

        rt = roundtrip_check(config.m, args.trials, config.seed)
        tol = config.tolerances["roundtrip"]
        ok = rt["max_error_flat"] <= tol and rt["max_error_quadric"] <= tol
        report = {
            "config": config.to_dict(),
            "version": _version(),
            "roundtrip": rt,
            "checks": {
                "roundtrip/flat": {
                    "value": rt["max_error_flat"], "tolerance": tol,
                    "pass": rt["max_error_flat"] <= tol,
                },
                "roundtrip/quadric": {
                    "value": rt["max_error_quadric"], "tolerance": tol,
                    "pass": rt["max_error_quadric"] <= tol,
                },
            },
            "passed": bool(ok),
        }
        print(f"roundtrip: flat {rt['max_error_flat']:.3e}, "
              f"quadric {rt['max_error_quadric']:.3e} over {rt['trials']} trials")
    else:
        try:
            report = run_full(config, stages=STAGE_BY_COMMAND[args.command])
        except (PoleNormalizationError, ValueError) as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return 2
    print(summarize(report))
    if args.out is not None:
        write_outputs(args.command, report, config, args.out)
    return 0 if report["passed"] else 1


def _version() -> str:
    from . import __version__

    return __version__


if __name__ == "__main__":
    sys.exit(main())
