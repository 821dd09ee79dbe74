"""Command line interface: ``cmcgraph {check,solve,serrin,perron,oracle,export}``.

Reports go to standard output as JSON, diagnostics to standard error.
Exit codes: 0 success, 1 checks failed, 2 solver nonconvergence, 3 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from .errors import CMCError, ConfigError, GeometryError, MeshError
from .io import export_solution, load_config, load_solution, sanitize
from .pipeline import (EXIT_CHECKS, EXIT_INPUT, run_check, run_oracle,
                       run_perron, run_serrin, run_solve)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _common(p, solver=True):
    p.add_argument("config", help="JSON configuration file")
    p.add_argument("--out", help="directory for report.json and artifacts")
    p.add_argument("--seed", type=int, help="override the configuration seed")
    if solver:
        p.add_argument("--h", type=float, help="override the target mesh edge length")
        p.add_argument("--force", action="store_true", help="skip the hypothesis gate")


def build_parser():
    ap = _Parser(prog="cmcgraph", description="Constant mean curvature graph solver and hypothesis verifier.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("check", help="hypothesis report only"), solver=False)
    _common(sub.add_parser("solve", help="cone supersolution, continuation, barrier, invariants"))
    _common(sub.add_parser("serrin", help="vertex-at-infinity sequence"))
    _common(sub.add_parser("perron", help="scaled-cone sweep with sandwich checks"))
    p = sub.add_parser("oracle", help="radial shooting profile / spherical-cap table")
    p.add_argument("config", help="JSON with n, H, r_out, u_out, r_in, u_in")
    p.add_argument("--out")
    p = sub.add_parser("export", help="convert a stored solution.npz to OBJ/VTK/CSV")
    p.add_argument("solution", help="solution.npz written by solve/serrin")
    p.add_argument("--format", choices=["obj", "vtk", "csv"], default="obj")
    p.add_argument("--field", default="v")
    p.add_argument("--out", required=True, help="output file")
    return ap


def _dispatch(args):
    if args.command == "export":
        mesh, fields = load_solution(args.solution)
        if args.field not in fields:
            raise ConfigError(f"no field {args.field!r} (have {sorted(fields)})", "--field")
        Path(args.out).write_bytes(export_solution(mesh, fields[args.field], args.format))
        return 0, None
    if args.command == "oracle":
        try:
            doc = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read file: {exc.strerror}", args.config) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}", args.config) from exc
        return run_oracle(doc, args.out)
    config, extras = load_config(args.config)
    if args.seed is not None:
        extras["seed"] = args.seed
    if args.command == "check":
        return run_check(config, extras, args.out)
    if args.h is not None and not args.h > 0:
        raise ConfigError("must be positive", "--h")
    run = {"solve": run_solve, "serrin": run_serrin, "perron": run_perron}[args.command]
    return run(config, extras, h=args.h, out=args.out, force=args.force)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        code, report = _dispatch(args)
    except (ConfigError, GeometryError, MeshError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CMCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECKS
    except Exception:  # noqa: BLE001 - last-resort guard keeps the exit-code contract
        traceback.print_exc()
        return EXIT_CHECKS
    if report is not None:
        json.dump(sanitize(report), sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        for m in report.get("messages", []):
            print(m, file=sys.stderr)
    return code
