"""Command-line entry points: solve, validate, sweep.

Exit codes: 0 ok, 2 config error, 3 solver failure, 4 validation failure.
Thread count comes from --threads or the DROP_STEADY_THREADS variable;
sweeps run points concurrently, each in an isolated solve context.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VALIDATION = 4


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("DROP_STEADY_THREADS")
    return max(1, int(env)) if env else 1


def cmd_solve(args) -> int:
    from .driver import NonContraction, diagnostics, picard_solve
    from .io import ConfigError, config_from_manifest, load_config, solve_artifacts

    try:
        if args.config.endswith("manifest.txt"):
            cfg = config_from_manifest(args.config)
        else:
            cfg = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        bundle = picard_solve(cfg)
        report = diagnostics(bundle)
    except NonContraction as e:
        print("solver failure: iteration stopped contracting", file=sys.stderr)
        for h in e.history:
            print(f"  iter {h['iter']}: update {h['update']:.3e}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, RuntimeError) as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    files = solve_artifacts(args.out, cfg, bundle, report)
    if args.emit_modes:
        from .io import emit_mode_tables

        files["mode_tables"] = emit_mode_tables(args.out, bundle)
    print(f"solved rho_tilde={cfg.rho_tilde:g}: lambda={bundle.lam:.9e}, "
          f"iters={len(bundle.history)}, residual={report['fixed_point_residual']:.3e}")
    print(f"artifacts in {args.out}: {', '.join(sorted(files.values()))}")
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import run_validation

    checks = run_validation(only=args.only, seed=args.seed, inject_fault=args.inject_fault)
    if not checks:
        print(f"no checks match --only {args.only!r}", file=sys.stderr)
        return EXIT_VALIDATION
    lines = [c.row() for c in checks]
    failed = [c for c in checks if not c.passed]
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    for ln in lines:
        print(ln)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "validation_report.txt"), "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK if not failed else EXIT_VALIDATION


def _sweep_point(cfg, rho):
    import dataclasses as dc

    from .driver import NonContraction, diagnostics, picard_solve

    point = dc.replace(cfg, rho_tilde=rho)
    try:
        bundle = picard_solve(point)
        rep = diagnostics(bundle)
        ratios = rep.get("contraction_ratios") or [float("nan")]
        return {
            "rho_tilde": rho,
            "lambda": bundle.lam,
            "eta_norm": rep["eta_norm"],
            "contraction_ratio": ratios[0],
            "wake_coefficient": rep.get("wake_coefficient", float("nan")),
            "force_defect": rep.get("force_e3_defect_rel", float("nan")),
            "status": "ok",
        }
    except (NonContraction, ValueError, RuntimeError) as e:
        return {
            "rho_tilde": rho,
            "lambda": float("nan"),
            "eta_norm": float("nan"),
            "contraction_ratio": float("nan"),
            "wake_coefficient": float("nan"),
            "force_defect": float("nan"),
            "status": f"failed: {type(e).__name__}",
        }


def cmd_sweep(args) -> int:
    from .io import ConfigError, load_config, write_csv

    try:
        cfg = load_config(args.config)
        grid = [float(tok) for tok in args.rho_grid.split(",") if tok.strip()]
    except (ConfigError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    n = _threads(args)
    if n > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=n) as ex:
            rows = list(ex.map(lambda r: _sweep_point(cfg, r), grid))
    else:
        rows = [_sweep_point(cfg, r) for r in grid]
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "sweep.csv")
    header = [
        "rho_tilde",
        "lambda",
        "eta_norm",
        "contraction_ratio",
        "wake_coefficient",
        "force_defect",
        "status",
    ]
    write_csv(path, header, ([row[k] for k in header] for row in rows))
    ok = sum(1 for row in rows if row["status"] == "ok")
    print(f"sweep: {ok}/{len(rows)} points converged -> {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dropsteady",
        description="Steady falling-drop spectral solver",
    )
    ap.add_argument("--threads", type=int, default=None, help="worker threads (or DROP_STEADY_THREADS)")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="run one steady-state solve")
    s.add_argument("--config", required=True, help="config file (or a manifest.txt to re-run)")
    s.add_argument("--out", default="out", help="output directory")
    s.add_argument(
        "--emit-modes", action="store_true", help="also write per-mode coefficient tables"
    )
    s.set_defaults(fn=cmd_solve)

    v = sub.add_parser("validate", help="run the oracle/identity check suite")
    v.add_argument("--only", default=None, help="run only groups whose name contains this")
    v.add_argument("--out", default=None, help="also write the pass/fail table here")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--inject-fault", default=None, choices=[None, "oracle_mu2"], help=argparse.SUPPRESS)
    v.set_defaults(fn=cmd_validate)

    w = sub.add_parser("sweep", help="density-contrast sweep")
    w.add_argument("--config", required=True)
    w.add_argument("--out", default="out")
    w.add_argument("--rho-grid", required=True, help="comma-separated rho_tilde values")
    w.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
