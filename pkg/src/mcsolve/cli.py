"""Command-line interface: ``mcsolve run | preset | check | list-presets | batch``.

Exit codes: 0 converged, 2 configuration error, 3 compatibility failure,
4 non-convergence or divergence. Every failure also writes ``meta.json``
(when an output directory can be determined) with a machine-readable
``failure`` block.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import RunConfig, load_config
from .errors import CompatibilityError, ConfigError, ContinuationError, DivergenceError, MCSolveError
from .operators import check_compatibility, cmc_from_capillary
from .presets import PRESETS
from .solver import Solution, adaptive_solve, continuation_solve

log = logging.getLogger("mcsolve")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPAT = 3
EXIT_NONCONVERGED = 4


def output_dir(cfg: RunConfig, override: str | None = None) -> Path:
    """``--out`` wins, then ``output.dir``, then ``$MCSOLVE_OUT_DIR/<name>``, then ``./out/<name>``."""
    if override:
        return Path(override)
    if cfg.output.get("dir"):
        return Path(cfg.output["dir"])
    root = os.environ.get("MCSOLVE_OUT_DIR", "out")
    return Path(root) / cfg.name


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (str, int, bool)) or x is None:
        return x
    return repr(x)


def cartesian_table(sol: Solution) -> np.ndarray:
    """Rows ``(x, y, u)`` for every grid node, in storage order."""
    x, y = sol.derivs.cartesian()
    return np.column_stack([x, y, sol.v.values])


def boundary_table(sol: Solution) -> list[tuple[str, float, float, float]]:
    x, y = sol.derivs.cartesian()
    u = sol.v.values
    rows = []
    groups = dict(sol.derivs.boundary)
    groups.update(sol.derivs.corners or {})
    for comp, idx in groups.items():
        for k in np.atleast_1d(idx):
            rows.append((comp, float(x[k]), float(y[k]), float(u[k])))
    return rows


def solution_meta(sol: Solution) -> dict:
    return {
        "status": sol.status,
        "converged": sol.converged,
        "bvp_residual": sol.bvp_residual,
        "max_abs_residual": sol.max_abs_residual,
        "final_grid": list(sol.resolution),
        "lambda": sol.lam if not sol.lambdas else sol.lambdas[-1],
        "lambdas": sol.lambdas,
        "pde": repr(sol.spec.pde),
        "levels": [
            {
                "grid": list(lvl.resolution),
                "newton_converged": lvl.newton_converged,
                "step_residuals": lvl.step_residuals,
                "bvp_residual": lvl.bvp_residual,
                "max_abs_residual": lvl.max_abs_residual,
                "assemble_seconds": lvl.assemble_seconds,
                "newton_seconds": lvl.newton_seconds,
            }
            for lvl in sol.levels
        ],
    }


def write_outputs(out: Path, cfg: RunConfig, meta: dict, sol: Solution | None) -> None:
    out.mkdir(parents=True, exist_ok=True)
    if sol is not None:
        np.savetxt(out / "solution.csv", cartesian_table(sol), delimiter=",", header="x,y,u", comments="", fmt="%.17g")
        if cfg.output.get("boundary_csv"):
            with open(out / "boundary.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["component", "x", "y", "u"])
                w.writerows(boundary_table(sol))
    (out / "meta.json").write_text(json.dumps(_jsonable(meta), indent=2) + "\n")


def execute(cfg: RunConfig, out: Path | None) -> tuple[int, dict]:
    """Run one resolved config; returns the exit code and the metadata written."""
    meta: dict = {"config": cfg.to_dict(), "figure": cfg.meta.get("figure")}
    spec = cfg.problem()
    scfg = cfg.solver_config()
    sol = None
    t0 = time.perf_counter()
    caught: list = []
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if scfg.continuation_steps > 0:
                sol = continuation_solve(spec, scfg)
            else:
                sol = adaptive_solve(spec, scfg)
        meta.update(solution_meta(sol))
        code = EXIT_OK if sol.converged else EXIT_NONCONVERGED
        if not sol.converged:
            meta["failure"] = {"reason": "non-convergence", "detail": sol.status}
    except CompatibilityError as exc:
        code = EXIT_COMPAT
        meta.update(status="rejected", converged=False)
        meta["failure"] = {"reason": exc.reason, "value": exc.value, "detail": str(exc)}
    except DivergenceError as exc:
        code = EXIT_NONCONVERGED
        meta.update(status="diverged", converged=False)
        meta["failure"] = {"reason": "divergence", "detail": str(exc), "step_residuals": list(exc.history)}
    except ContinuationError as exc:
        code = EXIT_NONCONVERGED
        meta.update(status="continuation failed", converged=False)
        meta["failure"] = {"reason": "continuation failure", "last_lambda": exc.last_lambda, "detail": str(exc)}
        sol = exc.solution
    meta["warnings"] = [str(w.message) for w in caught]
    meta["wall_seconds"] = time.perf_counter() - t0
    if out is not None:
        write_outputs(out, cfg, meta, sol)
    return code, meta


def _summary(code: int, meta: dict, out: Path | None) -> str:
    if code == EXIT_OK:
        msg = f"converged on grid {meta['final_grid']}: bvp residual {meta['bvp_residual']:.3e}, max|N| {meta['max_abs_residual']:.3e}"
    else:
        fail = meta.get("failure", {})
        msg = f"failed ({fail.get('reason')}): {fail.get('detail', '')}"
        if "value" in fail:
            msg += f" [value {fail['value']:.6g}]"
    return msg + (f"\noutput: {out}" if out is not None else "")


def cmd_run(args, overrides: Sequence[str], preset: str | None = None) -> int:
    cfg = load_config(getattr(args, "config", None), overrides, preset=preset)
    out = output_dir(cfg, args.out)
    code, meta = execute(cfg, out)
    for w in meta.get("warnings", []):
        print(f"warning: {w}", file=sys.stderr)
    print(_summary(code, meta, out))
    return code


def cmd_check(args, overrides: Sequence[str]) -> int:
    cfg = load_config(args.config, overrides)
    spec = cfg.problem()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            checked = check_compatibility(spec)
        except CompatibilityError as exc:
            print(f"rejected: {exc.reason} (value {exc.value:.6g})")
            return EXIT_COMPAT
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    line = f"ok: {spec.domain.kind}, {checked.pde!r}"
    if spec.all_capillary:
        line += f"; 2H from contact angles = {cmc_from_capillary(spec):.10g}"
    print(line)
    return EXIT_OK


def cmd_list(_args) -> int:
    width = max(len(k) for k in PRESETS)
    for name, cfg in PRESETS.items():
        meta = cfg.get("meta", {})
        fig = meta.get("figure")
        tag = f"fig {fig}" if fig is not None else "-"
        print(f"{name:<{width}}  {tag:<6}  {meta.get('panel', '')}  {meta.get('note', '')}".rstrip())
    return EXIT_OK


def _batch_one(item: tuple[str, str | None, list[str]]) -> tuple[str, int]:
    path, out_root, overrides = item
    try:
        cfg = load_config(path, overrides)
        out = Path(out_root) / cfg.name if out_root else output_dir(cfg)
        code, _ = execute(cfg, out)
    except ConfigError:
        code = EXIT_CONFIG
    except MCSolveError:
        code = EXIT_NONCONVERGED
    return path, code


def cmd_batch(args, overrides: Sequence[str]) -> int:
    items = [(p, args.out, list(overrides)) for p in args.configs]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_batch_one, items))
    else:
        results = [_batch_one(it) for it in items]
    for path, code in results:
        print(f"{code}  {path}")
    return max(code for _, code in results) if results else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mcsolve",
        description="Spectral Newton solver for prescribed mean curvature graphs.",
        epilog="Any config field can be overridden with --section.key=value, e.g. --solver.n_init=40.",
    )
    p.add_argument("-v", "--verbose", action="count", default=0, help="log Newton/refinement progress")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="solve the problem described by a JSON config")
    r.add_argument("config")
    r.add_argument("--out", help="output directory")
    s = sub.add_parser("preset", help="solve a built-in preset")
    s.add_argument("name")
    s.add_argument("--out", help="output directory")
    c = sub.add_parser("check", help="run compatibility checks only")
    c.add_argument("config")
    sub.add_parser("list-presets", help="list built-in presets")
    b = sub.add_parser("batch", help="run several configs, optionally in parallel")
    b.add_argument("configs", nargs="+")
    b.add_argument("--out", help="output root (one sub-directory per run)")
    b.add_argument("-j", "--jobs", type=int, default=1)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    overrides = [t for t in rest if t.startswith("--") and "=" in t]
    stray = [t for t in rest if t not in overrides]
    if stray:
        parser.error(f"unrecognized arguments: {' '.join(stray)}")
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(name)s: %(message)s")
    try:
        if args.command == "run":
            return cmd_run(args, overrides)
        if args.command == "preset":
            return cmd_run(args, overrides, preset=args.name)
        if args.command == "check":
            return cmd_check(args, overrides)
        if args.command == "batch":
            return cmd_batch(args, overrides)
        return cmd_list(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MCSolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
