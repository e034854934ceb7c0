"""Square capillary problem with Dirichlet data solved on a sequence of fixed grids.

Shows the relative BVP residual per grid (which decides refinement) next to
the change of the interpolated solution between consecutive grids. The
residual reaches the rounding floor already on coarse grids while the
solution itself still converges algebraically, because the data are not
compatible at the corners.

Usage::

    python3 scripts/adaptive_refinement.py 40 50 60 70 80
"""

from __future__ import annotations

import argparse

import numpy as np

from mcsolve.config import load_config
from mcsolve.solver import adaptive_solve
from mcsolve.spectral import evaluate


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description="residual and solution change versus n")
    parser.add_argument("n", nargs="*", type=int, default=[40, 50, 60, 70, 80])
    parser.add_argument("--preset", default="capillary-plateau-square")
    args = parser.parse_args(argv)

    pts = np.random.default_rng(0).uniform(-1, 1, size=(500, 2))
    previous = None
    for n in args.n:
        cfg = load_config(preset=args.preset, overrides=[f"--solver.n_init={n}", "--solver.max_refinements=0"])
        sol = adaptive_solve(cfg.problem(), cfg.solver_config())
        vals = evaluate(sol.v, pts)
        change = "" if previous is None else f"  change vs previous grid {np.max(np.abs(vals - previous)):.1e}"
        print(f"n = {n:3d}: bvp {sol.bvp_residual:.2e}  Newton steps {len(sol.step_residuals)}{change}", flush=True)
        previous = vals


if __name__ == "__main__":
    main()
