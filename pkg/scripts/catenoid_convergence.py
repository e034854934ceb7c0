"""Catenoid heights on the annulus 1 < r < 2 versus radial resolution.

The inner height 1.28792 sits just below the fold of the catenoid family, so
the slope at r = 1 exceeds 30 and the Chebyshev expansion in r converges
slowly. The solution is radially symmetric, so a small angular count is
enough to isolate the radial error. Prints the sup-norm error against the
closed form, the relative BVP residual and the Newton step history tail.

Usage::

    python3 scripts/catenoid_convergence.py 50 80 120 160
"""

from __future__ import annotations

import argparse

import numpy as np

from mcsolve.geometry import Annulus
from mcsolve.operators import Dirichlet, Minimal, ProblemSpec
from mcsolve.reference import catenoid_profile
from mcsolve.solver import SolverConfig, adaptive_solve

HEIGHT = 1.28792


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description="catenoid error versus radial resolution")
    parser.add_argument("n", nargs="*", type=int, default=[50, 80, 120, 160])
    parser.add_argument("--m", type=int, default=8, help="angular points (the solution is radially symmetric)")
    args = parser.parse_args(argv)

    spec = ProblemSpec(Annulus(1.0, 2.0), Minimal(), {"inner": Dirichlet(HEIGHT), "outer": Dirichlet(0.0)})
    exact = catenoid_profile(1.0, 2.0, HEIGHT)
    print(f"c = {exact.params['c']:.10f}, slope at r = 1: {exact.slope(1.0):.1f}")
    for n in args.n:
        cfg = SolverConfig(n_init=n, m_init=args.m, max_refinements=0, max_unknowns=10**7)
        sol = adaptive_solve(spec, cfg)
        r, _ = sol.derivs.coords
        err = np.max(np.abs(sol.v.values - exact(r)))
        tail = ", ".join(f"{s:.1e}" for s in sol.step_residuals[-3:])
        print(f"n = {n:4d}: error {err:.2e}  bvp {sol.bvp_residual:.2e}  Newton {len(sol.step_residuals)} steps [{tail}]")


if __name__ == "__main__":
    main()
