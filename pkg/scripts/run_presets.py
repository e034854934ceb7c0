"""Run built-in presets through the CLI pipeline and print a one-line summary per run.

Usage::

    python3 scripts/run_presets.py                 # every preset except the expensive ones
    python3 scripts/run_presets.py fig2-corner fig3-disk-plateau --out out/presets
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from mcsolve.cli import execute
from mcsolve.config import load_config
from mcsolve.presets import PRESETS

EXPENSIVE = {"capillary-rectangle-long", "fig1-catenoid", "fig4-continuation"}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("names", nargs="*", help="preset names (default: all but the expensive ones)")
    parser.add_argument("--out", default="out/presets", help="output root; one sub-directory per preset")
    args = parser.parse_args(argv)

    names = args.names or [n for n in sorted(PRESETS) if n not in EXPENSIVE]
    worst = 0
    for name in names:
        cfg = load_config(preset=name)
        t = time.perf_counter()
        code, meta = execute(cfg, Path(args.out) / name)
        grid = meta.get("final_grid")
        bvp = meta.get("bvp_residual")
        bvp_txt = f"{bvp:.2e}" if isinstance(bvp, float) else "-"
        print(f"{name:28s} exit {code}  grid {grid}  bvp {bvp_txt}  {time.perf_counter() - t:6.1f} s", flush=True)
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    raise SystemExit(main())
