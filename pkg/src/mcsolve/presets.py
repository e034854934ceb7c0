"""Built-in run configurations for the standard experiments.

``figure`` in each preset's metadata is the number of the figure the run
belongs to (``None`` for extra oracle runs); ``panel`` names the sub-plot.
"""

from __future__ import annotations

import copy

SQUARE = {"kind": "rectangle", "x": [-1.0, 1.0], "y": [-1.0, 1.0]}
DISK = {"kind": "disk", "radius": 1.0}
ANNULUS = {"kind": "annulus", "a": 1.0, "b": 2.0}


def _dir(g):
    return {"type": "dirichlet", "g": g}


def _cap(gamma):
    return {"type": "capillary", "gamma": gamma}


def _all(bc):
    return {"all": bc}


PRESETS: dict[str, dict] = {
    "fig1-catenoid": {
        "meta": {"figure": 1, "panel": "annulus", "note": "minimal graph near gradient blow-up; catenoid oracle"},
        "geometry": ANNULUS,
        "pde": {"kind": "minimal"},
        "bc": {"inner": _dir("1.28792"), "outer": _dir("0")},
        "solver": {"initial_guess": "zero"},
    },
    "fig2-corner": {
        "meta": {"figure": 2, "panel": "square", "note": "contact angle 0.035 above the corner threshold pi/4"},
        "geometry": SQUARE,
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": _all(_cap("pi/4 + 0.035")),
        "solver": {"n_init": 50, "initial_guess": "one"},
    },
    "fig2-corner-sphere-guess": {
        "meta": {"figure": 2, "panel": "square", "note": "same as fig2-corner with the sphere-based guess"},
        "geometry": SQUARE,
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": _all(_cap("pi/4 + 0.035")),
        "solver": {"n_init": 50, "initial_guess": "2*sqrt(2) + 1/(2*sqrt(2)) - sqrt(8 - x^2 - y^2)"},
    },
    "fig4-scherk-family": {
        "meta": {"figure": 3, "panel": "square", "note": "square Plateau problem; residual plot of figure 4"},
        "geometry": SQUARE,
        "pde": {"kind": "minimal"},
        "bc": _all(_dir("0.1*sin(4*pi*x)^2 + 0.1*sin(4*pi*y)")),
        "solver": {},
    },
    "fig4-continuation": {
        "meta": {"figure": 4, "panel": "right", "note": "amplitude 0.13 reached by continuation in lambda"},
        "geometry": SQUARE,
        "pde": {"kind": "minimal"},
        "bc": _all(_dir("0.13*sin(4*pi*x)^2 + 0.1*sin(4*pi*y)")),
        "solver": {"continuation_steps": 14},
    },
    "fig3-disk-plateau": {
        "meta": {"figure": 3, "panel": "disk"},
        "geometry": DISK,
        "pde": {"kind": "minimal"},
        "bc": {"rim": _dir("0.1*sin(2*theta)^2")},
        "solver": {},
    },
    "fig3-annulus-plateau": {
        "meta": {"figure": 3, "panel": "annulus"},
        "geometry": ANNULUS,
        "pde": {"kind": "minimal"},
        "bc": {"inner": _dir("0.5 + 0.1*sin(2*theta)^2"), "outer": _dir("0.5 - 0.1*cos(2*theta)^2")},
        "solver": {},
    },
    "fig5-cmc-rectangle": {
        "meta": {"figure": 5, "panel": "rectangle"},
        "geometry": {"kind": "rectangle", "x": [-1.0, 1.0], "y": [-2.0, 2.0]},
        "pde": {"kind": "cmc", "two_h": 1.0},
        "bc": _all(_dir("0.25*cos(pi*x/2)*sin(2*pi*x)^2 - 0.15*y^2")),
        "solver": {},
    },
    "fig5-cmc-disk": {
        "meta": {"figure": 5, "panel": "disk"},
        "geometry": DISK,
        "pde": {"kind": "cmc", "two_h": 0.5},
        "bc": {"rim": _dir("0.1*sin(2*theta)^2")},
        "solver": {},
    },
    "fig5-cmc-annulus": {
        "meta": {"figure": 5, "panel": "annulus"},
        "geometry": ANNULUS,
        "pde": {"kind": "cmc", "two_h": 0.5},
        "bc": {"inner": _dir("0.5 + 0.1*sin(2*theta)^2"), "outer": _dir("0.5 - 0.1*cos(2*theta)^2")},
        "solver": {},
    },
    "capillary-plateau-square": {
        "meta": {"figure": 6, "panel": "square", "note": "adaptive loop from the default grid; reference run ended at n = 59"},
        "geometry": SQUARE,
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": _all(_dir("0.1*sin(2*pi*x)^2 + 0.2*sin(pi*y) + 1")),
        "solver": {},
    },
    "capillary-plateau-disk": {
        "meta": {"figure": 6, "panel": "disk"},
        "geometry": DISK,
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": {"rim": _dir("0.1*sin(3*theta)^2 + 0.1*cos(theta) + 1/2")},
        "solver": {},
    },
    "capillary-plateau-annulus": {
        "meta": {"figure": 6, "panel": "annulus"},
        "geometry": ANNULUS,
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": {
            "inner": _dir("0.5 + 0.1*sin(3*theta)^2"),
            "outer": _dir("0.5 - 0.1*cos(2*theta)^2 + 0.1*sin(theta)"),
        },
        "solver": {},
    },
    "minimal-capillary-disk": {
        "meta": {"figure": 7, "panel": "disk"},
        "geometry": DISK,
        "pde": {"kind": "minimal"},
        "bc": {"rim": _cap("pi/2 + sin(16*theta)*cos(theta) + 0.2*cos(3*theta) + 0.05*cos(theta)")},
        "pin": {"height": 1.0, "angle": 0.0},
        "solver": {"initial_guess": "zero"},
    },
    "minimal-capillary-annulus": {
        "meta": {"figure": 7, "panel": "annulus"},
        "geometry": ANNULUS,
        "pde": {"kind": "minimal"},
        "bc": {"inner": _cap("pi/2 + 0.1*sin(2*theta)"), "outer": _cap("pi/2 + 0.01*cos(4*theta)")},
        "pin": {"height": 1.0, "angle": 0.0},
        "solver": {"initial_guess": "zero"},
    },
    "minimal-capillary-square": {
        "meta": {
            "figure": None,
            "panel": "square",
            "note": "pure capillary data on a rectangle: an unstable class, convergence is not guaranteed (failures exit with code 4)",
        },
        "geometry": SQUARE,
        "pde": {"kind": "minimal"},
        "bc": _all(_cap("pi/2 + 0.1*sin(pi*x) + 0.1*sin(pi*y)")),
        "pin": {"height": 1.0},
        "solver": {"initial_guess": "zero", "max_refinements": 1},
    },
    "fig6-zero-g-disk": {
        "meta": {"figure": 8, "panel": "disk", "note": "CMC with capillary data; 2H = 0.1987"},
        "geometry": DISK,
        "pde": {"kind": "cmc", "two_h": 0.1987},
        "bc": {"rim": _cap("pi/2 - 0.1 + 0.2*sin(4*theta)*cos(theta)")},
        "pin": {"height": 1.0, "angle": 0.0},
        "solver": {"initial_guess": "zero"},
    },
    "zero-g-annulus": {
        "meta": {"figure": 8, "panel": "annulus", "note": "CMC with capillary data; 2H = 0.0666"},
        "geometry": ANNULUS,
        "pde": {"kind": "cmc", "two_h": 0.0666},
        "bc": {"inner": _cap("pi/2 + 0.1*sin(2*theta)"), "outer": _cap("pi/2 - 0.05 + 0.01*cos(4*theta)")},
        "pin": {"height": 1.0, "angle": 0.0},
        "solver": {"initial_guess": "zero"},
    },
    "zero-g-spherical-cap": {
        "meta": {"figure": None, "panel": "disk", "note": "constant angle pi/3; exact spherical cap"},
        "geometry": DISK,
        "pde": {"kind": "cmc", "two_h": 1.0},
        "bc": {"rim": _cap("pi/3")},
        "pin": {"height": 1.0, "angle": 0.0},
        "solver": {},
    },
    "capillary-rectangle-long": {
        "meta": {"figure": 9, "panel": "rectangle", "note": "[-1,1]x[-10,10]; expensive (reference run ended at n = 87)"},
        "geometry": {"kind": "rectangle", "x": [-1.0, 1.0], "y": [-10.0, 10.0]},
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": _all(_cap("pi/4 + 0.035")),
        "solver": {"initial_guess": "one"},
    },
    "capillary-disk": {
        "meta": {"figure": 9, "panel": "disk"},
        "geometry": DISK,
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": {"rim": _cap("pi/2 + 0.3 + 0.75*sin(6*theta)")},
        "solver": {},
    },
    "capillary-annulus": {
        "meta": {"figure": 9, "panel": "annulus"},
        "geometry": ANNULUS,
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": {"inner": _cap("pi/3 + 0.2*sin(6*theta)"), "outer": _cap("pi/3 + 0.2*cos(6*theta)")},
        "solver": {},
    },
    "mixed-minimal": {
        "meta": {"figure": 10, "panel": "top"},
        "geometry": ANNULUS,
        "pde": {"kind": "minimal"},
        "bc": {"inner": _cap("pi/3 + 0.75*sin(6*theta)"), "outer": _dir("1/2 - 0.1*cos(2*theta)^2")},
        "solver": {},
    },
    "mixed-cmc": {
        "meta": {"figure": 10, "panel": "middle"},
        "geometry": ANNULUS,
        "pde": {"kind": "cmc", "two_h": -0.85},
        "bc": {"inner": _cap("pi/2 + 0.2*sin(4*theta)"), "outer": _dir("1/2 - 0.1*cos(2*theta)^2")},
        "solver": {},
    },
    "mixed-capillary": {
        "meta": {"figure": 10, "panel": "bottom"},
        "geometry": ANNULUS,
        "pde": {"kind": "capillary", "kappa": 1.0},
        "bc": {"inner": _cap("pi/3 + 0.2*sin(6*theta)"), "outer": _dir("1/2 - 0.1*cos(theta)^2")},
        "solver": {},
    },
}


def get_preset(name: str) -> dict:
    from .errors import ConfigError

    try:
        cfg = copy.deepcopy(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; see 'mcsolve list-presets'", "preset") from None
    cfg["preset"] = name
    return cfg
