"""JSON run configurations: loading, overrides and translation to solver objects.

A config file holds one run::

    {
      "preset": "fig2-corner",                 # optional; fields below override it
      "geometry": {"kind": "rectangle", "x": [-1, 1], "y": [-1, 1]},
      "pde": {"kind": "capillary", "kappa": 1},
      "bc": {"all": {"type": "capillary", "gamma": "pi/4 + 0.035"}},
      "pin": {"height": 1, "angle": 0},       # optional
      "solver": {"n_init": 50, "initial_guess": "one"},
      "output": {"dir": "out/corner", "boundary_csv": true}
    }

Boundary blocks are keyed by component (``left/right/bottom/top``,
``rim``, ``inner/outer``) or ``all``. Expressions use ``x, y`` on
rectangles and ``r, theta`` on disks and annuli.
"""

from __future__ import annotations

import copy
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .errors import ConfigError
from .expr import ExprError, compile_expr
from .geometry import Annulus, Disk, Rectangle
from .operators import Capillary, CapillaryAngle, Cmc, Dirichlet, Minimal, Pin, ProblemSpec
from .presets import get_preset
from .solver import SolverConfig

SOLVER_FIELDS = {f.name for f in dataclasses.fields(SolverConfig)}
SECTIONS = ("preset", "geometry", "pde", "bc", "pin", "solver", "output", "meta")


@dataclass
class RunConfig:
    geometry: dict
    pde: dict
    bc: dict
    solver: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    pin: dict | None = None
    preset: str | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def domain(self):
        return build_domain(self.geometry)

    def problem(self) -> ProblemSpec:
        return build_problem(self)

    def solver_config(self) -> SolverConfig:
        return build_solver(self.solver)

    @property
    def name(self) -> str:
        return self.output.get("name") or self.preset or "run"


def deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_override(token: str) -> tuple[list[str], Any]:
    """``--solver.n_init=40`` -> (["solver", "n_init"], 40). Values are JSON when possible."""
    body = token[2:] if token.startswith("--") else token
    if "=" not in body:
        raise ConfigError(f"override {token!r} must look like --section.key=value")
    path, raw = body.split("=", 1)
    keys = [k for k in path.split(".") if k]
    if not keys or keys[0] not in SECTIONS:
        raise ConfigError(f"override {token!r} must start with one of {', '.join(SECTIONS)}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return keys, value


def apply_overrides(data: dict, overrides: Iterable[str]) -> dict:
    data = copy.deepcopy(data)
    for token in overrides:
        keys, value = parse_override(token)
        node = data
        for k in keys[:-1]:
            if node.get(k) is None:
                node[k] = {}
            node = node[k]
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override inside a non-object", ".".join(keys))
        node[keys[-1]] = value
    return data


def _read_json(path: str | Path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", str(p)) from exc
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", str(p))
    return data


def load_config(
    path: str | Path | None = None,
    overrides: Iterable[str] = (),
    preset: str | None = None,
    data: dict | None = None,
) -> RunConfig:
    """Resolve a file, preset name and ``--a.b=c`` overrides into a RunConfig."""
    raw = copy.deepcopy(data) if data is not None else {}
    if path is not None:
        raw = deep_merge(raw, _read_json(path))
    overrides = list(overrides)
    raw = apply_overrides(raw, overrides)
    name = preset or raw.get("preset")
    if name:
        raw = deep_merge(get_preset(name), {k: v for k, v in raw.items() if k != "preset"})
        raw["preset"] = name
    unknown = set(raw) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    for key in ("geometry", "pde", "bc"):
        if not isinstance(raw.get(key), dict):
            raise ConfigError("missing or not an object", key)
    cfg = RunConfig(
        geometry=raw["geometry"],
        pde=raw["pde"],
        bc=raw["bc"],
        solver=raw.get("solver") or {},
        output=raw.get("output") or {},
        pin=raw.get("pin"),
        preset=raw.get("preset"),
        meta=raw.get("meta") or {},
    )
    # fail early on semantic errors
    cfg.problem()
    cfg.solver_config()
    return cfg


def _num(block: dict, key: str, path: str, default=None) -> float:
    if key not in block:
        if default is None:
            raise ConfigError("missing value", f"{path}.{key}")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", f"{path}.{key}")
    return float(value)


def build_domain(geometry: dict):
    kind = geometry.get("kind")
    try:
        if kind == "rectangle":
            x, y = geometry.get("x", [-1, 1]), geometry.get("y", [-1, 1])
            return Rectangle.from_bounds(x[0], x[1], y[0], y[1])
        if kind == "disk":
            return Disk(_num(geometry, "radius", "geometry", 1.0))
        if kind == "annulus":
            return Annulus(_num(geometry, "a", "geometry"), _num(geometry, "b", "geometry"))
    except (TypeError, IndexError) as exc:
        raise ConfigError(f"malformed geometry: {exc}", "geometry") from exc
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), "geometry") from exc
    raise ConfigError(f"unknown geometry kind {kind!r} (rectangle, disk, annulus)", "geometry.kind")


def build_pde(pde: dict):
    kind = pde.get("kind")
    if kind == "minimal":
        return Minimal()
    if kind == "cmc":
        return Cmc(_num(pde, "two_h", "pde"))
    if kind == "capillary":
        kappa = _num(pde, "kappa", "pde", 1.0)
        if kappa <= 0:
            raise ConfigError("capillary constant must be positive", "pde.kappa")
        return Capillary(kappa)
    raise ConfigError(f"unknown pde kind {kind!r} (minimal, cmc, capillary)", "pde.kind")


def _bc_value(value, names, path):
    if isinstance(value, bool):
        raise ConfigError("expected an expression or number", path)
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError("expected an expression or number", path)
    try:
        compile_expr(value, allowed=names)
    except ExprError as exc:
        raise ConfigError(str(exc), path) from exc
    return value


def build_bcs(bc: dict, domain) -> dict:
    names = ("r", "theta") if domain.polar else ("x", "y")
    blocks = {}
    for comp in domain.components:
        block = bc.get(comp, bc.get("all"))
        if block is None:
            raise ConfigError("missing boundary condition", f"bc.{comp}")
        blocks[comp] = block
    extra = set(bc) - set(domain.components) - {"all"}
    if extra:
        raise ConfigError(f"unknown boundary components {sorted(extra)} for a {domain.kind}", "bc")
    out = {}
    for comp, block in blocks.items():
        path = f"bc.{comp}"
        kind = block.get("type") if isinstance(block, dict) else None
        if kind == "dirichlet":
            out[comp] = Dirichlet(_bc_value(block.get("g"), names, f"{path}.g"))
        elif kind == "capillary":
            out[comp] = CapillaryAngle(_bc_value(block.get("gamma"), names, f"{path}.gamma"))
        else:
            raise ConfigError(f"boundary type must be 'dirichlet' or 'capillary', got {kind!r}", f"{path}.type")
    return out


def build_pin(pin: dict | None):
    if pin is None:
        return None
    point = pin.get("point")
    return Pin(
        height=_num(pin, "height", "pin", 1.0),
        component=pin.get("component"),
        angle=_num(pin, "angle", "pin", 0.0),
        point=tuple(point) if point is not None else None,
    )


def build_problem(cfg: RunConfig) -> ProblemSpec:
    domain = build_domain(cfg.geometry)
    try:
        return ProblemSpec(domain, build_pde(cfg.pde), build_bcs(cfg.bc, domain), build_pin(cfg.pin))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_solver(block: dict) -> SolverConfig:
    unknown = set(block) - SOLVER_FIELDS
    if unknown:
        raise ConfigError(f"unknown solver settings {sorted(unknown)}", "solver")
    try:
        return SolverConfig(**block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), "solver") from exc
