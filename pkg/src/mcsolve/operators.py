"""Nonlinear residuals N(v) and Frechet matrices L(v) for the mean curvature problems.

Interior rows hold the mean curvature operator multiplied through by the
cube of the area element, ``(1 + |grad u|^2)^{3/2}`` for rectangles, and by
``r^3`` times that for polar coordinates. Rows at boundary nodes are
replaced by the boundary operator and its linearisation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Union

import numpy as np

from .errors import CompatibilityError, ConfigError, GeometryError
from .expr import compile_expr
from .geometry import Annulus, Disk, Domain, Interval, Rectangle
from .spectral import DerivativeSet, ScalarField, clenshaw_curtis

# ---------------------------------------------------------------------------
# Problem description
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Minimal:
    name = "minimal"


@dataclass(frozen=True)
class Cmc:
    two_h: float
    name = "cmc"


@dataclass(frozen=True)
class Capillary:
    kappa: float = 1.0
    name = "capillary"

    def __post_init__(self):
        if not self.kappa > 0:
            raise ConfigError(f"capillary constant must be positive, got {self.kappa}")


PdeKind = Union[Minimal, Cmc, Capillary]

# float, expression string, or callable of the native coordinates (x, y) / (r, theta)
BoundaryData = Union[float, str, Callable[[np.ndarray, np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class Dirichlet:
    g: BoundaryData


@dataclass(frozen=True)
class CapillaryAngle:
    gamma: BoundaryData


BoundaryCondition = Union[Dirichlet, CapillaryAngle]


@dataclass(frozen=True)
class Pin:
    """Prescribed height at one boundary node.

    Polar domains pick the node on ``component`` (default: outermost ring)
    whose angle is nearest ``angle``; rectangles pick the boundary node
    nearest ``point`` (default: midpoint of the right edge).
    """

    height: float = 1.0
    component: str | None = None
    angle: float = 0.0
    point: tuple[float, float] | None = None


@dataclass(frozen=True)
class ProblemSpec:
    domain: Domain
    pde: PdeKind
    bcs: Mapping[str, BoundaryCondition]
    pin: Pin | None = None

    def __post_init__(self):
        object.__setattr__(self, "bcs", dict(self.bcs))
        validate(self)

    @property
    def all_capillary(self) -> bool:
        return all(isinstance(bc, CapillaryAngle) for bc in self.bcs.values())

    @property
    def all_dirichlet(self) -> bool:
        return all(isinstance(bc, Dirichlet) for bc in self.bcs.values())


def _variable_names(domain) -> tuple[str, str]:
    return ("r", "theta") if domain.polar else ("x", "y")


def boundary_function(data: BoundaryData, domain: Domain) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Turn boundary data into ``f(c1, c2)`` of the native coordinates."""
    if callable(data):
        return data
    names = _variable_names(domain)
    fn = compile_expr(data, allowed=names)
    return lambda c1, c2: np.broadcast_to(fn(**{names[0]: c1, names[1]: c2}), np.shape(c1))


def validate(spec: ProblemSpec) -> None:
    dom = spec.domain
    if set(spec.bcs) != set(dom.components):
        raise ConfigError(f"{dom.kind} needs boundary conditions for {list(dom.components)}, got {list(spec.bcs)}")
    for comp, bc in spec.bcs.items():
        if not isinstance(bc, (Dirichlet, CapillaryAngle)):
            raise ConfigError(f"unsupported boundary condition {bc!r}", f"bcs.{comp}")
        data = bc.g if isinstance(bc, Dirichlet) else bc.gamma
        if isinstance(data, str):
            try:
                boundary_function(data, dom)
            except Exception as exc:
                raise ConfigError(str(exc), f"bcs.{comp}") from exc
    if isinstance(dom, Rectangle) and not (spec.all_capillary or spec.all_dirichlet):
        raise ConfigError("mixed boundary types are only supported on the annulus")
    if isinstance(spec.pde, (Minimal, Cmc)) and spec.all_capillary and spec.pin is None:
        raise ConfigError(f"{spec.pde.name} with capillary data on every component needs a pin")
    if spec.pin is not None and spec.pin.component is not None and spec.pin.component not in dom.components:
        raise ConfigError(f"unknown pin component {spec.pin.component!r}", "pin.component")


# ---------------------------------------------------------------------------
# Compatibility conditions
# ---------------------------------------------------------------------------

_RING_QUADRATURE = 4096
_EDGE_QUADRATURE = 257


def _edge_params(rect: Rectangle, comp: str, s: np.ndarray):
    x, y = rect.x, rect.y
    if comp == "left":
        return np.full_like(s, x.lo), s
    if comp == "right":
        return np.full_like(s, x.hi), s
    if comp == "bottom":
        return s, np.full_like(s, y.lo)
    return s, np.full_like(s, y.hi)


def _boundary_integral_of_cos(domain: Domain, gammas: Mapping[str, BoundaryData]) -> float:
    total = 0.0
    if isinstance(domain, Rectangle):
        for comp in domain.components:
            interval = domain.y if comp in ("left", "right") else domain.x
            s, w = clenshaw_curtis(_EDGE_QUADRATURE, interval)
            c1, c2 = _edge_params(domain, comp, s)
            total += float(w @ np.cos(boundary_function(gammas[comp], domain)(c1, c2)))
        return total
    theta = -np.pi + 2.0 * np.pi * np.arange(_RING_QUADRATURE) / _RING_QUADRATURE
    for comp in domain.components:
        radius = domain.ring_radius(comp)
        vals = np.cos(boundary_function(gammas[comp], domain)(np.full_like(theta, radius), theta))
        total += radius * 2.0 * np.pi * float(vals.mean())
    return total


def _gammas(spec_or_domain, gammas):
    if gammas is None:
        spec = spec_or_domain
        if not spec.all_capillary:
            raise CompatibilityError("every boundary component must carry capillary data", reason="not-applicable")
        return spec.domain, {c: bc.gamma for c, bc in spec.bcs.items()}
    out = {}
    for comp, g in dict(gammas).items():
        if isinstance(g, Dirichlet):
            raise CompatibilityError(f"component {comp!r} carries Dirichlet data", reason="not-applicable")
        out[comp] = g.gamma if isinstance(g, CapillaryAngle) else g
    return spec_or_domain, out


def cmc_from_capillary(domain: Domain | ProblemSpec, gammas: Mapping[str, BoundaryData] | None = None) -> float:
    """Mean curvature 2H forced by contact-angle data: boundary integral of cos(gamma) over the area."""
    domain, gammas = _gammas(domain, gammas)
    if set(gammas) != set(domain.components):
        raise CompatibilityError(
            "contact angles are needed on every boundary component", reason="not-applicable"
        )
    return _boundary_integral_of_cos(domain, gammas) / domain.area


def check_zero_flux(domain: Domain | ProblemSpec, gammas: Mapping[str, BoundaryData] | None = None) -> float:
    """Net flux of cos(gamma) through the boundary; minimal surfaces need it to vanish."""
    domain, gammas = _gammas(domain, gammas)
    return _boundary_integral_of_cos(domain, gammas)


FLUX_TOLERANCE = 1e-8
TWO_H_TOLERANCE = 1e-8


def check_compatibility(spec: ProblemSpec) -> ProblemSpec:
    """Apply the solvability conditions; may return a spec with corrected 2H.

    Raises CompatibilityError on a zero-flux violation and warns when a
    user-supplied 2H disagrees with the value forced by capillary data.
    """
    _check_angles(spec)
    if not spec.all_capillary:
        return spec
    if isinstance(spec.pde, Minimal):
        flux = check_zero_flux(spec)
        if abs(flux) > FLUX_TOLERANCE * spec.domain.perimeter:
            raise CompatibilityError(
                f"zero-flux violation: boundary integral of cos(gamma) is {flux:.12g}",
                reason="zero-flux violation",
                value=flux,
            )
    elif isinstance(spec.pde, Cmc):
        derived = cmc_from_capillary(spec)
        if abs(derived - spec.pde.two_h) > TWO_H_TOLERANCE:
            warnings.warn(
                f"2H = {spec.pde.two_h} replaced by {derived:.12g}, the value forced by the contact angles",
                stacklevel=2,
            )
        return replace(spec, pde=Cmc(derived))
    return spec


def _check_angles(spec: ProblemSpec) -> None:
    # sampled on a quadrature-sized grid, independent of the solve resolution
    dom = spec.domain
    for comp, bc in spec.bcs.items():
        f = boundary_function(bc.g if isinstance(bc, Dirichlet) else bc.gamma, dom)
        if dom.polar:
            t = np.linspace(-np.pi, np.pi, 721)
            vals = f(np.full_like(t, dom.ring_radius(comp)), t)
        else:
            interval = dom.y if comp in ("left", "right") else dom.x
            vals = f(*_edge_params(dom, comp, np.linspace(interval.lo, interval.hi, 201)))
        vals = np.asarray(vals, dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ConfigError("boundary data evaluates to NaN or inf", f"bcs.{comp}")
        if isinstance(bc, CapillaryAngle) and (vals.min() < 0.0 or vals.max() > math.pi):
            raise ConfigError("contact angle leaves [0, pi]", f"bcs.{comp}")


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

_EDGE_NORMALS = {"left": (-1.0, 0.0), "right": (1.0, 0.0), "bottom": (0.0, -1.0), "top": (0.0, 1.0)}
_CORNER_EDGES = {
    "bottom_left": ("left", "bottom"),
    "top_left": ("left", "top"),
    "bottom_right": ("right", "bottom"),
    "top_right": ("right", "top"),
}


def corner_normal(corner: str, domain: Domain | None = None) -> tuple[float, float]:
    """Measure-theoretic normal at a rectangle corner: mean of the adjacent edge normals."""
    if domain is not None and not isinstance(domain, Rectangle):
        raise GeometryError("corner normals exist only on rectangles")
    try:
        e1, e2 = _CORNER_EDGES[corner]
    except KeyError:
        raise GeometryError(f"unknown corner {corner!r}") from None
    (a1, a2), (b1, b2) = _EDGE_NORMALS[e1], _EDGE_NORMALS[e2]
    return (0.5 * (a1 + b1), 0.5 * (a2 + b2))


@dataclass(frozen=True, eq=False)
class AssembledOperator:
    residual: np.ndarray
    matrix: np.ndarray | None
    rows: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class _BoundaryRow:
    kind: str  # "dirichlet" | "capillary"
    label: str  # "boundary" | "corner"
    idx: np.ndarray
    values: np.ndarray  # g or cos(gamma)
    normal: tuple[np.ndarray, np.ndarray] | None = None
    sign: float = 1.0


def _check_geometry(spec: ProblemSpec, derivs: DerivativeSet):
    if spec.domain != derivs.domain:
        raise GeometryError(f"problem is posed on {spec.domain!r} but the grid is for {derivs.domain!r}")


def _boundary_rows(spec: ProblemSpec, derivs: DerivativeSet) -> list[_BoundaryRow]:
    c1, c2 = derivs.coords
    rows = []
    for comp, bc in spec.bcs.items():
        idx = derivs.boundary[comp]
        if isinstance(bc, Dirichlet):
            f = boundary_function(bc.g, spec.domain)
            rows.append(_BoundaryRow("dirichlet", "boundary", idx, np.asarray(f(c1[idx], c2[idx]), float)))
            continue
        f = boundary_function(bc.gamma, spec.domain)
        cosg = np.cos(np.asarray(f(c1[idx], c2[idx]), dtype=float))
        if derivs.kind == "rectangle":
            n1, n2 = _EDGE_NORMALS[comp]
            normal = (np.full(idx.size, n1), np.full(idx.size, n2))
            rows.append(_BoundaryRow("capillary", "boundary", idx, cosg, normal))
        else:
            sign = -1.0 if comp == "inner" else 1.0
            rows.append(_BoundaryRow("capillary", "boundary", idx, cosg, sign=sign))
    for corner, k in derivs.corners.items():
        e1, e2 = _CORNER_EDGES[corner]
        idx = np.array([k])
        if spec.all_dirichlet:
            f = boundary_function(spec.bcs[e1].g, spec.domain)
            rows.append(_BoundaryRow("dirichlet", "corner", idx, np.asarray(f(c1[idx], c2[idx]), float)))
        else:
            cosg = 0.5 * sum(
                np.cos(np.asarray(boundary_function(spec.bcs[e].gamma, spec.domain)(c1[idx], c2[idx]), float))
                for e in (e1, e2)
            )
            n1, n2 = corner_normal(corner)
            rows.append(_BoundaryRow("capillary", "corner", idx, cosg, (np.array([n1]), np.array([n2]))))
    return rows


def pin_index(spec: ProblemSpec, derivs: DerivativeSet) -> int | None:
    """Flat index of the pinned node, or None when the problem has no pin."""
    pin = spec.pin
    if pin is None:
        return None
    c1, c2 = derivs.coords
    if derivs.kind == "rectangle":
        dom = spec.domain
        px, py = pin.point if pin.point is not None else (dom.x.hi, dom.y.mid)
        cand = np.concatenate([*derivs.boundary.values(), list(derivs.corners.values())])
        return int(cand[np.argmin(np.hypot(c1[cand] - px, c2[cand] - py))])
    comp = pin.component or ("rim" if derivs.kind == "disk" else "outer")
    cand = derivs.boundary[comp]
    dist = np.abs(np.angle(np.exp(1j * (c2[cand] - pin.angle))))
    return int(cand[np.argmin(dist)])


def row_kinds(spec: ProblemSpec, derivs: DerivativeSet) -> np.ndarray:
    """Label every flattened row as interior, boundary, corner or pin."""
    labels = np.full(derivs.size, "interior", dtype="<U8")
    for row in _boundary_rows(spec, derivs):
        labels[row.idx] = row.label
    k = pin_index(spec, derivs)
    if k is not None:
        labels[k] = "pin"
    return labels


def _interior_cartesian(spec, derivs, v, jacobian):
    D = derivs.D
    ux, uy = D["x"] @ v, D["y"] @ v
    uxx, uyy, uxy = D["xx"] @ v, D["yy"] @ v, D["xy"] @ v
    W2 = 1.0 + ux**2 + uy**2
    N = (1.0 + uy**2) * uxx - 2.0 * ux * uy * uxy + (1.0 + ux**2) * uyy
    pde = spec.pde
    if isinstance(pde, Cmc):
        N = N - pde.two_h * W2**1.5
    elif isinstance(pde, Capillary):
        N = N - pde.kappa * v * W2**1.5
    if not jacobian:
        return N, None
    cx = 2.0 * (uyy * ux - uxy * uy)
    cy = 2.0 * (uxx * uy - uxy * ux)
    diag = np.zeros_like(v)
    if isinstance(pde, Cmc):
        s = 3.0 * pde.two_h * np.sqrt(W2)
        cx, cy = cx - s * ux, cy - s * uy
    elif isinstance(pde, Capillary):
        s = 3.0 * pde.kappa * v * np.sqrt(W2)
        cx, cy = cx - s * ux, cy - s * uy
        diag = -pde.kappa * W2**1.5
    L = (1.0 + uy**2)[:, None] * D["xx"]
    L += (-2.0 * ux * uy)[:, None] * D["xy"]
    L += (1.0 + ux**2)[:, None] * D["yy"]
    L += cx[:, None] * D["x"]
    L += cy[:, None] * D["y"]
    L[np.diag_indices_from(L)] += diag
    return N, L


def _interior_polar(spec, derivs, v, jacobian):
    D = derivs.D
    r = derivs.coords[0]
    ur, ut = D["r"] @ v, D["t"] @ v
    urr, utt, urt = D["rr"] @ v, D["tt"] @ v, D["rt"] @ v
    Q = r**2 * (1.0 + ur**2) + ut**2
    N = (
        r * (r**2 + ut**2) * urr
        + r * (1.0 + ur**2) * utt
        - 2.0 * r * ur * ut * urt
        + 2.0 * ur * ut**2
        + r**2 * (ur + ur**3)
    )
    pde = spec.pde
    if isinstance(pde, Cmc):
        N = N - pde.two_h * Q**1.5
    elif isinstance(pde, Capillary):
        N = N - pde.kappa * v * Q**1.5
    if not jacobian:
        return N, None
    cr = 2.0 * r * ur * utt - 2.0 * r * ut * urt + 2.0 * ut**2 + r**2 * (1.0 + 3.0 * ur**2)
    ct = 2.0 * r * ut * urr - 2.0 * r * ur * urt + 4.0 * ur * ut
    diag = np.zeros_like(v)
    if isinstance(pde, Cmc):
        s = 3.0 * pde.two_h * np.sqrt(Q)
        cr, ct = cr - s * r**2 * ur, ct - s * ut
    elif isinstance(pde, Capillary):
        s = 3.0 * pde.kappa * v * np.sqrt(Q)
        cr, ct = cr - s * r**2 * ur, ct - s * ut
        diag = -pde.kappa * Q**1.5
    L = (r * (r**2 + ut**2))[:, None] * D["rr"]
    L += (r * (1.0 + ur**2))[:, None] * D["tt"]
    L += (-2.0 * r * ur * ut)[:, None] * D["rt"]
    L += cr[:, None] * D["r"]
    L += ct[:, None] * D["t"]
    L[np.diag_indices_from(L)] += diag
    return N, L


def _apply_boundary(spec, derivs, v, N, L):
    D = derivs.D
    polar = derivs.kind != "rectangle"
    for row in _boundary_rows(spec, derivs):
        idx = row.idx
        if row.kind == "dirichlet":
            N[idx] = v[idx] - row.values
            if L is not None:
                L[idx] = 0.0
                L[idx, idx] = 1.0
            continue
        cosg = row.values
        if polar:
            r = derivs.coords[0][idx]
            ur, ut = D["r"][idx] @ v, D["t"][idx] @ v
            root = np.sqrt(r**2 + r**2 * ur**2 + ut**2)
            N[idx] = row.sign * r * ur - cosg * root
            if L is not None:
                a = row.sign * r - r**2 * ur * cosg / root
                b = -ut * cosg / root
                L[idx] = a[:, None] * D["r"][idx] + b[:, None] * D["t"][idx]
        else:
            n1, n2 = row.normal
            ux, uy = D["x"][idx] @ v, D["y"][idx] @ v
            root = np.sqrt(1.0 + ux**2 + uy**2)
            N[idx] = n1 * ux + n2 * uy - cosg * root
            if L is not None:
                a = n1 - cosg * ux / root
                b = n2 - cosg * uy / root
                L[idx] = a[:, None] * D["x"][idx] + b[:, None] * D["y"][idx]
    k = pin_index(spec, derivs)
    if k is not None:
        N[k] = v[k] - spec.pin.height
        if L is not None:
            L[k] = 0.0
            L[k, k] = 1.0


def assemble_operator(spec: ProblemSpec, derivs: DerivativeSet, v, jacobian: bool = True) -> AssembledOperator:
    """Residual and (optionally) Frechet matrix at ``v`` with boundary rows injected."""
    _check_geometry(spec, derivs)
    if isinstance(v, ScalarField):
        if v.derivs is not derivs and v.derivs.domain != derivs.domain:
            raise GeometryError("field and operator grids differ")
        v = v.values
    v = np.asarray(v, dtype=float)
    if v.shape != (derivs.size,):
        raise GeometryError(f"expected {derivs.size} values, got shape {v.shape}")
    interior = _interior_polar if derivs.kind != "rectangle" else _interior_cartesian
    N, L = interior(spec, derivs, v, jacobian)
    N = np.array(N)
    _apply_boundary(spec, derivs, v, N, L)
    return AssembledOperator(N, L, row_kinds(spec, derivs))


def residual(spec: ProblemSpec, derivs: DerivativeSet, v) -> np.ndarray:
    return assemble_operator(spec, derivs, v, jacobian=False).residual


def frechet(spec: ProblemSpec, derivs: DerivativeSet, v) -> np.ndarray:
    return assemble_operator(spec, derivs, v, jacobian=True).matrix
