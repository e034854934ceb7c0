"""Collocation grids, differentiation matrices and spectral interpolation.

Flattening convention (used everywhere in the package):

* rectangle fields: ``k = ix * ny + iy`` (y index fastest), i.e. a C-order
  ravel of an ``(nx, ny)`` array;
* polar fields: ``k = it * nr + ir`` (radial index fastest), i.e. a C-order
  ravel of an ``(m, nr)`` array.

Chebyshev points are stored in ascending order. The Fourier grid is
``theta_t = -pi + 2*pi*t/m`` for ``t = 0..m-1``.

The disk uses a double cover: ``n`` Chebyshev points on ``[-R, R]`` (``n``
even, so ``r = 0`` is skipped) of which only the ``n/2`` positive radii are
unknowns. A value at ``(-r, theta)`` is the value at ``(r, theta + pi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import GeometryError, OutOfDomainError, ResolutionError
from .geometry import Annulus, Disk, Domain, Interval, Rectangle

__all__ = [
    "ChebGrid",
    "FourierGrid",
    "DerivativeSet",
    "ScalarField",
    "chebyshev_points",
    "chebyshev_weights",
    "chebyshev_diffmat",
    "fourier_points",
    "fourier_diffmat",
    "assemble_rectangle",
    "assemble_annulus",
    "assemble_disk",
    "assemble",
    "sample",
    "resample",
    "evaluate",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChebGrid:
    n: int
    interval: Interval
    points: np.ndarray


@dataclass(frozen=True, eq=False)
class FourierGrid:
    m: int
    points: np.ndarray


# ---------------------------------------------------------------------------
# 1D building blocks
# ---------------------------------------------------------------------------


def _unit_angles(n: int) -> np.ndarray:
    # theta_j such that x_j = -cos(theta_j) is ascending
    return np.pi * np.arange(n) / (n - 1)


def chebyshev_points(n: int, interval: Interval = Interval(-1.0, 1.0)) -> ChebGrid:
    """Second-kind Chebyshev points on ``interval`` in ascending order."""
    if n < 2:
        raise ResolutionError(f"need at least 2 Chebyshev points, got {n}")
    # sin form is exactly antisymmetric about the midpoint
    j = np.arange(n)
    x = np.sin(np.pi * (2 * j - (n - 1)) / (2 * (n - 1)))
    pts = interval.mid + interval.half * x
    pts[0], pts[-1] = interval.lo, interval.hi
    return ChebGrid(n, interval, _frozen(pts))


def chebyshev_weights(n: int) -> np.ndarray:
    """Barycentric weights for second-kind Chebyshev points (ascending order)."""
    w = (-1.0) ** np.arange(n)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _unit_differences(n: int) -> np.ndarray:
    # x_i - x_j computed from the angles to avoid cancellation
    t = _unit_angles(n)
    return 2.0 * np.sin(0.5 * (t[:, None] + t[None, :])) * np.sin(0.5 * (t[:, None] - t[None, :]))


def chebyshev_diffmat(n: int, order: int = 1, interval: Interval = Interval(-1.0, 1.0)) -> np.ndarray:
    """Chebyshev differentiation matrix of the given order on ``interval``.

    Off-diagonal entries use the barycentric closed forms; the diagonal is
    set by the negative-sum trick so each row annihilates constants.
    The second-order matrix is built directly rather than as ``D @ D``.
    """
    if n < 2:
        raise ResolutionError(f"need at least 2 Chebyshev points, got {n}")
    if order not in (1, 2):
        raise ValueError(f"unsupported derivative order {order}")
    w = chebyshev_weights(n)
    dx = _unit_differences(n)
    np.fill_diagonal(dx, 1.0)
    D = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    if order == 2:
        D2 = 2.0 * D * (np.diag(D)[:, None] - 1.0 / dx)
        np.fill_diagonal(D2, 0.0)
        np.fill_diagonal(D2, -D2.sum(axis=1))
        D = D2
    return D / interval.half**order


def fourier_points(m: int) -> FourierGrid:
    if m < 2 or m % 2:
        raise ResolutionError(f"Fourier grid needs an even number of points, got {m}")
    return FourierGrid(m, _frozen(-np.pi + 2.0 * np.pi * np.arange(m) / m))


def fourier_diffmat(m: int, order: int = 1) -> np.ndarray:
    """Periodic (period 2*pi) differentiation matrix on the even-``m`` Fourier grid."""
    if m < 2 or m % 2:
        raise ResolutionError(f"Fourier grid needs an even number of points, got {m}")
    if order not in (1, 2):
        raise ValueError(f"unsupported derivative order {order}")
    h = 2.0 * np.pi / m
    k = np.arange(m)[:, None] - np.arange(m)[None, :]
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    half = 0.5 * h * k
    off = k != 0
    D = np.zeros((m, m))
    if order == 1:
        D[off] = 0.5 * sign[off] / np.tan(half[off])
    else:
        D[off] = -0.5 * sign[off] / np.sin(half[off]) ** 2
        np.fill_diagonal(D, -(m**2) / 12.0 - 1.0 / 6.0)
    return D


# ---------------------------------------------------------------------------
# Assembled 2D operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DerivativeSet:
    """Dense partial-derivative matrices for one geometry and resolution.

    ``shape`` is ``(nx, ny)`` for rectangles and ``(m, nr)`` for polar
    geometries, where ``nr`` counts the physical radii (``n/2`` on a disk).
    ``coords`` holds the flat native coordinates (x, y) or (r, theta).
    ``D`` maps operator names (``x, y, xx, yy, xy`` or ``r, rr, t, tt, rt``)
    to matrices. ``boundary`` maps each boundary component to its flat
    indices; rectangle corners are kept separately in ``corners``.
    """

    domain: Domain
    shape: tuple[int, int]
    grids: tuple
    coords: tuple[np.ndarray, np.ndarray]
    D: dict[str, np.ndarray]
    boundary: dict[str, np.ndarray]
    corners: dict[str, int] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]

    @property
    def kind(self) -> str:
        return self.domain.kind

    @property
    def resolution(self) -> tuple[int, int]:
        """User-facing grid sizes: ``(nx, ny)`` or ``(n, m)`` (``n`` = full Chebyshev count)."""
        if self.kind == "rectangle":
            return self.shape
        return (self.grids[0].n, self.shape[0])

    def cartesian(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "rectangle":
            return self.coords
        r, t = self.coords
        return r * np.cos(t), r * np.sin(t)

    def interior(self) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        for idx in self.boundary.values():
            mask[idx] = False
        for k in self.corners.values():
            mask[k] = False
        return np.flatnonzero(mask)


def _set(domain, shape, grids, coords, D, boundary, corners=None) -> DerivativeSet:
    return DerivativeSet(
        domain=domain,
        shape=shape,
        grids=grids,
        coords=tuple(_frozen(c) for c in coords),
        D={k: _frozen(v) for k, v in D.items()},
        boundary={k: _frozen(np.asarray(v, dtype=np.intp)) for k, v in boundary.items()},
        corners=dict(corners or {}),
    )


def assemble_rectangle(nx: int, ny: int, rect: Rectangle) -> DerivativeSet:
    if nx < 4 or ny < 4:
        raise ResolutionError(f"rectangle grids need at least 4 points per side, got {nx}x{ny}")
    gx, gy = chebyshev_points(nx, rect.x), chebyshev_points(ny, rect.y)
    Ix, Iy = np.eye(nx), np.eye(ny)
    Dx = np.kron(chebyshev_diffmat(nx, 1, rect.x), Iy)
    Dy = np.kron(Ix, chebyshev_diffmat(ny, 1, rect.y))
    D = {
        "x": Dx,
        "y": Dy,
        "xx": np.kron(chebyshev_diffmat(nx, 2, rect.x), Iy),
        "yy": np.kron(Ix, chebyshev_diffmat(ny, 2, rect.y)),
        "xy": Dx @ Dy,
    }
    X, Y = np.meshgrid(gx.points, gy.points, indexing="ij")
    idx = np.arange(nx * ny).reshape(nx, ny)
    boundary = {
        "left": idx[0, 1:-1],
        "right": idx[-1, 1:-1],
        "bottom": idx[1:-1, 0],
        "top": idx[1:-1, -1],
    }
    corners = {
        "bottom_left": int(idx[0, 0]),
        "top_left": int(idx[0, -1]),
        "bottom_right": int(idx[-1, 0]),
        "top_right": int(idx[-1, -1]),
    }
    return _set(rect, (nx, ny), (gx, gy), (X.ravel(), Y.ravel()), D, boundary, corners)


def _polar_common(radial: np.ndarray, Dr, Drr, m: int):
    nr = radial.size
    theta = fourier_points(m)
    It = np.eye(nr)
    Dt = np.kron(fourier_diffmat(m, 1), It)
    D = {
        "r": Dr,
        "rr": Drr,
        "t": Dt,
        "tt": np.kron(fourier_diffmat(m, 2), It),
        "rt": Dr @ Dt,
    }
    T, Rg = np.meshgrid(theta.points, radial, indexing="ij")
    return theta, D, (Rg.ravel(), T.ravel())


def assemble_annulus(n: int, m: int, a: float, b: float) -> DerivativeSet:
    annulus = Annulus(float(a), float(b))
    if n < 4:
        raise ResolutionError(f"annulus needs at least 4 radial points, got {n}")
    if m < 4 or m % 2:
        raise ResolutionError(f"annulus needs an even number >= 4 of angular points, got {m}")
    interval = Interval(annulus.a, annulus.b)
    gr = chebyshev_points(n, interval)
    Im = np.eye(m)
    Dr = np.kron(Im, chebyshev_diffmat(n, 1, interval))
    Drr = np.kron(Im, chebyshev_diffmat(n, 2, interval))
    gt, D, coords = _polar_common(gr.points, Dr, Drr, m)
    idx = np.arange(m * n).reshape(m, n)
    boundary = {"inner": idx[:, 0], "outer": idx[:, -1]}
    return _set(annulus, (m, n), (gr, gt), coords, D, boundary)


def _block_swap(m: int) -> np.ndarray:
    # pairs angle theta_t with theta_t + pi
    S = np.zeros((m, m))
    h = m // 2
    S[:h, h:] = np.eye(h)
    S[h:, :h] = np.eye(h)
    return S


def assemble_disk(n: int, m: int, R: float = 1.0) -> DerivativeSet:
    """Disk operators from the double cover ``[-R, R] x [-pi, pi)``.

    The full ``n``-point matrices are split into 2x2 blocks; the lower
    blocks (rows at positive radii) act on the positive half directly and
    on the negative half through the partner angle ``theta + pi``. The
    negative half is stored in ascending ``x``, i.e. descending radius, so
    its columns are reversed before they act on the positive-radius data.
    """
    disk = Disk(float(R))
    if n < 4 or n % 2:
        raise ResolutionError(f"disk needs an even number >= 4 of Chebyshev points, got {n}")
    if m < 4 or m % 2:
        raise ResolutionError(f"disk needs an even number >= 4 of angular points, got {m}")
    interval = Interval(-disk.radius, disk.radius)
    gr = chebyshev_points(n, interval)
    h = n // 2
    S, Im = _block_swap(m), np.eye(m)
    blocks = []
    for order in (1, 2):
        Dfull = chebyshev_diffmat(n, order, interval)
        lower_neg = Dfull[h:, :h][:, ::-1]
        lower_pos = Dfull[h:, h:]
        blocks.append(np.kron(S, lower_neg) + np.kron(Im, lower_pos))
    gt, D, coords = _polar_common(gr.points[h:], blocks[0], blocks[1], m)
    idx = np.arange(m * h).reshape(m, h)
    return _set(disk, (m, h), (gr, gt), coords, D, {"rim": idx[:, -1]})


def assemble(domain: Domain, n: int, m: int | None = None) -> DerivativeSet:
    """Build the DerivativeSet for ``domain``; ``n`` Chebyshev points per direction."""
    if isinstance(domain, Rectangle):
        return assemble_rectangle(n, n, domain)
    if m is None:
        raise ResolutionError("polar geometries need an angular resolution m")
    if isinstance(domain, Disk):
        return assemble_disk(n, m, domain.radius)
    if isinstance(domain, Annulus):
        return assemble_annulus(n, m, domain.a, domain.b)
    raise GeometryError(f"unknown domain {domain!r}")


# ---------------------------------------------------------------------------
# Fields and interpolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScalarField:
    values: np.ndarray
    derivs: DerivativeSet

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size != self.derivs.size:
            raise ResolutionError(f"field has {v.size} values but the grid has {self.derivs.size} nodes")
        object.__setattr__(self, "values", _frozen(v.copy()))

    def grid(self) -> np.ndarray:
        return self.values.reshape(self.derivs.shape)


def sample(derivs: DerivativeSet, func: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> ScalarField:
    """Sample ``func`` at the nodes; arguments are the native coordinates."""
    c1, c2 = derivs.coords
    vals = np.broadcast_to(np.asarray(func(c1, c2), dtype=float), c1.shape)
    return ScalarField(vals, derivs)


def _cheb_interp_matrix(grid: ChebGrid, xq: np.ndarray) -> np.ndarray:
    """Rows of barycentric (second form) interpolation weights at ``xq``."""
    xq = np.atleast_1d(np.asarray(xq, dtype=float))
    w = chebyshev_weights(grid.n)
    diff = xq[:, None] - grid.points[None, :]
    # queries within rounding distance of a node take the node value (w / diff would overflow)
    scale = max(abs(grid.interval.lo), abs(grid.interval.hi), grid.interval.hi - grid.interval.lo)
    exact = np.abs(diff) <= np.finfo(float).eps * scale
    diff[exact] = 1.0
    C = w[None, :] / diff
    C /= C.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    C[hit] = exact[hit].astype(float)
    return C


def _trig_interp_matrix(m: int, tq: np.ndarray) -> np.ndarray:
    """Rows of periodic-sinc weights for the even-``m`` Fourier grid at ``tq``."""
    tq = np.atleast_1d(np.asarray(tq, dtype=float))
    pts = fourier_points(m).points
    phi = tq[:, None] - pts[None, :]
    # wrap to (-pi, pi] so that coincident nodes give phi == 0 exactly
    phi = np.mod(phi + np.pi, 2.0 * np.pi) - np.pi
    small = np.abs(phi) < 1e-14
    safe = np.where(small, 1.0, phi)
    C = np.sin(0.5 * m * safe) / (m * np.tan(0.5 * safe))
    C[small] = 1.0
    return C


def _double_cover(values: np.ndarray) -> np.ndarray:
    """Extend ``(m, n/2)`` disk data to ``(m, n)`` on the full radial grid."""
    m = values.shape[0]
    partner = np.roll(np.arange(m), -(m // 2))
    return np.hstack([values[partner][:, ::-1], values])


def _check_same_geometry(a: DerivativeSet, b: DerivativeSet):
    if a.domain != b.domain:
        raise GeometryError(f"geometry mismatch: {a.domain!r} vs {b.domain!r}")


def _polar_tensor(field: ScalarField):
    d = field.derivs
    vals = field.grid()
    if d.kind == "disk":
        vals = _double_cover(vals)
    return vals, d.grids[0], d.shape[0]


def resample(field: ScalarField, target: DerivativeSet) -> ScalarField:
    """Spectral interpolation of ``field`` onto the nodes of ``target``."""
    src = field.derivs
    _check_same_geometry(src, target)
    if src.kind == "rectangle":
        gx, gy = src.grids
        tx, ty = target.grids
        out = _cheb_interp_matrix(gx, tx.points) @ field.grid() @ _cheb_interp_matrix(gy, ty.points).T
        return ScalarField(out.ravel(), target)
    vals, gr, m = _polar_tensor(field)
    radii = target.grids[0].points
    if target.kind == "disk":
        radii = radii[radii.size // 2 :]
    Ar = _cheb_interp_matrix(gr, radii)
    At = _trig_interp_matrix(m, target.grids[1].points)
    return ScalarField((At @ vals @ Ar.T).ravel(), target)


def evaluate(field: ScalarField, points: Sequence[Sequence[float]]) -> np.ndarray:
    """Evaluate the spectral interpolant at Cartesian query points."""
    d = field.derivs
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 2:
        raise ValueError("query points must be (x, y) pairs")
    for x, y in pts:
        if not d.domain.contains(x, y):
            raise OutOfDomainError(f"point ({x}, {y}) lies outside {d.domain!r}")
    if d.kind == "rectangle":
        gx, gy = d.grids
        Ax = _cheb_interp_matrix(gx, np.clip(pts[:, 0], gx.interval.lo, gx.interval.hi))
        Ay = _cheb_interp_matrix(gy, np.clip(pts[:, 1], gy.interval.lo, gy.interval.hi))
        return np.einsum("pi,ij,pj->p", Ax, field.grid(), Ay)
    r = np.hypot(pts[:, 0], pts[:, 1])
    t = np.arctan2(pts[:, 1], pts[:, 0])
    return evaluate_polar(field, r, t)


def evaluate_polar(field: ScalarField, r, theta) -> np.ndarray:
    """Evaluate a polar field at ``(r, theta)`` pairs (no domain check beyond clipping)."""
    d = field.derivs
    if d.kind == "rectangle":
        raise GeometryError("evaluate_polar needs a disk or annulus field")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    vals, gr, m = _polar_tensor(field)
    Ar = _cheb_interp_matrix(gr, np.clip(r, gr.interval.lo, gr.interval.hi))
    At = _trig_interp_matrix(m, theta)
    return np.einsum("pt,tj,pj->p", At, vals, Ar)


def clenshaw_curtis(n: int, interval: Interval = Interval(-1.0, 1.0)) -> tuple[np.ndarray, np.ndarray]:
    """Clenshaw-Curtis nodes (ascending) and weights on ``interval``."""
    if n < 2:
        raise ResolutionError(f"need at least 2 quadrature nodes, got {n}")
    N = n - 1
    theta = np.pi * np.arange(n) / N
    w = np.ones(n)
    for j in range(1, N // 2 + 1):
        b = 1.0 if 2 * j == N else 2.0
        w -= b * np.cos(2 * j * theta) / (4 * j * j - 1)
    c = np.full(n, 2.0)
    c[0] = c[-1] = 1.0
    w *= c / N
    return chebyshev_points(n, interval).points, w[::-1] * interval.half
