"""Residuals, Fréchet matrices, boundary rows and compatibility checks."""

import math
import warnings
import zlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcsolve.errors import CompatibilityError, ConfigError, GeometryError
from mcsolve.geometry import Annulus, Disk, Rectangle
from mcsolve.operators import (
    Capillary,
    CapillaryAngle,
    Cmc,
    Dirichlet,
    Minimal,
    Pin,
    ProblemSpec,
    assemble_operator,
    check_compatibility,
    check_zero_flux,
    cmc_from_capillary,
    corner_normal,
    frechet,
    pin_index,
    residual,
    row_kinds,
)
from mcsolve.reference import frechet_fd_check, scherk
from mcsolve.spectral import assemble, sample

SQUARE = Rectangle.from_bounds(-1, 1, -1, 1)
RECT = Rectangle.from_bounds(-1, 1, -0.5, 1.5)
DISK = Disk(1.0)
ANNULUS = Annulus(1.0, 2.0)
PDES = [Minimal(), Cmc(0.7), Capillary(1.3)]


def all_bc(domain, bc):
    return {c: bc for c in domain.components}


def specs():
    """Every PDE x geometry x boundary-type combination with sensible data."""
    out = []
    for pde in PDES:
        for dom in (RECT, DISK, ANNULUS):
            xy = "x*y" if not dom.polar else "r*cos(theta)"
            gam = "pi/2 + 0.3*sin(x)" if not dom.polar else "pi/2 + 0.3*sin(theta)"
            needs_pin = not isinstance(pde, Capillary)
            out.append(ProblemSpec(dom, pde, all_bc(dom, Dirichlet(f"0.2 + {xy}"))))
            out.append(ProblemSpec(dom, pde, all_bc(dom, CapillaryAngle(gam)), Pin(0.5) if needs_pin else None))
        out.append(
            ProblemSpec(ANNULUS, pde, {"inner": CapillaryAngle("pi/3 + 0.1*cos(theta)"), "outer": Dirichlet("sin(theta)")})
        )
        out.append(ProblemSpec(ANNULUS, pde, {"inner": Dirichlet("0.5"), "outer": CapillaryAngle("2 - 0.2*sin(2*theta)")}))
    return out


def label(spec):
    kinds = sorted({type(bc).__name__[0] for bc in spec.bcs.values()})
    return f"{type(spec.pde).__name__}-{spec.domain.kind}-{''.join(kinds)}"


def grid(dom, n=12, m=12):
    return assemble(dom, n, None if dom.kind == "rectangle" else m)


def smooth_random_field(d, rng, scale=0.4):
    """Random low-mode polynomial/trigonometric combination sampled on the grid."""
    a = rng.normal(size=6) * scale
    if d.kind == "rectangle":
        f = lambda x, y: a[0] + a[1] * x + a[2] * y + a[3] * x * y + a[4] * np.sin(x + y) + a[5] * x**2
    else:
        f = lambda r, t: a[0] + a[1] * r * np.cos(t) + a[2] * r * np.sin(t) + a[3] * r**2 + a[4] * r**2 * np.cos(2 * t) + a[5] * np.sin(r)
    return sample(d, f).values


class TestFrechetConsistency:
    @pytest.mark.parametrize("spec", specs(), ids=label)
    def test_central_difference(self, spec):
        d = grid(spec.domain)
        rng = np.random.default_rng(zlib.crc32(label(spec).encode()))
        worst = 0.0
        for _ in range(10):
            v = smooth_random_field(d, rng)
            w = smooth_random_field(d, rng, scale=1.0)
            worst = max(worst, frechet_fd_check(spec, d, v, w, h=1e-5))
        assert worst <= 1e-6

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**31), kappa=st.floats(0.1, 5.0), two_h=st.floats(-2, 2))
    def test_random_constants(self, seed, kappa, two_h):
        rng = np.random.default_rng(seed)
        d = grid(SQUARE, 10)
        v, w = rng.normal(size=d.size) * 0.1, rng.normal(size=d.size)
        for pde in (Cmc(two_h), Capillary(kappa)):
            spec = ProblemSpec(SQUARE, pde, all_bc(SQUARE, CapillaryAngle("1.2")), Pin(0.0))
            assert frechet_fd_check(spec, d, v, w) <= 1e-6


class TestResidualExamples:
    def test_flat_minimal(self):
        d = grid(SQUARE)
        spec = ProblemSpec(SQUARE, Minimal(), all_bc(SQUARE, Dirichlet(0.0)))
        assert np.all(residual(spec, d, np.zeros(d.size)) == 0)

    @pytest.mark.parametrize("dom", [SQUARE, DISK, ANNULUS], ids=lambda d: d.kind)
    def test_right_angle_capillary(self, dom):
        d = grid(dom)
        spec = ProblemSpec(dom, Capillary(1.0), all_bc(dom, CapillaryAngle("pi/2")))
        assert np.max(np.abs(residual(spec, d, np.zeros(d.size)))) <= 1e-15

    def test_scherk_sampled(self):
        d = assemble(SQUARE, 55)
        spec = ProblemSpec(SQUARE, Minimal(), all_bc(SQUARE, Dirichlet(scherk)))
        v = sample(d, scherk).values
        assert np.max(np.abs(residual(spec, d, v))) <= 1e-8

    def test_laplacian_rows_at_zero(self):
        d = grid(SQUARE)
        spec = ProblemSpec(SQUARE, Minimal(), all_bc(SQUARE, Dirichlet(0.0)))
        L = frechet(spec, d, np.zeros(d.size))
        inner = d.interior()
        np.testing.assert_allclose(L[inner], (d.D["xx"] + d.D["yy"])[inner], atol=1e-12)

    def test_capillary_rows_at_zero(self):
        d = grid(SQUARE)
        spec = ProblemSpec(SQUARE, Capillary(1.0), all_bc(SQUARE, Dirichlet(0.0)))
        L = frechet(spec, d, np.zeros(d.size))
        inner = d.interior()
        np.testing.assert_allclose(L[inner], (d.D["xx"] + d.D["yy"] - np.eye(d.size))[inner], atol=1e-12)

    def test_dirichlet_rows_are_unit(self):
        d = grid(ANNULUS)
        spec = ProblemSpec(ANNULUS, Minimal(), {"inner": Dirichlet("1"), "outer": Dirichlet("0")})
        op = assemble_operator(spec, d, np.full(d.size, 0.25))
        for comp, value in (("inner", 1.0), ("outer", 0.0)):
            idx = d.boundary[comp]
            np.testing.assert_array_equal(op.matrix[idx], np.eye(d.size)[idx])
            np.testing.assert_allclose(op.residual[idx], 0.25 - value)

    def test_geometry_mismatch(self):
        spec = ProblemSpec(SQUARE, Minimal(), all_bc(SQUARE, Dirichlet(0.0)))
        with pytest.raises(GeometryError):
            residual(spec, grid(RECT), np.zeros(144))


class TestPolarScaling:
    """Interior polar rows equal r^3 times the Cartesian operator of the same field."""

    @staticmethod
    def cartesian_mean_curvature_form(x, y, two_h=0.0, kappa=0.0):
        # u = x^2 + 0.3 y + 0.2 x y, derivatives by hand
        u = x**2 + 0.3 * y + 0.2 * x * y
        ux, uy = 2 * x + 0.2 * y, 0.3 + 0.2 * x
        uxx, uyy, uxy = 2.0, 0.0, 0.2
        M = (1 + uy**2) * uxx - 2 * ux * uy * uxy + (1 + ux**2) * uyy
        w3 = (1 + ux**2 + uy**2) ** 1.5
        return M - two_h * w3 - kappa * u * w3

    @pytest.mark.parametrize(
        "pde, kw",
        [(Minimal(), {}), (Cmc(0.8), {"two_h": 0.8}), (Capillary(2.0), {"kappa": 2.0})],
        ids=["minimal", "cmc", "capillary"],
    )
    def test_annulus_against_cartesian(self, pde, kw):
        d = assemble(ANNULUS, 14, 16)
        spec = ProblemSpec(ANNULUS, pde, all_bc(ANNULUS, Dirichlet(0.0)))
        field = sample(d, lambda r, t: (r * np.cos(t)) ** 2 + 0.3 * r * np.sin(t) + 0.2 * r**2 * np.cos(t) * np.sin(t))
        N = residual(spec, d, field.values)
        x, y = d.cartesian()
        r = d.coords[0]
        inner = d.interior()
        expected = r**3 * self.cartesian_mean_curvature_form(x, y, **kw)
        np.testing.assert_allclose(N[inner], expected[inner], atol=1e-9 * np.max(np.abs(expected)))

    def test_monomials(self):
        # u = r: M = r^2 (1 + 1) = 2 r^2 ; u = r^2: M = r (r^2)(2) + r^2 (2r + 8 r^3)
        d = assemble(ANNULUS, 12, 8)
        r = d.coords[0]
        inner = d.interior()
        spec = ProblemSpec(ANNULUS, Minimal(), all_bc(ANNULUS, Dirichlet(0.0)))
        np.testing.assert_allclose(residual(spec, d, r)[inner], (2 * r**2)[inner], atol=1e-10)
        np.testing.assert_allclose(residual(spec, d, r**2)[inner], (4 * r**3 + 8 * r**5)[inner], rtol=1e-10)


class TestRowsAndCorners:
    @pytest.mark.parametrize(
        "corner, normal",
        [("top_right", (0.5, 0.5)), ("bottom_left", (-0.5, -0.5)), ("bottom_right", (0.5, -0.5)), ("top_left", (-0.5, 0.5))],
    )
    def test_corner_normals(self, corner, normal):
        n = corner_normal(corner, RECT)
        assert n == normal
        assert math.hypot(*n) == pytest.approx(1 / math.sqrt(2))

    def test_corner_normal_needs_rectangle(self):
        with pytest.raises(GeometryError):
            corner_normal("top_right", DISK)

    @pytest.mark.parametrize("spec", specs(), ids=label)
    def test_every_row_classified_once(self, spec):
        d = grid(spec.domain)
        kinds = row_kinds(spec, d)
        assert kinds.shape == (d.size,)
        assert set(kinds) <= {"interior", "boundary", "corner", "pin"}
        np.testing.assert_array_equal(np.flatnonzero(kinds == "interior"), d.interior())
        assert (kinds == "corner").sum() == (4 if d.kind == "rectangle" else 0)
        assert (kinds == "pin").sum() == (spec.pin is not None)

    def test_pin_row(self):
        d = grid(DISK, 12, 16)
        spec = ProblemSpec(DISK, Minimal(), {"rim": CapillaryAngle("pi/2")}, Pin(1.5))
        k = pin_index(spec, d)
        r, t = d.coords
        assert r[k] == 1.0 and t[k] == 0.0
        op = assemble_operator(spec, d, np.full(d.size, 2.0))
        assert op.residual[k] == pytest.approx(0.5)
        np.testing.assert_array_equal(op.matrix[k], np.eye(d.size)[k])

    def test_annulus_pin_on_outer_ring(self):
        d = grid(ANNULUS, 10, 12)
        spec = ProblemSpec(ANNULUS, Cmc(0.0), all_bc(ANNULUS, CapillaryAngle("pi/2")), Pin(1.0, angle=math.pi / 2))
        k = pin_index(spec, d)
        assert d.coords[0][k] == 2.0 and d.coords[1][k] == pytest.approx(math.pi / 2)

    def test_corner_row_averages_edges(self):
        d = grid(SQUARE, 8)
        spec = ProblemSpec(
            SQUARE,
            Capillary(1.0),
            {"left": CapillaryAngle(1.0), "right": CapillaryAngle(1.2), "bottom": CapillaryAngle(1.4), "top": CapillaryAngle(1.6)},
        )
        v = np.zeros(d.size)
        N = residual(spec, d, v)
        k = d.corners["top_right"]
        assert N[k] == pytest.approx(-0.5 * (math.cos(1.2) + math.cos(1.6)), abs=1e-15)


class TestValidation:
    def test_missing_component(self):
        with pytest.raises(ConfigError):
            ProblemSpec(ANNULUS, Minimal(), {"inner": Dirichlet(0.0)})

    def test_mixed_rectangle(self):
        with pytest.raises(ConfigError):
            ProblemSpec(SQUARE, Minimal(), {"left": Dirichlet(0), "right": Dirichlet(0), "bottom": Dirichlet(0), "top": CapillaryAngle(1)})

    def test_pin_required(self):
        with pytest.raises(ConfigError):
            ProblemSpec(DISK, Cmc(1.0), {"rim": CapillaryAngle("pi/3")})

    def test_wrong_variable(self):
        with pytest.raises(ConfigError):
            ProblemSpec(DISK, Minimal(), {"rim": Dirichlet("x + 1")})

    def test_kappa_positive(self):
        with pytest.raises(ConfigError):
            Capillary(0.0)

    def test_angle_out_of_range(self):
        spec = ProblemSpec(DISK, Capillary(1.0), {"rim": CapillaryAngle("4")})
        with pytest.raises(ConfigError):
            check_compatibility(spec)

    def test_nan_angle(self):
        spec = ProblemSpec(DISK, Capillary(1.0), {"rim": CapillaryAngle("acos(2)")})
        with pytest.raises(ConfigError):
            check_compatibility(spec)


class TestCompatibility:
    def test_constant_angle_disk(self):
        assert cmc_from_capillary(DISK, {"rim": CapillaryAngle("pi/3")}) == pytest.approx(1.0, abs=1e-14)

    def test_disk_value(self):
        g = {"rim": CapillaryAngle("pi/2 - 0.1 + 0.2*sin(4*theta)*cos(theta)")}
        assert abs(cmc_from_capillary(DISK, g) - 0.1987) <= 5e-4

    def test_annulus_value(self):
        g = {"inner": CapillaryAngle("pi/2 + 0.1*sin(2*theta)"), "outer": CapillaryAngle("pi/2 - 0.05 + 0.01*cos(4*theta)")}
        assert abs(cmc_from_capillary(ANNULUS, g) - 0.0666) <= 5e-4

    def test_rectangle_constant(self):
        rect = Rectangle.from_bounds(0, 2, 0, 1)
        two_h = cmc_from_capillary(rect, all_bc(rect, CapillaryAngle("pi/3")))
        assert two_h == pytest.approx(6 * 0.5 / 2, rel=1e-13)

    def test_needs_capillary_data(self):
        with pytest.raises(CompatibilityError):
            cmc_from_capillary(ProblemSpec(DISK, Cmc(1.0), {"rim": Dirichlet(0.0)}))

    @pytest.mark.parametrize("dom", [SQUARE, DISK, ANNULUS], ids=lambda d: d.kind)
    def test_right_angle_has_zero_flux(self, dom):
        assert abs(check_zero_flux(dom, all_bc(dom, CapillaryAngle("pi/2")))) <= 1e-14  # cos(pi/2) rounds to 6e-17

    def test_balanced_disk_data(self):
        g = {"rim": CapillaryAngle("pi/2 + sin(16*theta)*cos(theta) + 0.2*cos(3*theta) + 0.05*cos(theta)")}
        assert abs(check_zero_flux(DISK, g)) <= 1e-10

    def test_unbalanced_disk_rejected(self):
        spec = ProblemSpec(DISK, Minimal(), {"rim": CapillaryAngle("pi/3")}, Pin(1.0))
        with pytest.raises(CompatibilityError) as info:
            check_compatibility(spec)
        assert info.value.reason == "zero-flux violation"
        assert info.value.value == pytest.approx(math.pi, abs=1e-12)

    def test_user_mean_curvature_replaced(self):
        spec = ProblemSpec(DISK, Cmc(0.3), {"rim": CapillaryAngle("pi/3")}, Pin(1.0))
        with pytest.warns(UserWarning):
            checked = check_compatibility(spec)
        assert checked.pde.two_h == pytest.approx(1.0, abs=1e-12)

    def test_matching_mean_curvature_silent(self):
        spec = ProblemSpec(DISK, Cmc(1.0), {"rim": CapillaryAngle("pi/3")}, Pin(1.0))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert check_compatibility(spec).pde.two_h == pytest.approx(1.0)

    def test_dirichlet_untouched(self):
        spec = ProblemSpec(DISK, Cmc(0.3), {"rim": Dirichlet(0.0)})
        assert check_compatibility(spec) == spec
