import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from leviflat.cli import data_path
from leviflat.bipoly import BiForm, GaussianRational, NumericForm, eval_diag, parse_form
from leviflat.cones import (Hypersurface, ImplicitCurve, ParametricCurve, analytic_cone_sampler,
                            cramer_forms, delta_form, grassmann_cone_from_plane_curve,
                            implicit_cone_sampler, parse_curve, pencil_cone, sampler_csv,
                            umbrella)
from leviflat.errors import (DegenerateInputError, DegreeError, DimensionError, ParseError,
                             StructuralError, SymmetryError)
from leviflat.grassmann import Hyperplane, Surd, hyperplane_contained

from test_bipoly import to_sympy


def test_delta_form():
    d = delta_form(2)
    assert d == BiForm.z(3, 1) * BiForm.w(3, 2) - BiForm.w(3, 1) * BiForm.z(3, 2)
    assert d.conj_transpose() == -d
    assert d.bidegree() == (1, 1)
    for r, s in [(0.3, -2.0), (1.5, 4.0)]:
        assert abs(eval_diag(d, [1, r, s])) == 0
    with pytest.raises(DimensionError):
        delta_form(1)


def test_circle_cone_matches_hand_formula(circle_cone):
    nx, ny, den = cramer_forms()
    assert circle_cone.defining == nx * nx + ny * ny - den * den
    assert circle_cone.defining.bidegree() == (2, 2)
    assert hyperplane_contained(circle_cone, Hyperplane([-1, 1, 0]))


def test_circle_cone_sympy_elimination(circle_cone):
    # independent path: clear denominators of the Cramer solve in sympy
    z0, z1, z2, w0, w1, w2 = sp.symbols("z0 z1 z2 w0 w1 w2")
    det = z1 * w2 - w1 * z2
    x = (z0 * w2 - w0 * z2) / det
    y = (z1 * w0 - w1 * z0) / det
    expr = sp.expand(sp.cancel((x ** 2 + y ** 2 - 1) * det ** 2))
    got, zs, ws = to_sympy(circle_cone.defining)
    got = got.xreplace({zs[0]: z0, zs[1]: z1, zs[2]: z2, ws[0]: w0, ws[1]: w1, ws[2]: w2})
    assert sp.expand(got - expr) == 0


def test_quartic_cone_shape(quartic_cone):
    rho = quartic_cone.defining
    assert rho.is_hermitian()
    assert rho.bidegree() == (4, 4)


def test_odd_degree_branch():
    H = grassmann_cone_from_plane_curve(parse_curve("implicit: x"))
    assert H.defining.is_hermitian()
    assert H.defining.bidegree() == (1, 1)
    for y in (0, 1, Fraction(-7, 3)):
        assert hyperplane_contained(H, Hyperplane([-1, 0, y]))
    cubic = grassmann_cone_from_plane_curve(parse_curve("implicit: y^2 - x^3 + x"))
    assert cubic.defining.is_hermitian() and cubic.defining.bidegree() == (3, 3)
    assert hyperplane_contained(cubic, Hyperplane([-1, 1, 0]))


def test_rational_points_give_contained_planes(circle_cone):
    for a, b, c in [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29)]:
        for sx, sy in [(1, 1), (-1, 1), (1, -1)]:
            x, y = Fraction(sx * a, c), Fraction(sy * b, c)
            assert hyperplane_contained(circle_cone, Hyperplane([-1, x, y]))
    assert not hyperplane_contained(circle_cone, Hyperplane([-1, Fraction(1, 2), Fraction(1, 2)]))


def test_surd_points_on_quartic(quartic_cone):
    for x in (Fraction(1, 3), Fraction(5, 2)):
        q = -x * (x - 1) * (x - 2) * (x - 3)
        assert hyperplane_contained(quartic_cone, Hyperplane([-1, x, Surd(0, 1, q)]))
        assert hyperplane_contained(quartic_cone, Hyperplane([-1, x, Surd(0, -1, q)]))
        assert not hyperplane_contained(quartic_cone, Hyperplane([-1, x, Surd(0, 2, q)]))


def test_quartic_surd_point_sympy_oracle(quartic_cone):
    # substitute z0 = x z1 + sqrt(q) z2 in sympy and expand
    x = sp.Rational(1, 3)
    y = sp.sqrt(-x * (x - 1) * (x - 2) * (x - 3))
    expr, zs, ws = to_sympy(quartic_cone.defining)
    sub = expr.xreplace({zs[0]: x * zs[1] + y * zs[2], ws[0]: x * ws[1] + y * ws[2]})
    assert sp.expand(sub) == 0


def test_elimination_oracle_at_random_points(quartic_cone, rng):
    """D^d p(Nx/D, Ny/D) evaluated directly agrees with the expanded form."""
    nx, ny, den = cramer_forms()
    curve = parse_curve("implicit: x*(x-1)*(x-2)*(x-3) + y^2")
    for _ in range(100):
        z = [GaussianRational(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                              Fraction(rng.randint(-9, 9), rng.randint(1, 5))) for _ in range(3)]
        N1, N2, Dv = (f.eval_diag_exact(z) for f in (nx, ny, den))
        if not Dv:
            continue
        direct = Dv ** 4 * sum((GaussianRational(c) * (N1 / Dv) ** i * (N2 / Dv) ** j
                                for (i, j), c in curve.coeffs.items()), GaussianRational(0))
        assert quartic_cone.defining.eval_diag_exact(z) == direct


def test_pencil_cone():
    q = parse_form("(1)*z1*w1 + (-1)*z2*w2", 3)
    H2 = pencil_cone(q, 2)
    H3 = pencil_cone(q, 3)
    assert H3.defining.nvars == 4
    for H in (H2, H3):
        assert H.defining.is_hermitian()
        for i in range(H.defining.nvars):
            assert not H.defining.partial("holo", i).eval_diag_exact([1] + [0] * H.n)
    assert pencil_cone(q * q, 2).defining.bidegree() == (2, 2)
    with pytest.raises(StructuralError):
        pencil_cone(parse_form("(1)*z0*w1 + (1)*z1*w0", 3))
    with pytest.raises(SymmetryError):
        pencil_cone(parse_form("(1)*z1*w2", 3))
    with pytest.raises(DegreeError):
        pencil_cone(parse_form("(1)*z1*w1*w2 + (1)*z1*z2*w1", 3))


def test_umbrella_values(umb):
    rho = umb.defining
    assert rho.is_hermitian()
    # z = i, w = 1 + i  ->  x=0, y=1, s=1, t=1
    assert rho.eval_diag_exact([1, GaussianRational(0, 1), GaussianRational(1, 1)]) == 0
    assert umb.homogeneous().bidegree() == (2, 2)
    for c in (0, 1, -2):
        assert hyperplane_contained(umb, Hyperplane([c * c, c, -1]))
    assert not hyperplane_contained(umb, Hyperplane([-1, GaussianRational(0, 1), -1]))


def test_umbrella_realification_oracle(umb):
    x, y, s, t = sp.symbols("x y s t", real=True)
    expr, zs, ws = to_sympy(umb.defining)
    real = expr.xreplace({zs[1]: x + sp.I * y, ws[1]: x - sp.I * y,
                          zs[2]: s + sp.I * t, ws[2]: s - sp.I * t, zs[0]: 1, ws[0]: 1})
    assert sp.expand(real - (s * y ** 2 - t * x * y - t ** 2)) == 0


def test_umbrella_decomposition(umb):
    parts = umb.defining.decompose()
    assert set(parts) == {(0, 2), (1, 1), (2, 0), (1, 2), (2, 1)}
    assert sum(parts.values(), BiForm.zero(3)) == umb.defining


def test_hypersurface_validation():
    with pytest.raises(SymmetryError):
        Hypersurface(2, parse_form("(1)*z1*w2", 3))
    with pytest.raises(DegreeError):
        Hypersurface(2, parse_form("(1)*z1*w1 + (-1)", 3))
    with pytest.raises(StructuralError):
        Hypersurface(2, parse_form("(1)*z0*w0 + (-1)", 3), chart=0)
    with pytest.raises(DegenerateInputError):
        Hypersurface(2, BiForm.zero(3))


# curves ---------------------------------------------------------------------------------

def test_parse_implicit_curve():
    c = parse_curve("# comment\nimplicit: x*(x-1)*(x-2)*(x-3) + y^2\n")
    assert isinstance(c, ImplicitCurve)
    assert c.degree == 4
    assert c.coeffs[(0, 2)] == 1 and c.coeffs[(1, 0)] == -6
    assert parse_curve("implicit: x^2/4 + y^2 - 1").coeffs[(2, 0)] == Fraction(1, 4)
    with pytest.raises(DegenerateInputError):
        parse_curve("implicit: x - x")


def test_parse_parametric_curve():
    c = parse_curve("parametric: a(t) = cos(t); b(t) = sin(t) + (1/4)*sin(2 t)")
    assert isinstance(c, ParametricCurve)
    a, b = c(np.array([0.5]))
    assert a[0] == pytest.approx(math.cos(0.5))
    assert b[0] == pytest.approx(math.sin(0.5) + 0.25 * math.sin(1.0))
    da, db = c.derivative(np.array([0.5]))
    assert da[0] == pytest.approx(-math.sin(0.5), rel=1e-14)
    assert db[0] == pytest.approx(math.cos(0.5) + 0.5 * math.cos(1.0), rel=1e-14)


def test_curve_errors():
    with pytest.raises(ParseError) as err:
        parse_curve("\nimplicit: x^2 + z")
    assert (err.value.line, err.value.column) == (2, 17)
    with pytest.raises(ParseError):
        parse_curve("parametric: a(t) = cos(t)")
    with pytest.raises(ParseError):
        parse_curve("parametric: a(t) = log(t); b(t) = t")
    with pytest.raises(DegenerateInputError):
        parse_curve("parametric: a(t) = t; b(t) = t")  # not periodic
    with pytest.raises(DegenerateInputError):
        parse_curve("parametric: a(t) = cos(t)^3; b(t) = sin(t)^3")  # astroid cusps


def test_analytic_sampler_on_circle_cone(circle_cone):
    circle = parse_curve("parametric: a(t) = cos(t); b(t) = sin(t)")
    pts = analytic_cone_sampler(circle, 3, 200)
    assert pts.shape == (200, 3)
    vals = NumericForm(circle_cone.defining).diag(pts)
    scale = np.linalg.norm(pts, axis=1) ** 4
    assert np.max(np.abs(vals) / scale) <= 1e-12
    assert np.array_equal(pts, analytic_cone_sampler(circle, 3, 200))
    assert analytic_cone_sampler(circle, 3, 0).shape == (0, 3)
    moduli = np.abs(pts[:, 1:])
    assert moduli.min() >= 0.5 - 1e-12 and moduli.max() <= 2 + 1e-12
    assert np.std(np.abs(pts[:, 1]) - np.abs(pts[:, 2])) > 0.1


def test_implicit_sampler_on_quartic(quartic_cone):
    curve = parse_curve("implicit: x*(x-1)*(x-2)*(x-3) + y^2")
    pts = implicit_cone_sampler(curve, 5, 50)
    vals = NumericForm(quartic_cone.defining).diag(pts)
    assert np.max(np.abs(vals) / np.linalg.norm(pts, axis=1) ** 8) <= 1e-10


def test_sampler_csv():
    circle = parse_curve("parametric: a(t) = cos(t); b(t) = sin(t)")
    pts, t = analytic_cone_sampler(circle, 1, 3, return_params=True)
    text = sampler_csv(pts, t)
    lines = text.split("\n")
    assert lines[0] == "re(z0),im(z0),re(z1),im(z1),re(z2),im(z2),t"
    assert len(lines) == 5 and lines[-1] == ""
    assert "\r" not in text


def _vandermonde_sigma(a, b, degree):
    cols = [a ** i * b ** j for i in range(degree + 1) for j in range(degree + 1 - i)]
    V = np.column_stack(cols)
    V = V / np.linalg.norm(V, axis=0)
    s = np.linalg.svd(V, compute_uv=False)
    return s[-1] / s[0]


def test_transcendental_curve_vetting():
    """No low-degree polynomial vanishes on the bundled transcendental curve."""
    curve = parse_curve(data_path("transcendental.curve").read_text())
    t = np.linspace(0, 2 * np.pi, 600, endpoint=False)
    a, b = curve(t)
    assert _vandermonde_sigma(a, b, 3) >= 1e-2
    assert _vandermonde_sigma(a, b, 6) >= 1e-12
    for text in ("parametric: a(t) = cos(t); b(t) = sin(t)",
                 "parametric: a(t) = cos(t); b(t) = sin(t) + (1/4)*sin(2 t)"):
        ca, cb = parse_curve(text)(t)
        assert _vandermonde_sigma(ca, cb, 6) <= 1e-13
