"""Acceptance criteria; each test prints one PASS/FAIL line in the terminal summary."""
import json
import time
from fractions import Fraction

import numpy as np
import pytest

from leviflat.bipoly import BiForm, GaussianRational, NumericForm, parse_form
from leviflat.cli import data_path, load_form, main
from leviflat.cones import (Hypersurface, analytic_cone_sampler, grassmann_cone_from_plane_curve,
                            parse_curve, pencil_cone, read_curve_file)
from leviflat.grassmann import (Hyperplane, Surd, classify, hyperplane_contained,
                                planes_through_point, reduce_at_degenerate_point)
from leviflat.levicheck import (OneForm, euler_foliation_check, foliation_tangency_numeric,
                                hyperplane_leaf_at, levi_flat_at, real_hessian_fd,
                                real_hessian_symbolic, sample_points, umbrella_handle_check)
from leviflat.probe import (BANNER, MonomialBasis, certificate_report, cosine_distance,
                            form_to_vector, implicitize_from_samples,
                            nonalgebraicity_certificate)

from conftest import random_form, random_hermitian

I = GaussianRational(0, 1)


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f} s (limit {self.limit} s)"


def quartic(x):
    return -x * (x - 1) * (x - 2) * (x - 3)


@pytest.mark.criterion(1, "quartic cone: Hermitian (4,4), 200 exact contained lines")
def test_criterion_1_quartic_cone(tmp_path, capsys):
    with Timer(30):
        out = tmp_path / "quartic.form"
        assert main(["build", "grassmann", str(data_path("quartic.curve")), "-o", str(out)]) == 0
        capsys.readouterr()
        H = load_form(out)
        rho = H.defining
        assert rho.is_hermitian() and rho.bidegree() == (4, 4)
        assert H.chart is None
        lines = [Hyperplane([-1, x, 0]) for x in range(4)]
        for k in range(1, 50):
            for x in (Fraction(k, 50), 2 + Fraction(k, 50)):
                q = quartic(x)
                assert q > 0
                lines += [Hyperplane([-1, x, Surd(0, 1, q)]), Hyperplane([-1, x, Surd(0, -1, q)])]
        assert len(lines) == 200
        assert all(hyperplane_contained(H, L) for L in lines)
        # control: off the curve the line is not contained
        assert not hyperplane_contained(H, Hyperplane([-1, Fraction(1, 2), Surd(0, 2, quartic(Fraction(1, 2)))]))


@pytest.mark.criterion(2, "probe recovers the circle cone at k=2; nonvanishing at k=1")
def test_criterion_2_oracle_equivalence(circle_cone):
    with Timer(10):
        circle = read_curve_file(data_path("circle_param.curve"))
        pts = analytic_cone_sampler(circle, 42, 400)
        cert = implicitize_from_samples(pts, 2)
        assert cert.rows == 400 and cert.null_found
        oracle = [float(x) for x in form_to_vector(circle_cone.defining, MonomialBasis(2, 2))]
        dist = cosine_distance(cert.nullvector, oracle)
        assert dist <= 1e-6
        low = implicitize_from_samples(pts, 1)
        assert low.sigma_min >= 1e-3
        print(f"cosine distance {dist:.2e}; k=1 sigmaMin {low.sigma_min:.3g}")


@pytest.mark.criterion(3, "Levi-flat and hyperplane leaves on four surfaces; sphere fails")
def test_criterion_3_levi_flat(pencil, circle_cone, quartic_cone, umb, sphere):
    with Timer(20):
        for H in (pencil, circle_cone, quartic_cone, umb):
            pts = sample_points(H, count=100, seed=42)
            assert len(pts) == 100
            for p in pts:
                assert levi_flat_at(H, p, 1e-8)
                assert hyperplane_leaf_at(H, p, 1e-8)
        pts = sample_points(sphere, count=100, seed=42)
        assert len(pts) == 100
        for p in pts:
            assert not levi_flat_at(sphere, p, 1e-8)
            assert not hyperplane_leaf_at(sphere, p, 1e-8)


@pytest.mark.criterion(4, "Euler identities exact; pencil one-form tangent, dz1 not")
def test_criterion_4_foliation(pencil, rng):
    with Timer(10):
        assert euler_foliation_check(pencil)
        for i in range(20):
            f = random_hermitian(rng, 3, 1 + i % 4, terms=5, support=(1, 2))
            assert f.bidegree() == (1 + i % 4, 1 + i % 4)
            assert euler_foliation_check(f)
        pts = sample_points(pencil, count=100, seed=42)
        good = foliation_tangency_numeric(pencil, OneForm.pencil(3), pts)
        bad = foliation_tangency_numeric(pencil, OneForm.differential(3, 1), pts)
        assert len(good.residuals) == 100 and good.max_residual <= 1e-10
        assert bad.max_residual >= 0.1
        print(f"tangency {good.max_residual:.2e}; control {bad.max_residual:.3f}")


@pytest.mark.criterion(5, "degenerate axis vs isolated line; classify labels")
def test_criterion_5_degeneracy(pencil, quartic_cone, umb):
    with Timer(30):
        res = planes_through_point(pencil, [1, 0, 0])
        assert res.verdict == "curve"
        res = planes_through_point(umb.projectivized(), [1, 0, 0])
        assert res.verdict == "finite"
        assert res.planes == [Hyperplane([0, 0, 1])]  # w = 0, i.e. c = 0
        rep = classify(pencil)
        assert rep.label == "2n-4"
        assert rep.text() == "dim H_s = 2n-4; degenerate axis [1,0,0]"
        rep = classify(quartic_cone)
        assert rep.label == "2n-2" and not rep.degenerate_points
        assert rep.note == "critical-locus heuristic"


@pytest.mark.criterion(6, "reduction at the pencil axis gives a cone over |zeta| = 1")
def test_criterion_6_reduction(pencil):
    with Timer(5):
        red = reduce_at_degenerate_point(pencil, [1, 0, 0])
        assert red.is_cone
        num = NumericForm(red.reduced)
        theta = np.linspace(0, 2 * np.pi, 50, endpoint=False)
        on = np.column_stack([np.exp(1j * theta), np.ones(50)])
        assert np.max(np.abs(num.diag(on))) <= 1e-12
        rng = np.random.default_rng(0)
        zeta = rng.uniform(0.2, 3, 50) * np.exp(1j * theta)
        off = np.column_stack([zeta, np.ones(50)])
        vals = num.diag(off).real
        assert np.array_equal(np.sign(vals), np.sign(np.abs(zeta) ** 2 - 1))


def _realified(rho):
    """The chart form as a polynomial in formal real variables x, y, s, t (holomorphic slots)."""
    x, y, s, t = (BiForm.z(4, i) for i in range(4))
    one = BiForm.constant(4, 1)
    holo = [one, x + y.scale(I), s + t.scale(I)]
    anti = [one, x - y.scale(I), s - t.scale(I)]
    return rho.compose(holo, anti)


@pytest.mark.criterion(7, "umbrella lines, singular plane and handle")
def test_criterion_7_umbrella(umb):
    with Timer(60):
        for c in (0, 1, -1, 2, -2, Fraction(3, 2)):
            c = GaussianRational.coerce(c)
            assert hyperplane_contained(umb, Hyperplane([c * c, c, -1]))
        for c in (I, 1 + I):
            assert not hyperplane_contained(umb, Hyperplane([c * c, c, -1]))
        real = _realified(umb.defining)
        x, y, s, t = (BiForm.z(4, i) for i in range(4))
        assert real == s * y * y - t * x * y - t * t
        grad = [real.partial("holo", i) for i in range(4)]
        zero = BiForm.zero(4)
        on_plane = [g.compose([x, zero, s, zero], [BiForm.w(4, i) for i in range(4)]) for g in grad]
        assert all(not g for g in on_plane)
        # d/ds = y^2 and d/dt = -xy - 2t vanish together only when y = t = 0
        assert grad[2] == y * y
        assert grad[3] == -(x * y) - t.scale(GaussianRational(2))
        rep = umbrella_handle_check(100000, 42)
        assert rep.verdict
        k = rep.handle_points.index((0.0, -1.0))
        assert rep.handle_residuals[k] == 0 and rep.handle_distances[k] >= 0.05
        print(f"handle distance {rep.handle_distances[k]:.3f}; {rep.note}")


@pytest.mark.criterion(8, "transcendental curve: sigmaMin >= 1e-3 for k=1..3 (evidence)")
def test_criterion_8_nonalgebraicity():
    with Timer(60):
        curve = read_curve_file(data_path("transcendental.curve"))
        certs = nonalgebraicity_certificate(lambda s, c: analytic_cone_sampler(curve, s, c), 3)
        for c in certs:
            assert c.rows >= 2 * c.basis_dim
            assert c.sigma_min >= 1e-3, (c.k, c.sigma_min)
        report = certificate_report(certs, 42)
        assert report["banner"] == BANNER == "numerical evidence up to bidegree kmax, not a proof"
        assert report["nonvanishing"] == [1, 2, 3]
        circle = read_curve_file(data_path("circle_param.curve"))
        control = nonalgebraicity_certificate(lambda s, c: analytic_cone_sampler(circle, s, c), 2)
        assert control[1].sigma_min <= 1e-10
        print("sigmaMin", [f"{c.sigma_min:.3g}" for c in certs], "circle k=2",
              f"{control[1].sigma_min:.1e}")


def _random_invertible(rng, n=3):
    while True:
        T = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        if abs(np.linalg.det(np.array(T, dtype=float))) > 1e-6:
            return T


@pytest.mark.criterion(9, "core property suites")
def test_criterion_9_properties(rng, pencil, circle_cone, quartic_cone, umb):
    with Timer(60):
        zero = BiForm.zero(3)
        for _ in range(30):
            f, g, h = (random_form(rng, 3, 4, 2) for _ in range(3))
            assert f + g == g + f and (f + g) + h == f + (g + h)
            assert f * g == g * f and (f * g) * h == f * (g * h)
            assert f * (g + h) == f * g + f * h
            assert f - f == zero
            assert f.conj_transpose().conj_transpose() == f
            assert (f * g).conj_transpose() == f.conj_transpose() * g.conj_transpose()
            assert (f + g).conj_transpose() == f.conj_transpose() + g.conj_transpose()
            assert (f - f.conj_transpose()).scale(I).is_hermitian()
            parts = f.decompose()
            assert all(p.is_bihomogeneous(*bd) for bd, p in parts.items())
            assert sum(parts.values(), zero) == f
        for d in (1, 2, 3, 4):
            f = random_hermitian(rng, 3, d, terms=5)
            ez = sum((BiForm.z(3, i) * f.partial("holo", i) for i in range(3)), zero)
            ew = sum((BiForm.w(3, i) * f.partial("anti", i) for i in range(3)), zero)
            assert ez == f.scale(GaussianRational(d)) and ew == f.scale(GaussianRational(d))

        worst = 0.0
        for H in (pencil, circle_cone, quartic_cone, umb):
            for p in sample_points(H, count=5, seed=9):
                fd, point = real_hessian_fd(H, p.coords, p.chart, h=1e-5)
                sym = real_hessian_symbolic(H, point, p.chart)
                err = np.linalg.norm(fd - sym) / np.linalg.norm(sym)
                worst = max(worst, err)
        assert worst <= 1e-6

        lines = [Hyperplane([-1, Fraction(3, 5), Fraction(4, 5)]),
                 Hyperplane([-1, Fraction(5, 13), Fraction(-12, 13)]),
                 Hyperplane([-1, Fraction(1, 2), Fraction(1, 2)]),
                 Hyperplane([0, 1, I])]
        for _ in range(10):
            T = _random_invertible(rng)
            moved = Hypersurface(2, circle_cone.defining.substitute_linear(T), None, "moved")
            for L in lines:
                assert (hyperplane_contained(moved, L.pullback(T))
                        == hyperplane_contained(circle_cone, L))
        print(f"finite differences: worst relative error {worst:.2e}")
