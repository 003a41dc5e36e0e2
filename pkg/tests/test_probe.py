import numpy as np
import pytest

from leviflat.bipoly import NumericForm, parse_form
from leviflat.cones import analytic_cone_sampler, implicit_cone_sampler, parse_curve
from leviflat.errors import DimensionError, OversamplingError
from leviflat.probe import (BANNER, MonomialBasis, certificate_report, cosine_distance,
                            form_to_vector, implicitize_from_samples, monomial_basis,
                            nonalgebraicity_certificate, vector_to_form)

from conftest import random_hermitian

CIRCLE = parse_curve("parametric: a(t) = cos(t); b(t) = sin(t)")
QUARTIC = parse_curve("implicit: x*(x-1)*(x-2)*(x-3) + y^2")


def pencil_samples(seed, count):
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(-0.7, 0.7, count))
    a, b = rng.uniform(0, 2 * np.pi, (2, count))
    z0 = rng.normal(size=count) + 1j * rng.normal(size=count)
    return np.column_stack([z0, r * np.exp(1j * a), r * np.exp(1j * b)])


def open_set_samples(seed, count):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(count, 3)) + 1j * rng.normal(size=(count, 3))


def test_basis_dimensions():
    b = monomial_basis(1, 1)
    assert b.size == 4
    assert b.labels() == ["|z0|^2", "|z1|^2", "Re(z0*conj(z1))", "Im(z0*conj(z1))"]
    assert MonomialBasis(2, 1).size == 9
    assert MonomialBasis(2, 2).size == 36
    with pytest.raises(DimensionError):
        MonomialBasis(0, 1)
    with pytest.raises(DimensionError):
        MonomialBasis(2, 0)


def test_basis_values_match_form_evaluation(rng):
    basis = MonomialBasis(2, 2)
    pts = open_set_samples(0, 5)
    assert basis.evaluate(pts).dtype == np.float64
    for _ in range(3):
        f = random_hermitian(rng, 3, 2, terms=6)
        vec = np.array([float(x) for x in form_to_vector(f, basis)])
        direct = NumericForm(f).diag(pts)
        assert np.max(np.abs(direct.imag)) <= 1e-14 * np.max(np.abs(direct))
        assert np.allclose(basis.evaluate(pts) @ vec, direct.real, rtol=1e-12, atol=1e-12)
        assert vector_to_form(form_to_vector(f, basis), basis) == f


def test_oversampling_error():
    with pytest.raises(OversamplingError):
        implicitize_from_samples(open_set_samples(0, 17), 1)
    assert implicitize_from_samples(open_set_samples(0, 18), 1).rows == 18


def test_pencil_nullvector():
    cert = implicitize_from_samples(pencil_samples(1, 40), 1)
    assert cert.sigma_min <= 1e-12 and cert.null_found
    oracle = form_to_vector(parse_form("(1)*z1*w1 + (-1)*z2*w2", 3), MonomialBasis(2, 1))
    assert cosine_distance(cert.nullvector, [float(x) for x in oracle]) <= 1e-8


def test_generic_points_have_no_relation():
    for k in (1, 2, 3):
        size = MonomialBasis(2, k).size
        cert = implicitize_from_samples(open_set_samples(k, 2 * size), k)
        assert cert.sigma_min >= 1e-2 and not cert.null_found


def test_cone_nullvector_vanishes_on_fresh_samples(circle_cone):
    cert = implicitize_from_samples(analytic_cone_sampler(CIRCLE, 3, 200), 2)
    assert cert.null_found
    form = vector_to_form(cert.nullvector, MonomialBasis(2, 2))
    fresh = analytic_cone_sampler(CIRCLE, 99, 1000)
    fresh = fresh / np.linalg.norm(fresh, axis=1, keepdims=True)
    assert np.max(np.abs(NumericForm(form).diag(fresh))) <= 1e-8
    oracle = [float(x) for x in form_to_vector(circle_cone.defining, MonomialBasis(2, 2))]
    assert cosine_distance(cert.nullvector, oracle) <= 1e-6


def test_quartic_has_no_lower_degree_form():
    for k in (1, 2, 3):
        size = MonomialBasis(2, k).size
        cert = implicitize_from_samples(implicit_cone_sampler(QUARTIC, k, 2 * size), k)
        assert cert.sigma_min >= 1e-3


def test_monotone_in_rows():
    pts = analytic_cone_sampler(parse_curve("parametric: a(t) = cos(t)*exp(sin(t)); "
                                            "b(t) = sin(t)*exp(-cos(t))"), 5, 200)
    full = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    scales = np.linalg.norm(MonomialBasis(2, 2).evaluate(full), axis=0)
    prev = 0.0
    for m in (72, 100, 150, 200):
        s = implicitize_from_samples(pts[:m], 2, column_scales=scales).sigma_min
        assert s >= prev - 1e-12
        prev = s


def test_determinism():
    def sampler(seed, count):
        return analytic_cone_sampler(CIRCLE, seed, count)
    a = nonalgebraicity_certificate(sampler, 2, seed=7)
    b = nonalgebraicity_certificate(sampler, 2, seed=7)
    assert [c.to_json_obj() for c in a] == [c.to_json_obj() for c in b]


def test_circle_certificate_report():
    def sampler(seed, count):
        return analytic_cone_sampler(CIRCLE, seed, count)
    certs = nonalgebraicity_certificate(sampler, 2, rows_per_degree=100)
    rep = certificate_report(certs, 42)
    assert rep["banner"] == BANNER and "not a proof" in BANNER
    assert rep["nonvanishing"] == [1] and rep["nullFound"] == [2]
    assert set(rep["certificates"][0]) == {"k", "rows", "basisDim", "sigmaMin", "nullvector", "seed"}


def test_kmax_zero():
    certs = nonalgebraicity_certificate(lambda s, c: open_set_samples(s, c), 0)
    assert certs == []
    assert certificate_report(certs, 1)["certificates"] == []


def test_zero_point_rejected():
    pts = open_set_samples(0, 20)
    pts[3] = 0
    with pytest.raises(DimensionError):
        implicitize_from_samples(pts, 1)
