"""Numerical Levi-flatness checks at sampled smooth points.

Derivatives are symbolic (Wirtinger derivatives of the exact form), evaluated
in floating point on the diagonal ``w = conj(z)`` of one affine chart.
Verdicts compare norms against ``tol * scale`` where
``scale = max|coefficient| * (1 + |p|) ** total_degree``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .bipoly import BiForm, GaussianRational, NumericForm
from .cones import Hypersurface, umbrella
from .errors import NotSmoothError, SamplingError, StructuralError

__all__ = [
    "TOLERANCES", "SurfacePoint", "OneForm", "sample_points", "complex_tangent",
    "levi_form", "levi_flat_at", "hessian_on_tangent", "hyperplane_leaf_at",
    "euler_foliation_check", "foliation_tangency_numeric", "TangencyReport",
    "umbrella_handle_check", "HandleReport", "report_json", "slice_points",
    "slice_csv", "real_hessian_fd", "real_hessian_symbolic",
]

TOLERANCES = {
    "residual": 1e-12,
    "gradient_floor": 1e-8,
    "flat": 1e-8,
    "bisection_width": 1e-12,
    "newton_steps": 5,
    "fd_step": 1e-5,
    "tangency": 1e-8,
}


class _ChartDerivatives:
    """Compiled value, gradient and Hessians of a chart form."""

    def __init__(self, form, chart):
        self.form = form
        self.chart = chart
        self.nvars = form.nvars
        self.idx = [i for i in range(form.nvars) if i != chart]
        self.value = NumericForm(form)
        dz = [form.partial("holo", i) for i in self.idx]
        self.grad = [NumericForm(g) for g in dz]
        self.mixed = [[NumericForm(g.partial("anti", j)) for j in self.idx] for g in dz]
        self.holo_hess = [[NumericForm(g.partial("holo", j)) for j in self.idx] for g in dz]
        self.coeff_scale = form.max_abs_coeff()
        self.degree = form.total_degree()

    def lift(self, p):
        p = np.asarray(p, dtype=complex)
        return np.insert(p, self.chart, 1.0, axis=-1)

    def scale(self, p):
        return self.coeff_scale * (1.0 + float(np.linalg.norm(p))) ** self.degree

    def rho(self, p):
        z = self.lift(p)
        return self.value(z, np.conj(z)).real

    def gradient(self, p):
        z = self.lift(p)
        zc = np.conj(z)
        return np.array([g(z, zc) for g in self.grad])

    def _matrix(self, table, p):
        z = self.lift(p)
        zc = np.conj(z)
        return np.array([[e(z, zc) for e in row] for row in table])

    def levi_matrix(self, p):
        return self._matrix(self.mixed, p)

    def holo_matrix(self, p):
        return self._matrix(self.holo_hess, p)


@lru_cache(maxsize=64)
def _derivs(form, chart):
    return _ChartDerivatives(form, chart)


def _chart_derivs(H, chart=None):
    if chart is None:
        chart = H.default_chart()
    return _derivs(H.chart_form(chart), chart)


@dataclass(frozen=True)
class SurfacePoint:
    """Smooth point of a hypersurface in the affine chart ``z_chart = 1``."""

    coords: np.ndarray = field(compare=False)
    chart: int
    residual: float
    gradient_norm: float
    scale: float

    def homogeneous(self):
        return np.insert(np.asarray(self.coords, dtype=complex), self.chart, 1.0)


def make_point(H, coords, chart=None):
    """Certify ``coords`` as a smooth point; raises NotSmoothError otherwise."""
    d = _chart_derivs(H, chart)
    p = np.asarray(coords, dtype=complex)
    scale = d.scale(p)
    res = abs(d.rho(p))
    gn = float(np.linalg.norm(d.gradient(p)))
    if gn <= TOLERANCES["gradient_floor"] * scale:
        raise NotSmoothError(f"gradient norm {gn:.3e} below floor at {p}")
    return SurfacePoint(p, d.chart, res, gn, scale)


def _to_complex(x):
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., n:]


def sample_points(H, chart=None, count=100, seed=42, box=2.0, anchor_scale=1.0):
    """Random smooth points of ``H`` by line search in the realified chart.

    Anchors are normal with standard deviation ``anchor_scale``; each line
    ``anchor + t * direction`` is scanned for sign changes on ``|t| <= box``.
    """
    d = _chart_derivs(H, chart)
    n = len(d.idx)
    if count <= 0:
        return []
    if d.coeff_scale == 0:
        raise SamplingError("defining form vanishes identically in the chart", 0, 0)
    rng = np.random.default_rng(seed)
    tgrid = np.linspace(-box, box, 65)
    out = []
    attempts = 0
    limit = 100 * count
    while len(out) < count:
        if attempts >= limit:
            raise SamplingError(
                f"accepted {len(out)} of {count} points after {attempts} attempts",
                attempts, len(out))
        attempts += 1
        anchor = anchor_scale * rng.normal(size=2 * n)
        direction = rng.normal(size=2 * n)
        direction /= np.linalg.norm(direction)
        pts = _to_complex(anchor[None, :] + tgrid[:, None] * direction[None, :])
        z = d.lift(pts)
        vals = d.value(z, np.conj(z)).real
        brackets = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if not len(brackets):
            continue
        k = brackets[rng.integers(len(brackets))]
        t = _refine_root(d, anchor, direction, tgrid[k], tgrid[k + 1], vals[k])
        p = _to_complex(anchor + t * direction)
        scale = d.scale(p)
        res = abs(d.rho(p))
        grad = d.gradient(p)
        gn = float(np.linalg.norm(grad))
        if res <= TOLERANCES["residual"] * scale and gn > TOLERANCES["gradient_floor"] * scale:
            out.append(SurfacePoint(p, d.chart, res, gn, scale))
    return out


def _refine_root(d, anchor, direction, lo, hi, f_lo):
    """Bisection to the configured width, then a few guarded Newton steps."""
    def f(t):
        return d.rho(_to_complex(anchor + t * direction))

    s_lo = np.sign(f_lo)
    while hi - lo > TOLERANCES["bisection_width"]:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if np.sign(fm) == s_lo:
            lo = mid
        else:
            hi = mid
    t = best = 0.5 * (lo + hi)
    best_val = abs(f(t))
    dz = _to_complex(direction)
    for _ in range(TOLERANCES["newton_steps"]):
        p = _to_complex(anchor + t * direction)
        slope = 2.0 * (d.gradient(p) @ dz).real
        if slope == 0 or not np.isfinite(slope):
            break
        t = t - d.rho(p) / slope
        val = abs(f(t))
        if not np.isfinite(val) or abs(t - best) > 1e-6:
            break
        if val < best_val:
            best, best_val = t, val
    return best


def _point_coords(p):
    return p.coords if isinstance(p, SurfacePoint) else np.asarray(p, dtype=complex)


def _smooth_data(H, p):
    chart = p.chart if isinstance(p, SurfacePoint) else None
    d = _chart_derivs(H, chart)
    x = _point_coords(p)
    grad = d.gradient(x)
    scale = d.scale(x)
    if np.linalg.norm(grad) <= TOLERANCES["gradient_floor"] * scale:
        raise NotSmoothError("holomorphic gradient too small for a smooth-point certificate")
    return d, x, grad, scale


def complex_tangent(H, p):
    """Orthonormal basis (as columns) of the kernel of the covector ``d rho(p)``."""
    _, _, grad, _ = _smooth_data(H, p)
    return _kernel(grad)


def _kernel(covector):
    _, _, vh = np.linalg.svd(covector.reshape(1, -1))
    return vh[1:].conj().T


def levi_form(H, p):
    """Mixed Hessian restricted to the complex tangent: ``V^T L conj(V)``."""
    d, x, grad, _ = _smooth_data(H, p)
    V = _kernel(grad)
    return V.T @ d.levi_matrix(x) @ V.conj()


def levi_flat_at(H, p, tol=None):
    tol = TOLERANCES["flat"] if tol is None else tol
    d, x, _, scale = _smooth_data(H, p)
    return bool(np.linalg.norm(levi_form(H, p), 2) <= tol * scale)


def hessian_on_tangent(H, p):
    """(restricted holomorphic Hessian, restricted mixed Hessian)."""
    d, x, grad, _ = _smooth_data(H, p)
    V = _kernel(grad)
    return V.T @ d.holo_matrix(x) @ V, V.T @ d.levi_matrix(x) @ V.conj()


def hyperplane_leaf_at(H, p, tol=None):
    tol = TOLERANCES["flat"] if tol is None else tol
    _, _, _, scale = _smooth_data(H, p)
    hh, mixed = hessian_on_tangent(H, p)
    return bool(max(np.linalg.norm(hh, 2), np.linalg.norm(mixed, 2)) <= tol * scale)


# finite-difference cross-check ------------------------------------------------

def real_hessian_symbolic(H, coords, chart=None):
    """Hessian of ``rho`` in real coordinates ``(Re z, Im z)`` from Wirtinger derivatives."""
    d = _chart_derivs(H, chart)
    x = np.asarray(coords, dtype=complex)
    A = d.holo_matrix(x)
    B = d.levi_matrix(x)
    xx = 2 * (A + B).real
    yy = 2 * (B - A).real
    xy = -2 * (A - B).imag
    return np.block([[xx, xy], [xy.T, yy]])


def real_hessian_fd(H, coords, chart=None, h=None):
    """Central differences of the exact diagonal values at rational stencil points.

    ``coords`` is rounded to a rational point first; the stencil is exact so
    only the truncation error of the difference formula remains.
    """
    h = Fraction(1, 100000) if h is None else Fraction(h).limit_denominator(10 ** 9)
    if chart is None:
        chart = H.default_chart()
    f = H.chart_form(chart)
    base = [Fraction(float(v)).limit_denominator(10 ** 6) for c in coords for v in (c.real, c.imag)]
    m = len(base)
    n = m // 2

    def value(vec):
        pt = [GaussianRational(vec[i], vec[n + i]) for i in range(n)]
        pt.insert(chart, GaussianRational(1))
        return f.eval_diag_exact(pt).re

    out = np.zeros((m, m))
    f0 = value(base)
    for i in range(m):
        for j in range(i, m):
            if i == j:
                up = list(base); up[i] += h
                dn = list(base); dn[i] -= h
                val = (value(up) - 2 * f0 + value(dn)) / (h * h)
            else:
                acc = Fraction(0)
                for si, sj, sign in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
                    v = list(base); v[i] += si * h; v[j] += sj * h
                    acc += sign * value(v)
                val = acc / (4 * h * h)
            out[i, j] = out[j, i] = float(val)
    point = np.array([complex(base[i], base[n + i]) for i in range(n)])
    return out, point


# foliations -----------------------------------------------------------------------

def euler_foliation_check(H):
    """Exact Euler identities for a pencil form in ``z1, z2``."""
    rho = H.defining if isinstance(H, Hypersurface) else H
    if rho.support() - {1, 2}:
        raise StructuralError("euler_foliation_check needs a form in z1, z2 only")
    bd = rho.bidegree()
    if bd is None:
        raise StructuralError("form is not bihomogeneous")
    j, k = bd
    n = rho.nvars
    ez = BiForm.zero(n)
    ew = BiForm.zero(n)
    for i in (1, 2):
        ez = ez + BiForm.z(n, i) * rho.partial("holo", i)
        ew = ew + BiForm.w(n, i) * rho.partial("anti", i)
    return ez == rho.scale(GaussianRational(j)) and ew == rho.scale(GaussianRational(k))


@dataclass(frozen=True)
class OneForm:
    """Holomorphic one-form ``sum f_i dz_i`` with BiForm coefficients."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if not coeffs:
            raise StructuralError("one-form needs at least one coefficient")
        nv = coeffs[0].nvars
        if len(coeffs) != nv or any(c.nvars != nv for c in coeffs):
            raise StructuralError("one-form must have one coefficient per variable")

    @property
    def nvars(self):
        return len(self.coeffs)

    @classmethod
    def pencil(cls, nvars=3):
        """``z2 dz1 - z1 dz2``."""
        zero = BiForm.zero(nvars)
        c = [zero] * nvars
        c[1] = BiForm.z(nvars, 2)
        c[2] = -BiForm.z(nvars, 1)
        return cls(tuple(c))

    @classmethod
    def differential(cls, nvars, i):
        c = [BiForm.zero(nvars)] * nvars
        c[i] = BiForm.constant(nvars, 1)
        return cls(tuple(c))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.array([NumericForm(c)(z, np.conj(z)) for c in self.coeffs])


def _sine(a, b):
    """Sine of the angle between complex lines spanned by ``a`` and ``b``."""
    wedge = np.outer(a, b) - np.outer(b, a)
    return float(np.sqrt(0.5 * np.sum(np.abs(wedge) ** 2)) / (np.linalg.norm(a) * np.linalg.norm(b)))


@dataclass
class TangencyReport:
    max_residual: float
    residuals: list
    skipped: list

    def __float__(self):
        return self.max_residual


def foliation_tangency_numeric(H, omega, points):
    """Sine of the angle between ``d rho`` and ``omega`` at each point, chart component dropped."""
    residuals, skipped = [], []
    for k, p in enumerate(points):
        d, x, grad, _ = _smooth_data(H, p)
        z = d.lift(x)
        om = omega(z)[d.idx]
        if np.linalg.norm(om) <= 1e-12 * max(1.0, np.linalg.norm(z)):
            skipped.append(k)
            continue
        residuals.append(_sine(grad, om))
    return TangencyReport(max(residuals, default=0.0), residuals, skipped)


# umbrella handle ----------------------------------------------------------------------

@dataclass
class HandleReport:
    verdict: bool
    samples: int
    near_slice: int
    min_slice_margin: float
    handle_points: list
    handle_residuals: list
    handle_distances: list
    note: str = "closure exclusion at sampler resolution, not a proof"
    warnings: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict


def umbrella_family_samples(count, seed):
    """``(x, y, s, t)`` on the leaves ``w = c z + c^2`` with real ``c``.

    Half of the samples have ``|y| <= 1e-3`` so the slice ``y = t = 0`` is
    well populated.
    """
    rng = np.random.default_rng(seed)
    x = rng.uniform(-2.0, 2.0, count)
    c = rng.uniform(-2.0, 2.0, count)
    thin = rng.random(count) < 0.5
    y = np.where(thin, rng.uniform(-1e-3, 1e-3, count), rng.uniform(-2.0, 2.0, count))
    return np.column_stack([x, y, c * x + c * c, c * y])


def umbrella_handle_check(count=100000, seed=42, handle_x=(-1, Fraction(-1, 2), 0, Fraction(1, 2), 1)):
    warnings = []
    pts = umbrella_family_samples(count, seed) if count > 0 else np.zeros((0, 4))
    if count <= 0:
        warnings.append("no samples: check is vacuous")
    x, y, s, t = pts.T
    near = (np.abs(y) <= 1e-3) & (np.abs(t) <= 1e-3)
    margins = s[near] + x[near] ** 2 / 4 + 1e-2
    slice_ok = bool(np.all(margins >= 0))
    rho = umbrella().defining
    handle, residuals, distances = [], [], []
    for hx in handle_x:
        hx = Fraction(hx)
        hs = -hx * hx / 4 - 1
        value = rho.eval_diag_exact([1, GaussianRational(hx), GaussianRational(hs)])
        target = np.array([float(hx), 0.0, float(hs), 0.0])
        dist = float(np.min(np.linalg.norm(pts - target, axis=1))) if count > 0 else math.inf
        handle.append((float(hx), float(hs)))
        residuals.append(float(abs(complex(value))))
        distances.append(dist)
    verdict = slice_ok and all(r == 0 for r in residuals) and all(dd >= 0.05 for dd in distances)
    return HandleReport(
        verdict=verdict, samples=int(count), near_slice=int(near.sum()),
        min_slice_margin=float(margins.min()) if near.any() else math.inf,
        handle_points=handle, handle_residuals=residuals, handle_distances=distances,
        warnings=warnings)


# reports and slices -------------------------------------------------------------------

def report_json(check, points, max_residual, verdict, seed, tolerances=None, **extra):
    obj = {
        "check": check,
        "points": int(points),
        "maxResidual": float(max_residual),
        "verdict": bool(verdict),
        "tolerances": dict(TOLERANCES if tolerances is None else tolerances),
        "seed": int(seed),
    }
    obj.update(extra)
    return obj


REAL_NAMES = ("x", "y", "s", "t")


def slice_points(H, fix, value, grid=200, box=2.0, solve=None, chart=None):
    """Zero set of ``H`` on a real 3-slice of the chart ``C^2 = R^4``.

    ``fix`` names the fixed coordinate among ``x, y, s, t`` (real and
    imaginary parts of the two chart coordinates).  Two of the others are
    gridded on ``[-box, box]``; roots in the last one (``solve``) are
    bracketed on a coarse grid and bisected.  Returns an array of rows
    ``(x, y, s, t)``.
    """
    d = _chart_derivs(H, chart)
    if len(d.idx) != 2:
        raise StructuralError("slices are implemented for P^2 charts only")
    if fix not in REAL_NAMES:
        raise StructuralError(f"unknown coordinate {fix!r}")
    free = [v for v in REAL_NAMES if v != fix]
    if solve is None:
        solve = free[-1]
    if solve not in free:
        raise StructuralError(f"cannot solve for {solve!r}")
    g1, g2 = [v for v in free if v != solve]
    axis = np.linspace(-box, box, grid)
    A, B = np.meshgrid(axis, axis, indexing="ij")
    A, B = A.ravel(), B.ravel()
    coarse = np.linspace(-2 * box, 2 * box, 81)

    def rho(u, a, b):
        cols = {fix: np.full_like(u, value), g1: a, g2: b, solve: u}
        z1 = cols["x"] + 1j * cols["y"]
        z2 = cols["s"] + 1j * cols["t"]
        z = d.lift(np.stack([z1, z2], axis=-1))
        return d.value(z, np.conj(z)).real

    rows = []
    vals = []
    for u in coarse:
        vals.append(rho(np.full_like(A, u), A, B))
    vals = np.array(vals)
    for k in range(len(coarse) - 1):
        hit = np.nonzero(np.sign(vals[k]) * np.sign(vals[k + 1]) < 0)[0]
        exact = np.nonzero(vals[k] == 0)[0]
        if len(exact):
            rows.append((A[exact], B[exact], np.full(len(exact), coarse[k])))
        if not len(hit):
            continue
        A_sel, B_sel = A[hit], B[hit]
        lo = np.full(len(hit), coarse[k])
        hi = np.full(len(hit), coarse[k + 1])
        f_lo = vals[k][hit]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = rho(mid, A_sel, B_sel)
            same = np.sign(fm) == np.sign(f_lo)
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        rows.append((A_sel, B_sel, 0.5 * (lo + hi)))
    if not rows:
        return np.zeros((0, 4))
    a = np.concatenate([r[0] for r in rows])
    b = np.concatenate([r[1] for r in rows])
    u = np.concatenate([r[2] for r in rows])
    cols = {fix: np.full_like(u, value), g1: a, g2: b, solve: u}
    out = np.column_stack([cols[v] for v in REAL_NAMES])
    order = np.lexsort(out.T[::-1])
    return out[order]


def slice_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REAL_NAMES)
    for r in rows:
        writer.writerow([format(v, ".17g") for v in r])
    return buf.getvalue()
