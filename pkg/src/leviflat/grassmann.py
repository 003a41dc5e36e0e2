"""Complex hyperplanes inside Levi-flat hypersurfaces.

Containment of a hyperplane is decided exactly by substituting a
parametrization and expanding.  Coefficients may be Gaussian rationals,
elements of a quadratic extension ``Q(i)(sqrt q)`` (:class:`Surd`), or complex
floats (numeric mode, residuals only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import least_squares

from .bipoly import BiForm, GaussianRational, NumericForm, ONE, ZERO, nullspace_exact, rank_exact
from .cones import Hypersurface
from .errors import (DegenerateInputError, DimensionError, ParseError,
                     PreconditionError, StructuralError)
from . import levicheck

__all__ = [
    "Surd", "Hyperplane", "hyperplane_contained", "containment_witness",
    "hyperplane_residual", "ContainmentSystem", "containment_equations",
    "PlanesResult", "planes_through_point", "common_axis",
    "reduce_at_degenerate_point", "Reduction", "dimension_bound_check",
    "classify", "ClassifyReport",
]


class Surd:
    """``a + b*sqrt(q)`` with ``a, b`` Gaussian rational and ``q`` a positive rational."""

    __slots__ = ("a", "b", "q")

    def __init__(self, a, b, q):
        self.a = GaussianRational.coerce(a)
        self.b = GaussianRational.coerce(b)
        self.q = Fraction(q)
        if self.q <= 0:
            raise ValueError("surd radicand must be positive")

    def _coerce(self, other):
        if isinstance(other, Surd):
            if other.q != self.q and other.b and self.b:
                raise ValueError("surds with different radicands")
            return other
        return Surd(other, 0, self.q)

    def __add__(self, other):
        o = self._coerce(other)
        return Surd(self.a + o.a, self.b + o.b, self.q if self.b else o.q)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.q)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        o = self._coerce(other)
        q = self.q if self.b else o.q
        return Surd(self.a * o.a + self.b * o.b * q, self.a * o.b + self.b * o.a, q)

    __rmul__ = __mul__

    def norm(self):
        """``a^2 - q b^2``; nonzero for nonzero elements when ``sqrt q`` is irrational."""
        return self.a * self.a - self.b * self.b * self.q

    def inverse(self):
        nrm = self.norm()
        if not nrm:
            raise ZeroDivisionError("surd is zero or sqrt(q) is rational")
        inv = nrm.inverse()
        return Surd(self.a * inv, -self.b * inv, self.q)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def conjugate(self):
        return Surd(self.a.conjugate(), self.b.conjugate(), self.q)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        try:
            return not (self - other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.q))

    def __complex__(self):
        return complex(self.a) + complex(self.b) * math.sqrt(self.q)

    def __repr__(self):
        return f"Surd({self.a.to_text()}, {self.b.to_text()}, {self.q})"


def _kind(c):
    if isinstance(c, Surd):
        return "surd"
    if isinstance(c, (GaussianRational, int, Fraction)):
        return "exact"
    return "numeric"


class Hyperplane:
    """The locus ``coeffs . z = 0``, scaled so the first nonzero coefficient is 1."""

    def __init__(self, coeffs):
        raw = list(coeffs)
        kinds = {_kind(c) for c in raw}
        if "numeric" in kinds:
            self.mode = "numeric"
            vals = np.array([complex(c) for c in raw])
            big = np.max(np.abs(vals)) if len(vals) else 0.0
            if big == 0:
                raise DegenerateInputError("hyperplane coefficients are all zero")
            lead = next(c for c in vals if abs(c) > 1e-12 * big)
            self.coeffs = tuple(vals / lead)
        else:
            self.mode = "surd" if "surd" in kinds else "exact"
            if self.mode == "surd":
                q = next(c.q for c in raw if isinstance(c, Surd))
                vals = [c if isinstance(c, Surd) else Surd(c, 0, q) for c in raw]
            else:
                vals = [GaussianRational.coerce(c) for c in raw]
            lead = next((c for c in vals if c), None)
            if lead is None:
                raise DegenerateInputError("hyperplane coefficients are all zero")
            inv = lead.inverse()
            self.coeffs = tuple(c * inv for c in vals)
            if self.mode == "surd" and not any(c.b for c in self.coeffs):
                self.mode = "exact"
                self.coeffs = tuple(c.a for c in self.coeffs)

    @property
    def nvars(self):
        return len(self.coeffs)

    @property
    def exact(self):
        return self.mode != "numeric"

    def vector(self):
        return np.array([complex(c) for c in self.coeffs])

    def pivot(self):
        if self.mode == "numeric":
            return next(i for i, c in enumerate(self.coeffs) if c != 0)
        return next(i for i, c in enumerate(self.coeffs) if c)

    def pullback(self, T):
        """The same plane in coordinates ``xi`` with ``z = T xi``."""
        n = self.nvars
        if self.mode == "numeric":
            return Hyperplane(self.vector() @ np.asarray(T, dtype=complex))
        Tg = [[GaussianRational.coerce(x) for x in row] for row in T]
        out = []
        for j in range(n):
            acc = self.coeffs[0] * Tg[0][j]
            for i in range(1, n):
                acc = acc + self.coeffs[i] * Tg[i][j]
            out.append(acc)
        return Hyperplane(out)

    def contains_point(self, z):
        if self.mode == "numeric" or any(_kind(x) == "numeric" for x in z):
            v = self.vector()
            zz = np.asarray([complex(x) for x in z])
            return abs(v @ zz) <= 1e-10 * np.linalg.norm(v) * np.linalg.norm(zz)
        acc = ZERO
        for c, x in zip(self.coeffs, z):
            acc = c * GaussianRational.coerce(x) + acc
        return not acc

    def __eq__(self, other):
        if not isinstance(other, Hyperplane) or other.nvars != self.nvars:
            return NotImplemented
        if self.exact and other.exact:
            return all(not (a - b) for a, b in zip(self.coeffs, other.coeffs))
        return bool(np.allclose(self.vector(), other.vector(), atol=1e-9))

    def __hash__(self):
        return hash(tuple(self.coeffs)) if self.mode == "exact" else hash(self.nvars)

    def to_text(self):
        if self.mode == "exact":
            return "[" + ", ".join(_gr_plain(c) for c in self.coeffs) + "]"
        return "[" + ", ".join(_complex_text(complex(c)) for c in self.coeffs) + "]"

    def to_json_obj(self):
        return {"coeffs": self.to_text(), "exact": self.exact}

    def __repr__(self):
        return f"Hyperplane({self.to_text()})"

    @classmethod
    def parse(cls, text):
        """Parse ``[c0, c1, c2]`` with entries like ``1/2+3/4i``."""
        s = text.strip()
        if not (s.startswith("[") and s.endswith("]")):
            raise ParseError("hyperplane must be written [c0, c1, ...]", 1, 1)
        entries = [e.strip() for e in s[1:-1].split(",")]
        out = []
        col = text.index("[") + 2
        for e in entries:
            try:
                out.append(GaussianRational.parse(e))
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad coefficient {e!r}", 1, col) from None
            col += len(e) + 2
        return cls(out)


def _gr_plain(c):
    if not c.im:
        return str(c.re)
    if not c.re:
        return f"{c.im}i"
    sign = "+" if c.im > 0 else "-"
    return f"{c.re}{sign}{abs(c.im)}i"


def _complex_text(c):
    c = complex(c.real + 0.0, c.imag + 0.0)  # drop negative zeros
    return f"{c.real:.17g}{'+' if c.imag >= 0 else '-'}{abs(c.imag):.17g}i"


# exact containment --------------------------------------------------------------

def _defining(H):
    return H.homogeneous() if isinstance(H, Hypersurface) else H


def _substituted(H, L):
    """The defining form restricted to ``L`` as ``(rational part, sqrt(q) part)``."""
    rho = _defining(H)
    n = rho.nvars
    if L.nvars != n:
        raise StructuralError(f"hyperplane has {L.nvars} coefficients, expected {n}")
    if L.mode == "numeric":
        raise StructuralError("exact containment needs exact coefficients")
    piv = L.pivot()
    surd = L.mode == "surd"
    m = n + 1 if surd else n
    holo = [BiForm.z(m, i) for i in range(n)]
    anti = [BiForm.w(m, i) for i in range(n)]
    zp = BiForm.zero(m)
    wp = BiForm.zero(m)
    for j, c in enumerate(L.coeffs):
        if j == piv:
            continue
        a, b = (c.a, c.b) if surd else (c, ZERO)
        if a:
            zp = zp - BiForm.z(m, j).scale(a)
            wp = wp - BiForm.w(m, j).scale(a.conjugate())
        if b:
            s = BiForm.z(m, n)
            zp = zp - (s * BiForm.z(m, j)).scale(b)
            wp = wp - (s * BiForm.w(m, j)).scale(b.conjugate())
    holo[piv] = zp
    anti[piv] = wp
    out = rho.compose(holo, anti)
    if not surd:
        return out, BiForm.zero(n)
    q = GaussianRational(next(c.q for c in L.coeffs))
    even, odd = BiForm.zero(m), BiForm.zero(m)
    for (h, _), cof in out.collect([n]).items():
        e = h[0]
        term = cof.scale(q ** (e // 2))
        if e % 2:
            odd = odd + term
        else:
            even = even + term
    keep = {i: i for i in range(n)}
    return even.reindex(n, keep), odd.reindex(n, keep)


def containment_witness(H, L):
    """``None`` when ``L`` lies in ``H``; otherwise a nonzero coefficient of the restriction."""
    even, odd = _substituted(H, L)
    for part, label in ((even, "rational"), (odd, "sqrt")):
        if part:
            (h, a), c = part.items()[0]
            return {"part": label, "holo": list(h), "anti": list(a), "coeff": c.to_text()}
    return None


def hyperplane_contained(H, L):
    """Exact test: the defining form vanishes identically on ``L``."""
    if not isinstance(L, Hyperplane):
        L = Hyperplane(L)
    if L.mode == "numeric":
        return hyperplane_residual(H, L) <= 1e-10
    return containment_witness(H, L) is None


def hyperplane_residual(H, L, samples=64, seed=0):
    """Max of ``|rho|`` over random unit points of ``L``, relative to the coefficient scale."""
    rho = _defining(H)
    if not isinstance(L, Hyperplane):
        L = Hyperplane(L)
    v = L.vector()
    _, _, vh = np.linalg.svd(v.reshape(1, -1))
    basis = vh[1:].conj()
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=(samples, len(basis))) + 1j * rng.normal(size=(samples, len(basis)))
    pts = coeffs @ basis
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    vals = NumericForm(rho).diag(pts)
    return float(np.max(np.abs(vals)) / rho.max_abs_coeff())


# containment systems ---------------------------------------------------------------

@dataclass
class ContainmentSystem:
    """Equations in the unknowns ``a_j`` of the plane ``z_pivot = sum_j a_j z_j``.

    Each equation is a BiForm in ``len(labels)`` variables: ``z_k`` stands
    for the unknown ``labels[k]`` and ``w_k`` for its conjugate.
    """

    pivot: int
    unknowns: list
    labels: list
    equations: list
    monomials: list

    def residuals(self, a):
        a = np.asarray(a, dtype=complex)
        return np.array([NumericForm(e)(a, np.conj(a)) for e in self.equations])

    def satisfied(self, a):
        a = [GaussianRational.coerce(x) for x in a]
        return all(not e.eval_diag_exact(a) for e in self.equations)

    def hyperplane(self, a):
        """The plane ``z_pivot - sum a_j z_j = 0`` for a solution ``a``."""
        exact = all(_kind(x) != "numeric" for x in a)
        coeffs = [ZERO if exact else 0j] * (len(self.unknowns) + 1)
        coeffs[self.pivot] = ONE if exact else 1.0
        for j, x in zip(self.unknowns, a):
            coeffs[j] = -GaussianRational.coerce(x) if exact else -complex(x)
        return Hyperplane(coeffs)


def containment_equations(H, pivot):
    rho = _defining(H)
    n = rho.nvars
    if not 0 <= pivot < n:
        raise StructuralError(f"pivot {pivot} out of range")
    others = [j for j in range(n) if j != pivot]
    m = n + len(others)
    holo = [BiForm.z(m, i) for i in range(n)]
    anti = [BiForm.w(m, i) for i in range(n)]
    zp, wp = BiForm.zero(m), BiForm.zero(m)
    for k, j in enumerate(others):
        zp = zp + BiForm.z(m, n + k) * BiForm.z(m, j)
        wp = wp + BiForm.w(m, n + k) * BiForm.w(m, j)
    holo[pivot], anti[pivot] = zp, wp
    sub = rho.compose(holo, anti)
    mapping = {n + k: k for k in range(len(others))}
    eqs, monos = [], []
    for key, cof in sub.collect(range(n)).items():
        eqs.append(cof.reindex(len(others), mapping))
        monos.append(key)
    return ContainmentSystem(pivot, others, [f"a{j}" for j in others], eqs, monos)


# planes through a point (P^2) --------------------------------------------------------

@dataclass
class PlanesResult:
    verdict: str
    planes: list
    residuals: list
    run_length: int = 0

    def to_json_obj(self):
        return {"verdict": self.verdict,
                "planes": [p.to_text() for p in self.planes],
                "residuals": [float(r) for r in self.residuals]}


def _as_exact_point(p):
    out = []
    for x in p:
        if isinstance(x, (GaussianRational, int, Fraction)):
            out.append(GaussianRational.coerce(x))
        elif isinstance(x, str):
            out.append(GaussianRational.parse(x))
        else:
            c = complex(x)
            out.append(GaussianRational(Fraction(c.real), Fraction(c.imag)))
    return out


def _is_exact_input(p):
    return all(isinstance(x, (GaussianRational, int, Fraction, str)) for x in p)


class _PencilEquations:
    """Containment equations for lines through ``p`` with direction ``u e_i + v e_j``."""

    def __init__(self, rho, p):
        n = rho.nvars
        mags = [abs(complex(x)) for x in p]
        self.piv = int(np.argmax(mags))
        self.i, self.j = [k for k in range(n) if k != self.piv]
        m = 4  # sigma, tau, u, v
        sig, tau, u, v = (BiForm.z(m, k) for k in range(4))
        sigw, tauw, uw, vw = (BiForm.w(m, k) for k in range(4))
        holo, anti = [], []
        for k in range(n):
            zk = sig.scale(p[k])
            wk = sigw.scale(p[k].conjugate())
            if k == self.i:
                zk, wk = zk + tau * u, wk + tauw * uw
            elif k == self.j:
                zk, wk = zk + tau * v, wk + tauw * vw
            holo.append(zk)
            anti.append(wk)
        sub = rho.compose(holo, anti)
        self.eqs = [c.reindex(2, {2: 0, 3: 1}) for c in sub.collect([0, 1]).values()]
        self.eqs = [e for e in self.eqs if e]
        self.f = [NumericForm(e) for e in self.eqs]
        self.d = [[NumericForm(e.partial(w, k)) for w in ("holo", "anti") for k in (0, 1)]
                  for e in self.eqs]
        self.scale = max((e.max_abs_coeff() for e in self.eqs), default=1.0)
        self.p = np.array([complex(x) for x in p])

    def values(self, u, v):
        z = np.stack([u, v], axis=-1)
        zc = np.conj(z)
        return np.array([f(z, zc) for f in self.f])

    def objective(self, alpha, phi):
        u, v = np.cos(alpha) + 0j, np.sin(alpha) * np.exp(1j * phi)
        e = self.values(u, v)
        return np.sum(np.abs(e) ** 2, axis=0)

    def derivative(self, alpha, phi, along):
        """Derivative of the objective along ``alpha`` or ``phi``."""
        u, v = np.cos(alpha) + 0j, np.sin(alpha) * np.exp(1j * phi)
        if along == "alpha":
            du = -np.sin(alpha) + 0j
            dv = np.cos(alpha) * np.exp(1j * phi)
        else:
            du = np.zeros_like(u)
            dv = 1j * v
        z = np.stack([u, v], axis=-1)
        zc = np.conj(z)
        total = 0.0
        for f, (fu, fv, fub, fvb) in zip(self.f, self.d):
            e = f(z, zc)
            de = fu(z, zc) * du + fv(z, zc) * dv + fub(z, zc) * np.conj(du) + fvb(z, zc) * np.conj(dv)
            total = total + 2 * (np.conj(e) * de).real
        return total

    def direction(self, alpha, phi):
        return np.array([math.cos(alpha), math.sin(alpha) * np.exp(1j * phi)])

    def residual(self, direction):
        d = np.asarray(direction, dtype=complex)
        d = d / np.linalg.norm(d)
        e = self.values(np.array([d[0]]), np.array([d[1]]))[:, 0]
        return float(np.linalg.norm(e) / self.scale)

    def line(self, direction):
        q = np.zeros(3, dtype=complex)
        q[self.i], q[self.j] = direction
        return np.cross(self.p, q)


def _same_direction(a, b, tol=1e-6):
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return abs(a[0] * b[1] - a[1] * b[0]) <= tol


def _slice_minima(peq, fixed, grid, along, cyclic):
    """Local minima of the objective on slices, refined by bisection on the derivative."""
    if along == "alpha":
        A, P = np.meshgrid(grid, fixed)
    else:
        P, A = np.meshgrid(grid, fixed)
    F = peq.objective(A.ravel(), P.ravel()).reshape(A.shape)
    step = grid[1] - grid[0]
    cands = []  # (slice index, lo, hi) brackets plus endpoint hits
    ends = []
    m = len(grid)
    for s in range(len(fixed)):
        row = F[s]
        for k in range(m):
            if cyclic:
                left, right = row[(k - 1) % m], row[(k + 1) % m]
            else:
                if k == 0 or k == m - 1:
                    nb = row[1] if k == 0 else row[m - 2]
                    if row[k] <= nb:
                        ends.append((s, grid[k]))
                    continue
                left, right = row[k - 1], row[k + 1]
            if row[k] <= left and row[k] <= right:
                cands.append((s, grid[k] - step, grid[k] + step))
    out = [(s, g) for s, g in ends]
    if cands:
        idx = np.array([c[0] for c in cands])
        lo = np.array([c[1] for c in cands])
        hi = np.array([c[2] for c in cands])
        fx = fixed[idx]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            args = (mid, fx) if along == "alpha" else (fx, mid)
            dm = peq.derivative(*args, along)
            neg = dm < 0
            lo = np.where(neg, mid, lo)
            hi = np.where(neg, hi, mid)
        best = 0.5 * (lo + hi)
        if not cyclic:
            best = np.clip(best, grid[0], grid[-1])
        out += list(zip(idx.tolist(), best.tolist()))
    hits = []
    for s, g in out:
        alpha, phi = (g, fixed[s]) if along == "alpha" else (fixed[s], g)
        d = peq.direction(alpha, phi)
        hits.append((s, d, peq.residual(d)))
    return hits


def _longest_run(hits_by_slice, nslices, cyclic):
    best = 0
    best_points = []
    order = list(range(nslices)) * (2 if cyclic else 1)
    run, pts = 0, []
    for s in order:
        fresh = [d for d in hits_by_slice.get(s, []) if not any(_same_direction(d, q) for q in pts)]
        if fresh:
            run += 1
            pts.append(fresh[0])
        else:
            run, pts = 0, []
        if run > best:
            best, best_points = run, list(pts)
        if best >= nslices:
            break
    return best, best_points


def _refine_local(peq, direction):
    """Least-squares polish in the affine coordinate where the direction is largest."""
    d = direction / np.linalg.norm(direction)
    big = int(np.argmax(np.abs(d)))
    w = d[1 - big] / d[big]

    def vec(xy):
        dd = np.empty(2, dtype=complex)
        dd[big] = 1.0
        dd[1 - big] = xy[0] + 1j * xy[1]
        e = peq.values(np.array([dd[0]]), np.array([dd[1]]))[:, 0] / peq.scale
        return np.concatenate([e.real, e.imag])

    x0 = np.array([w.real, w.imag])
    if len(vec(x0)) < 2:
        return d
    sol = least_squares(vec, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    dd = np.empty(2, dtype=complex)
    dd[big] = 1.0
    dd[1 - big] = sol.x[0] + 1j * sol.x[1]
    return dd / np.linalg.norm(dd)


def _snap_plane(H, vec, p_exact):
    """Try a small-denominator rational version of a numeric plane; verify exactly."""
    L = Hyperplane(vec)
    try:
        snapped = [GaussianRational(Fraction(c.real).limit_denominator(1000),
                                    Fraction(c.imag).limit_denominator(1000)) for c in L.coeffs]
        S = Hyperplane(snapped)
    except DegenerateInputError:
        return L
    if np.max(np.abs(S.vector() - L.vector())) > 1e-8:
        return L
    if p_exact is not None and not S.contains_point(p_exact):
        return L
    return S if hyperplane_contained(H, S) else L


def planes_through_point(H, p, resolution=4096, tol=1e-10, curve_run=10):
    """Lines of ``H`` through ``p`` (P^2 only): a finite list or a one-parameter family."""
    if H.n != 2:
        raise DimensionError("planes_through_point is implemented for P^2 only")
    rho = H.homogeneous()
    if len(p) != 3:
        raise StructuralError("point must have 3 homogeneous coordinates")
    exact = _is_exact_input(p)
    pe = _as_exact_point(p)
    if not any(pe):
        raise PreconditionError("the zero vector is not a projective point")
    if exact:
        if rho.eval_diag_exact(pe):
            raise PreconditionError("point is not on the hypersurface")
    else:
        z = np.array([complex(x) for x in p])
        z = z / np.linalg.norm(z)
        if abs(NumericForm(rho).diag(z)) > 1e-9 * rho.max_abs_coeff():
            raise PreconditionError("point is not on the hypersurface")
    peq = _PencilEquations(rho, pe)
    if not peq.eqs:
        raise DegenerateInputError("every line through the point is contained")

    side = max(8, int(round(math.sqrt(resolution))))
    alphas = np.linspace(0.0, math.pi / 2, side)
    phis = np.linspace(0.0, 2 * math.pi, side, endpoint=False)
    hits_a = _slice_minima(peq, phis, alphas, "alpha", cyclic=False)
    interior = alphas[1:-1]
    hits_p = _slice_minima(peq, interior, phis, "phi", cyclic=True)

    def bucket(hits):
        out = {}
        for s, d, r in hits:
            if r <= tol:
                out.setdefault(s, []).append(d)
        return out

    run_a, pts_a = _longest_run(bucket(hits_a), len(phis), cyclic=True)
    run_p, pts_p = _longest_run(bucket(hits_p), len(interior), cyclic=False)
    run, pts = (run_a, pts_a) if run_a >= run_p else (run_p, pts_p)
    p_exact = pe if exact else None
    if run >= curve_run:
        planes = [Hyperplane(peq.line(d)) for d in pts]
        return PlanesResult("curve", planes, [peq.residual(d) for d in pts], run)

    found = []
    for _, d, r in hits_a + hits_p:
        if r > 1e-3:
            continue
        if r > tol:
            d = _refine_local(peq, d)
            r = peq.residual(d)
            if r > tol:
                continue
        if not any(_same_direction(d, q) for q, _ in found):
            found.append((d, r))
    planes = [_snap_plane(H, peq.line(d), p_exact) for d, _ in found]
    return PlanesResult("finite", planes, [r for _, r in found], run)


# axes, reduction, dimension bounds ----------------------------------------------------

def _plane_matrix(planes):
    return [list(p.coeffs) for p in planes]


def common_axis(planes, tol=1e-9):
    """Intersection of the planes when it is a codimension-2 flat, else ``None``.

    Returns a list of spanning vectors of the flat in ``C^{n+1}``.
    """
    planes = list(planes)
    if not planes:
        raise StructuralError("common_axis needs at least one plane")
    if all(p.mode == "exact" for p in planes):
        rows = _plane_matrix(planes)
        if rank_exact(rows) != 2:
            return None
        return nullspace_exact(rows, planes[0].nvars)
    M = np.array([p.vector() / np.linalg.norm(p.vector()) for p in planes])
    _, s, vh = np.linalg.svd(M)
    rank = int(np.sum(s > tol * s[0]))
    if rank != 2:
        return None
    return [v for v in vh[2:].conj()]


def _completion(p):
    """Standard basis vectors completing ``p`` to a basis, in index order."""
    n = len(p)
    cols = []
    for k in range(n):
        e = [ONE if i == k else ZERO for i in range(n)]
        trial = cols + [e]
        if rank_exact(trial + [p]) == len(trial) + 1:
            cols.append(e)
        if len(cols) == n - 1:
            break
    return cols


@dataclass
class Reduction:
    T: list
    transformed: BiForm
    reduced: BiForm | None
    is_cone: bool
    labels: list
    component_residuals: dict = field(default_factory=dict)
    components_vanish: bool | None = None


def reduce_at_degenerate_point(H, p, samples=20, seed=42):
    """Move ``p`` to ``[0, ..., 0, 1]`` and test whether the form drops the last variable."""
    rho = H.homogeneous()
    n = rho.nvars
    pe = [GaussianRational.coerce(x) if not isinstance(x, str) else GaussianRational.parse(x)
          for x in p]
    if len(pe) != n or not any(pe):
        raise StructuralError("point has the wrong length or is zero")
    if rho.eval_diag_exact(pe):
        raise PreconditionError("point is not on the hypersurface")
    cols = _completion(pe) + [pe]
    T = [[cols[c][r] for c in range(n)] for r in range(n)]
    labels = [next(i for i, x in enumerate(col) if x) for col in cols[:-1]]
    g = rho.substitute_linear(T)
    last = n - 1
    if not g.depends_on(last):
        reduced = g.reindex(n - 1, {i: i for i in range(n - 1)})
        return Reduction(T, g, reduced, True, labels)
    chart_form = g.dehomogenize(last)
    comps = chart_form.decompose()
    G = Hypersurface(n - 1, g, None, "reduced")
    residuals = {}
    try:
        pts = levicheck.sample_points(G, last, samples, seed, box=0.5, anchor_scale=0.1)
    except Exception:
        pts = []
    for bd, comp in comps.items():
        num = NumericForm(comp)
        vals = [abs(num.diag(np.insert(pt.coords, last, 1.0))) / pt.scale for pt in pts]
        residuals[bd] = float(max(vals)) if vals else math.nan
    vanish = bool(pts) and all(r <= 1e-8 for r in residuals.values())
    return Reduction(T, g, None, False, labels, residuals, vanish)


@dataclass
class DimensionReport:
    pairs: int
    dimensions_ok: bool
    max_gradient_residual: float
    intersections: list
    skipped_duplicates: int

    @property
    def ok(self):
        return self.dimensions_ok and self.max_gradient_residual <= 1e-10


def _gradient_residual(rho, z):
    """``|d rho(z)| / max|coeff|`` at a unit representative (exact zero when it vanishes)."""
    if all(_kind(x) == "exact" for x in z):
        zg = [GaussianRational.coerce(x) for x in z]
        vals = [rho.partial("holo", i).eval_diag_exact(zg) for i in range(rho.nvars)]
        if not any(vals):
            return 0.0
        norm2 = sum(float(x.norm2()) for x in zg)
        d = rho.total_degree() - 1
        return float(np.linalg.norm([complex(v) for v in vals])) / (
            rho.max_abs_coeff() * norm2 ** (d / 2))
    zz = np.array([complex(x) for x in z])
    zz = zz / np.linalg.norm(zz)
    g = [NumericForm(rho.partial("holo", i)).diag(zz) for i in range(rho.nvars)]
    return float(np.linalg.norm(g) / rho.max_abs_coeff())


def dimension_bound_check(H, planes, samples=3, seed=0):
    rho = H.homogeneous()
    n = rho.nvars - 1
    uniq = []
    for p in planes:
        if not any(p == q for q in uniq):
            uniq.append(p)
    if len(uniq) < 2:
        raise PreconditionError("need at least two distinct planes")
    rng = np.random.default_rng(seed)
    dims_ok = True
    worst = 0.0
    inters = []
    for a, b in combinations(uniq, 2):
        if a.exact and b.exact and a.mode == "exact" and b.mode == "exact":
            rows = [list(a.coeffs), list(b.coeffs)]
            dim = n - rank_exact(rows)
            basis = nullspace_exact(rows, n + 1)
        else:
            M = np.array([a.vector(), b.vector()])
            _, s, vh = np.linalg.svd(M)
            r = int(np.sum(s > 1e-9 * s[0]))
            dim = n - r
            basis = list(vh[r:].conj())
        dims_ok &= dim == n - 2
        if len(basis) == 1:
            pts = [basis[0]]
        else:
            B = np.array([[complex(x) for x in v] for v in basis])
            pts = [rng.normal(size=len(B)) @ B for _ in range(samples)]
        for z in pts:
            worst = max(worst, _gradient_residual(rho, z))
        inters.append(basis[0] if len(basis) == 1 else basis)
    return DimensionReport(len(uniq) * (len(uniq) - 1) // 2, dims_ok, worst,
                           inters, len(planes) - len(uniq))


# classification ------------------------------------------------------------------------

@dataclass
class ClassifyReport:
    label: str
    dimension: int
    axis: list | None
    degenerate_points: list
    planes_sampled: int
    intersections: int
    critical_intersections: int
    verdicts: list
    note: str = "critical-locus heuristic"

    def text(self):
        if self.label == "2n-4":
            ax = "[" + ",".join(_fmt_coord(x) for x in self.axis) + "]"
            return f"dim H_s = 2n-4; degenerate axis {ax}"
        if self.degenerate_points:
            return f"dim H_s = 2n-2; {len(self.degenerate_points)} degenerate points found"
        return "dim H_s = 2n-2; no degenerate points found"

    def to_json_obj(self):
        return {
            "label": self.label, "dimension": self.dimension,
            "axis": None if self.axis is None else [_fmt_coord(x) for x in self.axis],
            "degeneratePoints": [[_fmt_coord(x) for x in p] for p in self.degenerate_points],
            "planesSampled": self.planes_sampled, "intersections": self.intersections,
            "criticalIntersections": self.critical_intersections,
            "verdicts": self.verdicts, "note": self.note, "summary": self.text(),
        }


def _fmt_coord(x):
    if isinstance(x, GaussianRational):
        return _gr_plain(x)
    c = complex(x)
    if abs(c.imag) < 1e-12:
        return f"{c.real:.17g}"
    return _complex_text(c)


def _snap_point(z):
    """Normalize so the largest coordinate is 1 and snap to small rationals when exact."""
    z = np.asarray(z, dtype=complex)
    z = z / z[np.argmax(np.abs(z))]
    snapped = [GaussianRational(Fraction(c.real).limit_denominator(1000),
                                Fraction(c.imag).limit_denominator(1000)) for c in z]
    if np.max(np.abs(np.array([complex(s) for s in snapped]) - z)) < 1e-9:
        return snapped
    return list(z)


def classify(H, samples=12, seed=42, probe_points=3, resolution=1024):
    """Label ``dim H_s`` as ``2n-4`` (common degenerate axis) or ``2n-2`` (P^2 only)."""
    if H.n != 2:
        raise DimensionError("classify is implemented for P^2 only")
    rho = H.homogeneous()
    P = H.projectivized()
    pts = levicheck.sample_points(P, None, samples, seed)
    planes = []
    for pt in pts:
        z = pt.homogeneous()
        g = np.array([NumericForm(rho.partial("holo", i)).diag(z) for i in range(3)])
        L = Hyperplane(g)
        if hyperplane_residual(P, L) <= 1e-8:
            planes.append(L)
    uniq = []
    for L in planes:
        if not any(L == q for q in uniq):
            uniq.append(L)
    inters = []
    for a, b in combinations(uniq, 2):
        c = np.cross(a.vector(), b.vector())
        if np.linalg.norm(c) > 1e-9:
            inters.append(c / np.linalg.norm(c))
    critical = [z for z in inters if _gradient_residual(rho, z) <= 1e-8]
    distinct = []
    for z in critical:
        if not any(abs(abs(np.vdot(z, y)) - 1) < 1e-9 for y in distinct):
            distinct.append(z)
    axis = common_axis(uniq) if len(uniq) >= 2 else None
    verdicts = []
    degenerate = []
    probes = [np.asarray([complex(x) for x in axis[0]])] if axis is not None else []
    probes += distinct[:probe_points]
    for z in probes:
        pt = _snap_point(z)
        try:
            res = planes_through_point(P, pt, resolution=resolution)
        except PreconditionError:
            continue
        verdicts.append(res.verdict)
        if res.verdict == "curve":
            degenerate.append(pt)
    label = "2n-2"
    axis_out = None
    if axis is not None and degenerate:
        ax = _snap_point(np.asarray([complex(x) for x in axis[0]]))
        on_axis = all(Hyperplane.contains_point(L, ax) for L in uniq)
        if on_axis and all(_same_projective(ax, d) for d in degenerate):
            label = "2n-4"
            axis_out = ax
    dim = 2 * H.n - 4 if label == "2n-4" else 2 * H.n - 2
    return ClassifyReport(label, dim, axis_out, degenerate, len(uniq), len(inters),
                          len(critical), verdicts)


def _same_projective(a, b):
    a = np.array([complex(x) for x in a])
    b = np.array([complex(x) for x in b])
    return abs(abs(np.vdot(a, b)) - np.linalg.norm(a) * np.linalg.norm(b)) < 1e-9
