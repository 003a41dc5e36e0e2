"""Constructors of Levi-flat hypersurfaces from lower-dimensional data.

* :func:`pencil_cone` -- a form in ``z1, z2`` only, viewed in P^n.
* :func:`grassmann_cone_from_plane_curve` -- the algebraic hull in P^2 of the
  lines ``z0 = x z1 + y z2`` with ``p(x, y) = 0``.
* :func:`umbrella` -- the Levi-flat Whitney umbrella ``s y^2 - t x y - t^2``.
* :func:`analytic_cone_sampler` -- points on the swept set of a parametric
  (possibly transcendental) closed curve.
"""
from __future__ import annotations

import ast
import csv
import io
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bipoly import I, BiForm, GaussianRational, parse_form
from .errors import (DegenerateInputError, DegreeError, DimensionError,
                     ParseError, StructuralError, SymmetryError)

__all__ = [
    "Hypersurface", "ImplicitCurve", "ParametricCurve", "parse_curve",
    "read_curve_file", "delta_form", "grassmann_cone_from_plane_curve",
    "pencil_cone", "umbrella", "umbrella_realified", "analytic_cone_sampler",
    "implicit_cone_sampler", "sampler_csv",
]


@dataclass(frozen=True)
class Hypersurface:
    """Zero set of a Hermitian form, either in P^n or in one affine chart.

    ``chart is None`` means projective: the form must be ``(d, d)``
    bihomogeneous.  Otherwise the form lives in the affine chart
    ``z_chart = 1`` and must not involve that variable.
    """

    n: int
    defining: BiForm
    chart: int | None = None
    provenance: str = ""

    def __post_init__(self):
        f = self.defining
        if f.nvars != self.n + 1:
            raise StructuralError(f"defining form has {f.nvars} variables, expected {self.n + 1}")
        if not f:
            raise DegenerateInputError("defining form is identically zero")
        if not f.is_hermitian():
            raise SymmetryError("defining form is not Hermitian")
        if self.chart is None:
            bd = f.bidegree()
            if bd is None or bd[0] != bd[1] or bd[0] < 1:
                raise DegreeError("projective defining form must be (d,d)-bihomogeneous, d >= 1")
        else:
            if not 0 <= self.chart <= self.n:
                raise StructuralError(f"chart index {self.chart} out of range")
            if f.depends_on(self.chart):
                raise StructuralError(f"affine form must not involve z{self.chart}")

    @property
    def is_projective(self):
        return self.chart is None

    @property
    def degree(self):
        """``d`` of the homogeneous ``(d, d)`` form."""
        return self.homogeneous().bidegree()[0]

    def homogeneous(self):
        """The ``(d, d)`` form of the projective closure."""
        if self.chart is None:
            return self.defining
        f = self.defining
        d = max(f.max_holo_degree(), f.max_anti_degree(), 1)
        return f.homogenize(self.chart, (d, d))

    def projectivized(self):
        if self.chart is None:
            return self
        return Hypersurface(self.n, self.homogeneous(), None, self.provenance + "+closure")

    def chart_form(self, chart=None):
        """Defining form with ``z_chart = w_chart = 1``."""
        if chart is None:
            chart = 0 if self.chart is None else self.chart
        if self.chart is not None and chart == self.chart:
            return self.defining
        return self.homogeneous().dehomogenize(chart)

    def default_chart(self):
        return 0 if self.chart is None else self.chart


# plane curves -------------------------------------------------------------------

@dataclass(frozen=True)
class ImplicitCurve:
    """Real plane curve ``p(x, y) = 0``; ``coeffs`` maps ``(i, j)`` to the x^i y^j coefficient."""

    coeffs: dict = field(hash=False)
    text: str = ""

    def __post_init__(self):
        clean = {k: Fraction(v) for k, v in self.coeffs.items() if v}
        object.__setattr__(self, "coeffs", clean)
        if not clean:
            raise DegenerateInputError("plane curve polynomial is identically zero")

    @property
    def degree(self):
        return max(i + j for i, j in self.coeffs)

    def __call__(self, x, y):
        return sum(c * x ** i * y ** j for (i, j), c in self.coeffs.items())

    def y_polynomial(self, x):
        """Coefficients (highest first) of ``y -> p(x, y)`` for numeric ``x``."""
        dy = max(j for _, j in self.coeffs)
        out = [0.0] * (dy + 1)
        for (i, j), c in self.coeffs.items():
            out[dy - j] += float(c) * x ** i
        return out

    def x_polynomial(self, y):
        dx = max(i for i, _ in self.coeffs)
        out = [0.0] * (dx + 1)
        for (i, j), c in self.coeffs.items():
            out[dx - i] += float(c) * y ** j
        return out


_ALLOWED_FUNCS = {"cos": np.cos, "sin": np.sin, "exp": np.exp}


@dataclass(frozen=True)
class ParametricCurve:
    """Closed curve ``t -> (a(t), b(t))``, 2*pi periodic.

    Components are expressions in ``t`` built from rational constants,
    ``+ - * /``, integer powers, ``cos``, ``sin`` and ``exp``.
    """

    a_text: str
    b_text: str
    grid: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "_a", _compile_expr(self.a_text, "a(t)"))
        object.__setattr__(self, "_b", _compile_expr(self.b_text, "b(t)"))
        two_pi = 2 * math.pi
        for name, fn in (("a", self._a), ("b", self._b)):
            if abs(fn(np.array([0.0]))[0] - fn(np.array([two_pi]))[0]) > 1e-9:
                raise DegenerateInputError(f"{name}(t) is not 2*pi-periodic")
        t = np.linspace(0.0, two_pi, self.grid, endpoint=False)
        da, db = self.derivative(t)
        if np.min(np.hypot(da, db)) <= 1e-9:
            raise DegenerateInputError("a'(t) and b'(t) vanish simultaneously on the grid")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self._a(t).real, self._b(t).real

    def derivative(self, t):
        """Complex-step derivative, exact to rounding for analytic components."""
        h = 1e-30
        tc = np.asarray(t, dtype=float) + 1j * h
        return self._a(tc).imag / h, self._b(tc).imag / h


def _expr_error(msg, node, label):
    col = getattr(node, "col_offset", 0) + 1
    return ParseError(f"{label}: {msg}", 1, col)


_IMPLICIT_MUL = re.compile(r"(\d)\s*(?=[t(]|cos|sin|exp|pi)")


def _compile_expr(text, label):
    text = _IMPLICIT_MUL.sub(r"\1*", text.strip())
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"{label}: {exc.msg}", 1, exc.offset or 1) from None

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            v = float(Fraction(str(node.value)))
            return lambda t: v + 0 * t
        if isinstance(node, ast.Name):
            if node.id == "t":
                return lambda t: t
            if node.id == "pi":
                return lambda t: math.pi + 0 * t
            raise _expr_error(f"unknown name {node.id!r}", node, label)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            return (lambda t: -inner(t)) if isinstance(node.op, ast.USub) else inner
        if isinstance(node, ast.BinOp):
            left, right = build(node.left), build(node.right)
            if isinstance(node.op, ast.Add):
                return lambda t: left(t) + right(t)
            if isinstance(node.op, ast.Sub):
                return lambda t: left(t) - right(t)
            if isinstance(node.op, ast.Mult):
                return lambda t: left(t) * right(t)
            if isinstance(node.op, ast.Div):
                return lambda t: left(t) / right(t)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise _expr_error("exponent must be an integer literal", node, label)
                e = node.right.value
                return lambda t: left(t) ** e
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            fn = _ALLOWED_FUNCS.get(node.func.id)
            if fn is None or len(node.args) != 1 or node.keywords:
                raise _expr_error(f"unsupported function {node.func.id!r}", node, label)
            arg = build(node.args[0])
            return lambda t: fn(arg(t))
        raise _expr_error("unsupported syntax", node, label)

    fn = build(tree)
    return lambda t: np.asarray(fn(np.asarray(t)), dtype=complex) + 0 * np.asarray(t)


def _poly_add(p, q, sign=1):
    out = dict(p)
    for k, v in q.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def _poly_mul(p, q):
    out = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _parse_bivariate(text, line=1, col0=0):
    stripped = text.lstrip()
    col0 += len(text) - len(stripped)
    text = stripped
    source = text.replace("^", "**")
    # source offset -> original offset (each caret became two characters)
    index = [i for i, ch in enumerate(text) for _ in range(2 if ch == "^" else 1)] + [len(text)]

    def original(offset):
        return index[min(max(offset, 0), len(index) - 1)]

    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"polynomial: {exc.msg}", line,
                         col0 + original((exc.offset or 1) - 1) + 1) from None

    def err(msg, node):
        return ParseError(f"polynomial: {msg}", line,
                          col0 + original(getattr(node, "col_offset", 0)) + 1)

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            v = Fraction(str(node.value))
            return {(0, 0): v} if v else {}
        if isinstance(node, ast.Name):
            if node.id == "x":
                return {(1, 0): Fraction(1)}
            if node.id == "y":
                return {(0, 1): Fraction(1)}
            raise err(f"unknown variable {node.id!r}", node)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            return {k: -v for k, v in inner.items()} if isinstance(node.op, ast.USub) else inner
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)
                        and node.right.value >= 0):
                    raise err("exponent must be a nonnegative integer", node)
                base = build(node.left)
                out = {(0, 0): Fraction(1)}
                for _ in range(node.right.value):
                    out = _poly_mul(out, base)
                return out
            left, right = build(node.left), build(node.right)
            if isinstance(node.op, ast.Add):
                return _poly_add(left, right)
            if isinstance(node.op, ast.Sub):
                return _poly_add(left, right, -1)
            if isinstance(node.op, ast.Mult):
                return _poly_mul(left, right)
            if isinstance(node.op, ast.Div):
                if set(right) - {(0, 0)} or not right:
                    raise err("division only by nonzero constants", node)
                c = right[(0, 0)]
                return {k: v / c for k, v in left.items()}
        raise err("unsupported syntax", node)

    return build(tree)


def parse_curve(text):
    """Parse the curve file format.

    ``implicit: <polynomial in x, y>``, ``parametric: a(t) = ...; b(t) = ...``
    or ``form: <bi-form text>`` (a pencil curve in P^1 given in ``z1, z2``).
    Blank lines and ``#`` comments are ignored.
    """
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError("expected 'implicit:', 'parametric:' or 'form:'", lineno, 1)
        kind = head.strip()
        col0 = len(head) + 1
        if kind == "implicit":
            coeffs = _parse_bivariate(body, lineno, col0)
            if not coeffs:
                raise DegenerateInputError("plane curve polynomial is identically zero")
            return ImplicitCurve(coeffs, body.strip())
        if kind == "parametric":
            parts = {}
            for chunk in body.split(";"):
                if not chunk.strip():
                    continue
                lhs, eq, rhs = chunk.partition("=")
                if not eq:
                    raise ParseError("expected 'a(t) = ...'", lineno, col0 + 1)
                parts[lhs.strip().replace(" ", "")] = rhs.strip()
            if set(parts) != {"a(t)", "b(t)"}:
                raise ParseError("parametric curve needs a(t) and b(t)", lineno, col0 + 1)
            return ParametricCurve(parts["a(t)"], parts["b(t)"])
        if kind == "form":
            try:
                return parse_form(body)
            except ParseError as exc:
                raise ParseError(str(exc).rsplit(" (line", 1)[0], lineno,
                                 col0 + exc.column) from None
        raise ParseError(f"unknown curve kind {kind!r}", lineno, 1)
    raise ParseError("empty curve file", 1, 1)


def read_curve_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_curve(fh.read())


# constructors -----------------------------------------------------------------

def _vars(nvars):
    return ([BiForm.z(nvars, i) for i in range(nvars)],
            [BiForm.w(nvars, i) for i in range(nvars)])


def delta_form(n=2):
    """``z1 w2 - w1 z2``: anti-Hermitian, vanishes where z1/z2 is real."""
    if n < 2:
        raise DimensionError("delta_form needs n >= 2")
    Z, W = _vars(n + 1)
    return Z[1] * W[2] - W[1] * Z[2]


def cramer_forms():
    """Numerators and denominator of the solve of ``z0 = x z1 + y z2`` and its conjugate."""
    Z, W = _vars(3)
    nx = Z[0] * W[2] - W[0] * Z[2]
    ny = Z[1] * W[0] - W[1] * Z[0]
    den = Z[1] * W[2] - W[1] * Z[2]
    return nx, ny, den


def grassmann_cone_from_plane_curve(curve, n=2):
    """Clear denominators in ``p(Nx/D, Ny/D)``; the result is ``(d, d)`` and Hermitian.

    For odd ``d`` the cleared form is anti-Hermitian (``Nx, Ny, D`` all are),
    so it is multiplied by ``i``.
    """
    if n != 2:
        raise DimensionError("the Grassmannian cone construction is implemented for P^2 only")
    if not isinstance(curve, ImplicitCurve):
        raise StructuralError("grassmann cone needs an implicit curve")
    d = curve.degree
    if d < 1:
        raise DegenerateInputError("plane curve must have total degree >= 1")
    nx, ny, den = cramer_forms()
    pw = {}

    def power(name, base, e):
        key = (name, e)
        if key not in pw:
            pw[key] = base ** e
        return pw[key]

    rho = BiForm.zero(3)
    for (i, j), c in curve.coeffs.items():
        term = power("x", nx, i) * power("y", ny, j) * power("d", den, d - i - j)
        rho = rho + term.scale(GaussianRational(c))
    if d % 2:
        rho = rho.scale(I)
    return Hypersurface(2, rho, None, f"grassmann:{curve.text or 'implicit'}")


def pencil_cone(q, n=2):
    """Embed a ``(d, d)`` Hermitian form in ``z1, z2`` as a hypersurface in P^n."""
    if n < 2:
        raise DimensionError("pencil cone needs n >= 2")
    bad = q.support() - {1, 2}
    if bad:
        raise StructuralError(
            f"pencil form must involve z1, z2 only; found z{min(bad)}")
    if not q.is_hermitian():
        raise SymmetryError("pencil form is not Hermitian")
    bd = q.bidegree()
    if bd is None or bd[0] != bd[1] or bd[0] < 1:
        raise DegreeError("pencil form must be (d,d)-bihomogeneous with d >= 1")
    embedded = q.reindex(n + 1, {1: 1, 2: 2})
    return Hypersurface(n, embedded, None, "pencil")


def umbrella_realified():
    """The real coordinates ``x, y, s, t`` of ``z = z1, w = z2`` as Hermitian forms."""
    Z, W = _vars(3)
    half = GaussianRational(Fraction(1, 2))
    neg_half_i = GaussianRational(0, Fraction(-1, 2))
    x = (Z[1] + W[1]).scale(half)
    y = (Z[1] - W[1]).scale(neg_half_i)
    s = (Z[2] + W[2]).scale(half)
    t = (Z[2] - W[2]).scale(neg_half_i)
    return x, y, s, t


def umbrella(n=2):
    """Affine umbrella ``s y^2 - t x y - t^2`` in chart ``z0 = 1`` with ``z = z1``, ``w = z2``."""
    if n != 2:
        raise DimensionError("the umbrella is defined in P^2 only")
    x, y, s, t = umbrella_realified()
    rho = s * y * y - t * x * y - t * t
    return Hypersurface(2, rho, 0, "umbrella")


# samplers ---------------------------------------------------------------------------

def analytic_cone_sampler(curve, seed, count, return_params=False):
    """Points ``(z1 a(t) + z2 b(t), z1, z2)`` of the swept set of ``curve``.

    ``t`` is uniform on ``[0, 2 pi)``; ``z1, z2`` have uniform phases and
    log-uniform moduli in ``[1/2, 2]``.  Deterministic in ``(seed, count)``.
    """
    if count <= 0:
        pts = np.zeros((0, 3), dtype=complex)
        return (pts, np.zeros(0)) if return_params else pts
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 2 * math.pi, count)
    phases = rng.uniform(0.0, 2 * math.pi, (count, 2))
    moduli = np.exp(rng.uniform(math.log(0.5), math.log(2.0), (count, 2)))
    z12 = moduli * np.exp(1j * phases)
    a, b = curve(t)
    pts = np.column_stack([z12[:, 0] * a + z12[:, 1] * b, z12[:, 0], z12[:, 1]])
    return (pts, t) if return_params else pts


def implicit_cone_sampler(curve, seed, count, box=(-4.0, 4.0)):
    """Points on lines ``z0 = x z1 + y z2`` for random real points of ``p = 0`` in ``box``."""
    rng = np.random.default_rng(seed)
    lo, hi = box
    solve_y = any(j for _, j in curve.coeffs)
    pts = []
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > 1000 * max(count, 1):
            raise DegenerateInputError("could not find real points of the curve in the box")
        u = rng.uniform(lo, hi)
        poly = curve.y_polynomial(u) if solve_y else curve.x_polynomial(u)
        poly = np.trim_zeros(np.asarray(poly), "f")
        if len(poly) < 2:
            continue
        roots = np.roots(poly)
        real = roots[(np.abs(roots.imag) < 1e-12) & (roots.real >= lo) & (roots.real <= hi)].real
        if not len(real):
            continue
        v = real[rng.integers(len(real))]
        x, y = (u, v) if solve_y else (v, u)
        phase = rng.uniform(0.0, 2 * math.pi, 2)
        mod = np.exp(rng.uniform(math.log(0.5), math.log(2.0), 2))
        z1, z2 = mod * np.exp(1j * phase)
        pts.append((x * z1 + y * z2, z1, z2))
    return np.array(pts, dtype=complex).reshape(-1, 3)


def sampler_csv(points, params):
    """CSV text with columns re(z0),im(z0),re(z1),im(z1),re(z2),im(z2),t."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re(z0)", "im(z0)", "re(z1)", "im(z1)", "re(z2)", "im(z2)", "t"])
    for p, t in zip(points, params):
        row = []
        for c in p:
            row += [format(c.real, ".17g"), format(c.imag, ".17g")]
        writer.writerow(row + [format(t, ".17g")])
    return buf.getvalue()
