"""Exact polynomials in z_0..z_n and formal conjugates w_0..w_n.

Coefficients are Gaussian rationals.  The conjugate variables are independent
formal symbols; a form is real-valued on the diagonal ``w = conj(z)`` exactly
when it is Hermitian, i.e. fixed by :meth:`BiForm.conj_transpose`.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from itertools import product
from numbers import Rational

import numpy as np

from .errors import DegreeError, ParseError, StructuralError

__all__ = [
    "GaussianRational", "BiForm", "NumericForm", "I", "ONE", "ZERO",
    "conj_transpose", "decompose", "partial", "substitute_linear",
    "dehomogenize", "homogenize", "evaluate", "eval_diag", "resultant",
    "parse_form", "format_form", "nullspace_exact", "rank_exact",
]


class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Rational)):
            return cls(Fraction(x))
        if isinstance(x, float):
            return cls(Fraction(x))
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, str):
            return cls.parse(x)
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")

    _TEXT = re.compile(
        r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?\s*(?:(?P<sign>[+-])\s*(?P<im>\d+(?:/\d+)?)?\s*i)?\s*$"
    )

    @classmethod
    def parse(cls, text):
        """Parse ``p/q``, ``p/q+r/si``, ``-r/si`` or ``i``-style text."""
        s = text.strip()
        m = cls._TEXT.match(s)
        if m and (m.group("re") or m.group("sign")):
            re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
            im_part = Fraction(0)
            if m.group("sign"):
                im_part = Fraction(m.group("im")) if m.group("im") else Fraction(1)
                if m.group("sign") == "-":
                    im_part = -im_part
            return cls(re_part, im_part)
        m = re.match(r"^\s*([+-]?\d+(?:/\d+)?)\s*i\s*$", s)
        if m:
            return cls(0, Fraction(m.group(1)))
        raise ValueError(f"not a Gaussian rational: {text!r}")

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            if not d:
                return GaussianRational(a * c, 0)
            return GaussianRational(a * c, a * d)
        if not d:
            return GaussianRational(a * c, b * c)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def norm2(self):
        return self.re * self.re + self.im * self.im

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def inverse(self):
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        if isinstance(other, float):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self):
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{abs(self.im)}i"

    def to_text(self):
        """Coefficient text of the form grammar, e.g. ``(1/2-3i)``."""
        if not self.im:
            return f"({self.re})"
        sign = "-" if self.im < 0 else "+"
        return f"({self.re}{sign}{abs(self.im)}i)"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def _order_key(key):
    holo, anti = key
    return (-(sum(holo) + sum(anti)), tuple(-e for e in holo), tuple(-e for e in anti))


def _add_exps(a, b):
    return tuple(x + y for x, y in zip(a, b))


class BiForm:
    """Polynomial in ``z_0..z_{nvars-1}`` and ``w_0..w_{nvars-1}``.

    Terms map an exponent pair ``(holo, anti)`` to a nonzero
    :class:`GaussianRational`.  Instances are immutable; every operation
    returns a new form.  Iteration order is graded-lexicographic, highest
    degree first.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars, terms=()):
        if nvars < 0:
            raise StructuralError("nvars must be nonnegative")
        self.nvars = nvars
        self._hash = None
        items = terms.items() if isinstance(terms, dict) else terms
        acc = {}
        for (holo, anti), c in items:
            holo, anti = tuple(holo), tuple(anti)
            if len(holo) != nvars or len(anti) != nvars:
                raise StructuralError(
                    f"exponent vectors must have length {nvars}, got {len(holo)}/{len(anti)}")
            if any(e < 0 for e in holo) or any(e < 0 for e in anti):
                raise StructuralError("exponents must be nonnegative")
            key = (holo, anti)
            c = GaussianRational.coerce(c)
            acc[key] = acc[key] + c if key in acc else c
        self._terms = {k: v for k, v in acc.items() if v}

    @classmethod
    def _raw(cls, nvars, terms):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def zero(cls, nvars):
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars, c=1):
        c = GaussianRational.coerce(c)
        zero = (0,) * nvars
        return cls._raw(nvars, {(zero, zero): c} if c else {})

    @classmethod
    def monomial(cls, holo, anti, c=1):
        holo, anti = tuple(holo), tuple(anti)
        if len(holo) != len(anti):
            raise StructuralError("holo and anti exponent vectors differ in length")
        return cls(len(holo), {(holo, anti): c})

    @classmethod
    def z(cls, nvars, i):
        e = tuple(int(j == i) for j in range(nvars))
        return cls._raw(nvars, {(e, (0,) * nvars): ONE})

    @classmethod
    def w(cls, nvars, i):
        e = tuple(int(j == i) for j in range(nvars))
        return cls._raw(nvars, {((0,) * nvars, e): ONE})

    # container protocol -----------------------------------------------
    def items(self):
        """Terms as ``((holo, anti), coeff)`` in canonical order."""
        return sorted(self._terms.items(), key=lambda kv: _order_key(kv[0]))

    @property
    def terms(self):
        return dict(self.items())

    def coefficient(self, holo, anti):
        return self._terms.get((tuple(holo), tuple(anti)), ZERO)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, BiForm):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Rational, GaussianRational)):
            return self == BiForm.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"BiForm({self.nvars}, {format_form(self)!r})"

    def __str__(self):
        return format_form(self)

    # ring operations --------------------------------------------------
    def _check(self, other):
        if self.nvars != other.nvars:
            raise StructuralError(
                f"variable-count mismatch: {self.nvars} vs {other.nvars}")

    def _lift(self, other):
        if isinstance(other, BiForm):
            self._check(other)
            return other
        try:
            return BiForm.constant(self.nvars, other)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            if k in out:
                s = out[k] + c
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = c
        return BiForm._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return BiForm._raw(self.nvars, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, BiForm):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        out = {}
        for (h1, a1), c1 in self._terms.items():
            for (h2, a2), c2 in other._terms.items():
                k = (_add_exps(h1, h2), _add_exps(a1, a2))
                p = c1 * c2
                if k in out:
                    s = out[k] + p
                    if s:
                        out[k] = s
                    else:
                        del out[k]
                else:
                    out[k] = p
        return BiForm._raw(self.nvars, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c):
        c = GaussianRational.coerce(c)
        if not c:
            return BiForm.zero(self.nvars)
        return BiForm._raw(self.nvars, {k: v * c for k, v in self._terms.items()})

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        result = BiForm.constant(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # symmetry ---------------------------------------------------------
    def conj_transpose(self):
        """``c z^a w^b  ->  conj(c) z^b w^a``."""
        return BiForm._raw(
            self.nvars, {(a, h): c.conjugate() for (h, a), c in self._terms.items()})

    def is_hermitian(self):
        for (h, a), c in self._terms.items():
            if self._terms.get((a, h), ZERO) != c.conjugate():
                return False
        return True

    def is_anti_hermitian(self):
        for (h, a), c in self._terms.items():
            if self._terms.get((a, h), ZERO) != -c.conjugate():
                return False
        return True

    # degrees ------------------------------------------------------------
    def bidegrees(self):
        return {(sum(h), sum(a)) for h, a in self._terms}

    def bidegree(self):
        """``(j, k)`` if the form is bihomogeneous, else ``None``."""
        degs = self.bidegrees()
        if len(degs) == 1:
            return next(iter(degs))
        return None

    def is_bihomogeneous(self, j=None, k=None):
        bd = self.bidegree()
        if bd is None:
            return False
        return (j is None or bd[0] == j) and (k is None or bd[1] == k)

    def total_degree(self):
        return max((sum(h) + sum(a) for h, a in self._terms), default=0)

    def max_holo_degree(self):
        return max((sum(h) for h, _ in self._terms), default=0)

    def max_anti_degree(self):
        return max((sum(a) for _, a in self._terms), default=0)

    def support(self):
        """Indices of variables appearing (in z or in w)."""
        used = set()
        for h, a in self._terms:
            used.update(i for i in range(self.nvars) if h[i] or a[i])
        return used

    def depends_on(self, i):
        return any(h[i] or a[i] for h, a in self._terms)

    def max_abs_coeff(self):
        return max((abs(complex(c)) for c in self._terms.values()), default=0.0)

    # structure ------------------------------------------------------------
    def decompose(self):
        """Split into bihomogeneous components keyed by ``(j, k)``."""
        parts = {}
        for (h, a), c in self._terms.items():
            parts.setdefault((sum(h), sum(a)), {})[(h, a)] = c
        return {bd: BiForm._raw(self.nvars, t) for bd, t in sorted(parts.items())}

    def partial(self, which, index):
        if not 0 <= index < self.nvars:
            raise StructuralError(f"variable index {index} out of range")
        if which not in ("holo", "anti"):
            raise ValueError("which must be 'holo' or 'anti'")
        out = {}
        for (h, a), c in self._terms.items():
            exps = h if which == "holo" else a
            e = exps[index]
            if not e:
                continue
            new = exps[:index] + (e - 1,) + exps[index + 1:]
            key = (new, a) if which == "holo" else (h, new)
            out[key] = c * e
        return BiForm._raw(self.nvars, out)

    def collect(self, indices):
        """Group terms by their exponents in the variables ``indices``.

        Returns a dict mapping ``(holo_sub, anti_sub)`` (exponents restricted to
        ``indices``) to the cofactor, a form in the same variables with those
        exponents zeroed.
        """
        idx = list(indices)
        out = {}
        for (h, a), c in self._terms.items():
            key = (tuple(h[i] for i in idx), tuple(a[i] for i in idx))
            hh, aa = list(h), list(a)
            for i in idx:
                hh[i] = aa[i] = 0
            out.setdefault(key, {})[(tuple(hh), tuple(aa))] = c
        return {k: BiForm._raw(self.nvars, v) for k, v in sorted(out.items(), reverse=True)}

    def reindex(self, nvars, mapping):
        """Move variable ``i`` to ``mapping[i]`` in a form with ``nvars`` variables.

        Variables absent from ``mapping`` must not occur in the form.
        """
        out = {}
        for (h, a), c in self._terms.items():
            hh, aa = [0] * nvars, [0] * nvars
            for i in range(self.nvars):
                if h[i] or a[i]:
                    if i not in mapping:
                        raise StructuralError(f"variable {i} occurs but has no image")
                    hh[mapping[i]] += h[i]
                    aa[mapping[i]] += a[i]
            key = (tuple(hh), tuple(aa))
            out[key] = out[key] + c if key in out else c
        return BiForm._raw(nvars, {k: v for k, v in out.items() if v})

    # substitution -----------------------------------------------------------
    def compose(self, holo_images, anti_images):
        """Substitute ``z_i -> holo_images[i]`` and ``w_i -> anti_images[i]``.

        Images are BiForms sharing one variable count, which becomes the
        variable count of the result.  ``None`` leaves a variable in place
        (only allowed when the target has the same variable count).
        """
        if len(holo_images) != self.nvars or len(anti_images) != self.nvars:
            raise StructuralError("need one image per variable")
        target = next((f.nvars for f in list(holo_images) + list(anti_images)
                       if f is not None), self.nvars)
        holo = [BiForm.z(target, i) if f is None else f for i, f in enumerate(holo_images)]
        anti = [BiForm.w(target, i) if f is None else f for i, f in enumerate(anti_images)]
        for f in holo + anti:
            if f.nvars != target:
                raise StructuralError("images have inconsistent variable counts")
        cache = {}

        def power(kind, i, e):
            key = (kind, i, e)
            if key not in cache:
                base = holo[i] if kind == 0 else anti[i]
                cache[key] = base if e == 1 else power(kind, i, e - 1) * base
            return cache[key]

        result = BiForm.zero(target)
        for (h, a), c in self._terms.items():
            term = BiForm.constant(target, c)
            for i, e in enumerate(h):
                if e:
                    term = term * power(0, i, e)
            for i, e in enumerate(a):
                if e:
                    term = term * power(1, i, e)
            result = result + term
        return result

    def substitute_linear(self, T):
        """Replace ``z`` by ``T z`` and ``w`` by ``conj(T) w``."""
        n = self.nvars
        if len(T) != n or any(len(row) != n for row in T):
            raise StructuralError(f"T must be {n}x{n}")
        Tg = [[GaussianRational.coerce(x) for x in row] for row in T]
        holo, anti = [], []
        for i in range(n):
            holo.append(BiForm._raw(n, {
                (tuple(int(j == k) for k in range(n)), (0,) * n): Tg[i][j]
                for j in range(n) if Tg[i][j]}))
            anti.append(BiForm._raw(n, {
                ((0,) * n, tuple(int(j == k) for k in range(n))): Tg[i][j].conjugate()
                for j in range(n) if Tg[i][j]}))
        return self.compose(holo, anti)

    def dehomogenize(self, chart):
        """Set ``z_chart = w_chart = 1`` (variable count is kept)."""
        out = {}
        for (h, a), c in self._terms.items():
            key = (h[:chart] + (0,) + h[chart + 1:], a[:chart] + (0,) + a[chart + 1:])
            out[key] = out[key] + c if key in out else c
        return BiForm._raw(self.nvars, {k: v for k, v in out.items() if v})

    def homogenize(self, chart, target):
        """Pad each term with powers of ``z_chart, w_chart`` up to bidegree ``target``."""
        j, k = target
        out = {}
        for (h, a), c in self._terms.items():
            dh, da = j - sum(h), k - sum(a)
            if dh < 0 or da < 0:
                raise DegreeError(
                    f"target bidegree {target} below term bidegree {(sum(h), sum(a))}")
            key = (h[:chart] + (h[chart] + dh,) + h[chart + 1:],
                   a[:chart] + (a[chart] + da,) + a[chart + 1:])
            out[key] = c
        return BiForm._raw(self.nvars, out)

    # exact division (used by fraction-free elimination) -----------------------
    def _leading(self):
        key = min(self._terms, key=_order_key)
        return key, self._terms[key]

    def divide_exact(self, other):
        """Quotient ``self / other``; raises ValueError when not exact."""
        self._check(other)
        if not other:
            raise ZeroDivisionError("division by the zero form")
        (lh, la), lc = other._leading()
        inv = lc.inverse()
        rem = self
        quot = {}
        while rem:
            (rh, ra), rc = rem._leading()
            dh = tuple(x - y for x, y in zip(rh, lh))
            da = tuple(x - y for x, y in zip(ra, la))
            if any(e < 0 for e in dh) or any(e < 0 for e in da):
                raise ValueError("division is not exact")
            q = rc * inv
            quot[(dh, da)] = q
            rem = rem - BiForm._raw(self.nvars, {(dh, da): q}) * other
        return BiForm._raw(self.nvars, quot)

    # evaluation -------------------------------------------------------------
    def eval_exact(self, z, w):
        """Exact value at Gaussian-rational points."""
        z = [GaussianRational.coerce(x) for x in z]
        w = [GaussianRational.coerce(x) for x in w]
        if len(z) != self.nvars or len(w) != self.nvars:
            raise StructuralError("point has wrong length")
        total = ZERO
        for (h, a), c in self._terms.items():
            t = c
            for i in range(self.nvars):
                if h[i]:
                    t = t * z[i] ** h[i]
                if a[i]:
                    t = t * w[i] ** a[i]
            total = total + t
        return total

    def eval_diag_exact(self, z):
        z = [GaussianRational.coerce(x) for x in z]
        return self.eval_exact(z, [x.conjugate() for x in z])

    def compile(self):
        return NumericForm(self)

    def __call__(self, z, w):
        return evaluate(self, z, w)

    # serialization -------------------------------------------------------------
    def to_json_obj(self):
        terms = []
        for (h, a), c in self.items():
            terms.append({
                "holo": list(h), "anti": list(a),
                "re": f"{c.re.numerator}/{c.re.denominator}",
                "im": f"{c.im.numerator}/{c.im.denominator}",
            })
        return {"nvars": self.nvars, "terms": terms}

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        nvars = int(data["nvars"])
        return cls(nvars, [((t["holo"], t["anti"]),
                            GaussianRational(Fraction(t["re"]), Fraction(t["im"])))
                           for t in data["terms"]])


class NumericForm:
    """Float evaluator for a BiForm, vectorised over leading axes of the point."""

    def __init__(self, form):
        self.nvars = form.nvars
        items = form.items()
        self.holo = np.array([h for (h, _), _ in items], dtype=np.int64).reshape(-1, form.nvars)
        self.anti = np.array([a for (_, a), _ in items], dtype=np.int64).reshape(-1, form.nvars)
        self.coeffs = np.array([complex(c) for _, c in items], dtype=complex)
        self.scale = float(np.max(np.abs(self.coeffs))) if len(items) else 0.0
        self.degree = form.total_degree()

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        if z.shape[-1] != self.nvars or w.shape[-1] != self.nvars:
            raise StructuralError("point has wrong length")
        if not len(self.coeffs):
            return np.zeros(z.shape[:-1], dtype=complex)
        zp = np.prod(z[..., None, :] ** self.holo, axis=-1)
        wp = np.prod(w[..., None, :] ** self.anti, axis=-1)
        return (zp * wp) @ self.coeffs

    def diag(self, z):
        z = np.asarray(z, dtype=complex)
        return self(z, np.conj(z))


# module-level operations ----------------------------------------------------------

def conj_transpose(f):
    return f.conj_transpose()


def decompose(f):
    return f.decompose()


def partial(f, which, index):
    return f.partial(which, index)


def substitute_linear(f, T):
    return f.substitute_linear(T)


def dehomogenize(f, chart):
    return f.dehomogenize(chart)


def homogenize(f, chart, target):
    return f.homogenize(chart, target)


def evaluate(f, z, w):
    """Float value of ``f`` at ``(z, w)``."""
    return complex(NumericForm(f)(z, w))


def eval_diag(f, z):
    """Float value of ``f`` on the diagonal ``w = conj(z)``."""
    z = np.asarray(z, dtype=complex)
    return complex(NumericForm(f)(z, np.conj(z)))


def _as_coeffs(poly):
    coeffs = list(poly)
    if not coeffs:
        raise StructuralError("empty coefficient list")
    nvars = next((c.nvars for c in coeffs if isinstance(c, BiForm)), None)
    if nvars is None:
        raise StructuralError("coefficients must include at least one BiForm")
    out = [c if isinstance(c, BiForm) else BiForm.constant(nvars, c) for c in coeffs]
    while out and not out[-1]:
        out.pop()
    return nvars, out


def _bareiss_det(M):
    """Fraction-free determinant of a square matrix of BiForms."""
    n = len(M)
    if n == 0:
        return None
    M = [row[:] for row in M]
    sign = 1
    prev = None
    for k in range(n - 1):
        if not M[k][k]:
            swap = next((r for r in range(k + 1, n) if M[r][k]), None)
            if swap is None:
                return BiForm.zero(M[0][0].nvars)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[k][k] * M[i][j] - M[i][k] * M[k][j]
                M[i][j] = num if prev is None else num.divide_exact(prev)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


def resultant(f, g):
    """Sylvester resultant of two univariate polynomials with BiForm coefficients.

    ``f`` and ``g`` are coefficient sequences in ascending powers of the
    eliminated variable.  The Sylvester matrix is laid out from these
    ascending lists, so ``resultant(x - a, x - b) = b - a`` and
    ``resultant(x**2 - c, x - d) = d**2 - c``.
    """
    nf, fc = _as_coeffs(f)
    ng, gc = _as_coeffs(g)
    if nf != ng:
        raise StructuralError(f"variable-count mismatch: {nf} vs {ng}")
    if not fc or not gc:
        raise StructuralError("resultant of the zero polynomial")
    m, n = len(fc) - 1, len(gc) - 1
    if m == 0 and n == 0:
        return BiForm.constant(nf, 1)
    size = m + n
    zero = BiForm.zero(nf)
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(fc):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(gc):
            row[i + j] = c
        rows.append(row)
    return _bareiss_det(rows)


# exact linear algebra over Q(i) ---------------------------------------------------

def _row_reduce(rows):
    A = [[GaussianRational.coerce(x) for x in r] for r in rows]
    if not A:
        return [], []
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank_exact(rows):
    return len(_row_reduce(rows)[1])


def nullspace_exact(rows, ncols=None):
    """Basis of ``{v : rows @ v = 0}`` over Q(i)."""
    if ncols is None:
        ncols = len(rows[0])
    R, pivots = _row_reduce(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


# text grammar ---------------------------------------------------------------------

def format_form(f):
    """Canonical text, e.g. ``(1)*z1*w1 + (-1)*z2*w2``."""
    if not f:
        return "(0)"
    parts = []
    for (h, a), c in f.items():
        factors = [c.to_text()]
        for name, exps in (("z", h), ("w", a)):
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"{name}{i}")
                elif e > 1:
                    factors.append(f"{name}{i}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def where(self, pos=None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, msg, pos=None):
        line, col = self.where(pos)
        return ParseError(msg, line, col)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def digits(self):
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected digits")
        return int(self.text[start:self.pos])

    def rational(self, allow_sign=True):
        neg = False
        if allow_sign and self.peek() in "+-":
            neg = self.text[self.pos] == "-"
            self.pos += 1
        num = self.digits()
        den = 1
        if self.peek() == "/":
            self.pos += 1
            at = self.pos
            den = self.digits()
            if den == 0:
                raise self.error("zero denominator", at)
        q = Fraction(num, den)
        return -q if neg else q


def _parse_coeff(sc):
    sc.take("(")
    re_part = sc.rational()
    im_part = Fraction(0)
    if sc.peek() == "i":
        sc.pos += 1
        re_part, im_part = Fraction(0), re_part
    elif sc.peek() in "+-":
        neg = sc.text[sc.pos] == "-"
        sc.pos += 1
        im_part = sc.rational(allow_sign=False)
        if neg:
            im_part = -im_part
        sc.take("i")
    sc.take(")")
    return GaussianRational(re_part, im_part)


def _parse_factor(sc, holo, anti):
    ch = sc.peek()
    if ch not in ("z", "w"):
        raise sc.error("expected factor z<k> or w<k>")
    sc.pos += 1
    if sc.pos >= len(sc.text) or not sc.text[sc.pos].isdigit():
        raise sc.error("expected variable index")
    idx = sc.digits()
    power = 1
    if sc.peek() == "^":
        sc.pos += 1
        power = sc.digits()
    target = holo if ch == "z" else anti
    target[idx] = target.get(idx, 0) + power


def parse_form(text, nvars=None):
    """Parse the canonical text grammar back into a BiForm.

    ``nvars`` defaults to one more than the largest variable index used.
    """
    sc = _Scanner(text)
    raw = []
    sign = 1
    if sc.peek() in "+-":
        sign = -1 if sc.text[sc.pos] == "-" else 1
        sc.pos += 1
    while True:
        holo, anti = {}, {}
        ch = sc.peek()
        if ch == "(":
            coeff = _parse_coeff(sc)
        elif ch in ("z", "w"):
            coeff = ONE
            _parse_factor(sc, holo, anti)
        else:
            raise sc.error("expected term")
        while sc.peek() == "*":
            sc.pos += 1
            _parse_factor(sc, holo, anti)
        raw.append((holo, anti, coeff if sign > 0 else -coeff))
        ch = sc.peek()
        if ch == "":
            break
        if ch not in "+-":
            raise sc.error("expected '+', '-' or end of input")
        sign = -1 if ch == "-" else 1
        sc.pos += 1
    used = max((i for h, a, _ in raw for i in list(h) + list(a)), default=-1) + 1
    if nvars is None:
        nvars = used
    elif used > nvars:
        raise ParseError(f"variable index {used - 1} exceeds nvars={nvars}", 1, 1)
    terms = []
    for h, a, c in raw:
        terms.append(((tuple(h.get(i, 0) for i in range(nvars)),
                       tuple(a.get(i, 0) for i in range(nvars))), c))
    return BiForm(nvars, terms)


def gaussian_vector(values):
    return [GaussianRational.coerce(v) for v in values]


def product_forms(forms, nvars):
    out = BiForm.constant(nvars, 1)
    for f in forms:
        out = out * f
    return out


def all_exponents(nvars, degree):
    """Exponent tuples of total degree ``degree`` in ``nvars`` variables, lex-descending."""
    out = [e for e in product(range(degree + 1), repeat=nvars) if sum(e) == degree]
    return sorted(out, reverse=True)
