"""Sampling-based implicitization of swept sets by Hermitian (k, k)-forms.

Rows of the evaluation matrix are the real monomial functions of
:class:`MonomialBasis` at sample points.  A tiny smallest singular value
signals a Hermitian form vanishing on all samples; a large one is numerical
evidence (not proof) that no such form exists.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .bipoly import BiForm, GaussianRational, all_exponents
from .errors import DegreeError, DimensionError, OversamplingError, SymmetryError

__all__ = [
    "THRESHOLDS", "BANNER", "MonomialBasis", "monomial_basis", "RankCertificate",
    "implicitize_from_samples", "nonalgebraicity_certificate", "form_to_vector",
    "vector_to_form", "cosine_distance", "certificate_report",
]

THRESHOLDS = {"null": 1e-10, "nonvanishing": 1e-3, "oversampling": 2}

BANNER = "numerical evidence up to bidegree kmax, not a proof"


@dataclass(frozen=True)
class MonomialBasis:
    """Real basis of Hermitian (k, k)-forms in ``n + 1`` variables, on the diagonal.

    Order: ``|z^a|^2`` for each exponent ``a``, then for each pair ``a < b``
    the functions ``Re(z^a conj(z^b))`` and ``Im(z^a conj(z^b))``.
    """

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise DimensionError("monomial basis needs n >= 1 and k >= 1")
        object.__setattr__(self, "exponents", all_exponents(self.n + 1, self.k))

    @property
    def size(self):
        return len(self.exponents) ** 2

    def __len__(self):
        return self.size

    def labels(self):
        names = ["*".join(f"z{i}^{e}" if e > 1 else f"z{i}" for i, e in enumerate(a) if e)
                 for a in self.exponents]
        out = [f"|{a}|^2" for a in names]
        N = len(names)
        for i in range(N):
            for j in range(i + 1, N):
                out += [f"Re({names[i]}*conj({names[j]}))", f"Im({names[i]}*conj({names[j]}))"]
        return out

    def evaluate(self, points):
        """Matrix of basis values, one row per point."""
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        E = np.array(self.exponents)
        Z = np.prod(pts[:, None, :] ** E[None, :, :], axis=-1)
        P = Z[:, :, None] * np.conj(Z)[:, None, :]
        N = len(self.exponents)
        iu, ju = np.triu_indices(N, 1)
        diag = P[:, np.arange(N), np.arange(N)].real
        off = P[:, iu, ju]
        inter = np.empty((len(pts), 2 * len(iu)))
        inter[:, 0::2] = off.real
        inter[:, 1::2] = off.imag
        return np.hstack([diag, inter])


def monomial_basis(n, k):
    return MonomialBasis(n, k)


def form_to_vector(rho, basis):
    """Coordinates of a Hermitian (k, k)-form in ``basis`` (exact Fractions)."""
    if not rho.is_hermitian():
        raise SymmetryError("form is not Hermitian")
    if rho.nvars != basis.n + 1:
        raise DimensionError("variable count does not match the basis")
    if rho and rho.bidegree() != (basis.k, basis.k):
        raise DegreeError(f"form is not ({basis.k},{basis.k})-bihomogeneous")
    ex = basis.exponents
    N = len(ex)
    out = [rho.coefficient(a, a).re for a in ex]
    for i in range(N):
        for j in range(i + 1, N):
            c = rho.coefficient(ex[i], ex[j])
            out += [2 * c.re, -2 * c.im]
    return out


def vector_to_form(vec, basis):
    """Inverse of :func:`form_to_vector`; float entries are converted exactly."""
    ex = basis.exponents
    N = len(ex)
    v = [Fraction(x) for x in vec]
    terms = [((a, a), GaussianRational(v[i])) for i, a in enumerate(ex)]
    pos = N
    for i in range(N):
        for j in range(i + 1, N):
            c = GaussianRational(v[pos] / 2, -v[pos + 1] / 2)
            terms.append(((ex[i], ex[j]), c))
            terms.append(((ex[j], ex[i]), c.conjugate()))
            pos += 2
    return BiForm(basis.n + 1, terms)


def cosine_distance(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return max(0.0, float(1.0 - abs(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))))


@dataclass
class RankCertificate:
    k: int
    rows: int
    basis_dim: int
    sigma_min: float
    nullvector: list | None
    seed: int | None = None

    @property
    def null_found(self):
        return self.nullvector is not None

    @property
    def nonvanishing(self):
        return self.sigma_min >= THRESHOLDS["nonvanishing"]

    def to_json_obj(self):
        return {"k": self.k, "rows": self.rows, "basisDim": self.basis_dim,
                "sigmaMin": self.sigma_min, "nullvector": self.nullvector, "seed": self.seed}


def _normalized_matrix(points, basis, column_scales=None):
    pts = np.asarray(points, dtype=complex)
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0):
        raise DimensionError("sample points must be nonzero")
    A = basis.evaluate(pts / norms[:, None])
    if column_scales is None:
        column_scales = np.linalg.norm(A, axis=0)
        column_scales[column_scales == 0] = 1.0
    return A / column_scales, column_scales


def implicitize_from_samples(points, k, seed=None, column_scales=None, null_threshold=None):
    """Smallest singular value of the normalized evaluation matrix at bidegree ``(k, k)``.

    ``column_scales`` pins the column normalization (used to compare row
    subsets); by default each column is scaled to unit norm.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    basis = MonomialBasis(pts.shape[1] - 1, k)
    need = THRESHOLDS["oversampling"] * basis.size
    if len(pts) < need:
        raise OversamplingError(f"{len(pts)} samples < {need} required for k={k}")
    A, scales = _normalized_matrix(pts, basis, column_scales)
    _, s, vh = np.linalg.svd(A, full_matrices=False)
    sigma = float(s[-1])
    thresh = THRESHOLDS["null"] if null_threshold is None else null_threshold
    null = None
    if sigma < thresh:
        raw = vh[-1] / scales
        raw = raw / np.linalg.norm(raw)
        if raw[np.argmax(np.abs(raw))] < 0:
            raw = -raw
        null = [float(x) for x in raw]
    return RankCertificate(k, len(pts), basis.size, sigma, null, seed)


def nonalgebraicity_certificate(sampler, kmax, rows_per_degree=None, seed=42):
    """Certificates for ``k = 1..kmax`` on fresh samples ``sampler(seed + k, rows)``.

    ``rows_per_degree`` defaults to the minimum oversampled row count.
    """
    certs = []
    for k in range(1, kmax + 1):
        probe_pts = sampler(seed + k, 1)
        basis = MonomialBasis(np.asarray(probe_pts).shape[1] - 1, k)
        rows = rows_per_degree or THRESHOLDS["oversampling"] * basis.size
        pts = sampler(seed + k, rows)
        certs.append(implicitize_from_samples(pts, k, seed=seed + k))
    return certs


def certificate_report(certs, seed):
    return {
        "banner": BANNER,
        "kmax": max((c.k for c in certs), default=0),
        "seed": seed,
        "certificates": [c.to_json_obj() for c in certs],
        "nonvanishing": [c.k for c in certs if c.nonvanishing],
        "nullFound": [c.k for c in certs if c.null_found],
    }
