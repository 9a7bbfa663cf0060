"""Exact homogeneous polynomials on R^d stored as exponent -> coefficient maps.

Everything here is immutable. Derivatives are computed term by term, so the
only rounding comes from coefficient arithmetic in double precision.
"""
from __future__ import annotations

import json
import math
from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import DegenerateDirection, DimensionMismatch, SchemaError

PRUNE_RTOL = 1e-14


def _collect(dim, items, prune=True):
    """Sum coefficients over repeated exponents and drop negligible terms."""
    terms = {}
    for exp, c in items:
        exp = tuple(int(e) for e in exp)
        terms[exp] = terms.get(exp, 0.0) + float(c)
    if prune and terms:
        big = max(abs(c) for c in terms.values())
        terms = {e: c for e, c in terms.items() if c != 0.0 and abs(c) >= PRUNE_RTOL * big}
    return terms


class MonomialPoly:
    """Homogeneous real polynomial ``sum_e c_e x^e`` on R^dim of a fixed degree.

    ``terms`` maps exponent tuples (length ``dim``, summing to ``degree``) to
    finite floats. The zero polynomial (no terms) is allowed as the result of
    differentiation; user-facing loaders reject it.
    """

    __slots__ = ("dim", "degree", "_terms", "_exps", "_coeffs", "_hash", "provenance", "__weakref__")

    def __init__(self, dim, degree, terms, provenance=None):
        dim, degree = int(dim), int(degree)
        if dim < 1 or degree < 0:
            raise ValueError("dim must be >= 1 and degree >= 0")
        clean = {}
        for exp, c in dict(terms).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != dim:
                raise DimensionMismatch(f"exponent {exp} has length {len(exp)}, expected {dim}")
            if min(exp) < 0 or sum(exp) != degree:
                raise ValueError(f"exponent {exp} does not sum to degree {degree}")
            c = float(c)
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient for {exp}")
            if c != 0.0:
                clean[exp] = clean.get(exp, 0.0) + c
        self.dim = dim
        self.degree = degree
        self._terms = dict(sorted(clean.items()))
        if self._terms:
            self._exps = np.array(list(self._terms), dtype=np.int64).reshape(-1, dim)
            self._coeffs = np.array(list(self._terms.values()), dtype=float)
        else:
            self._exps = np.zeros((0, dim), dtype=np.int64)
            self._coeffs = np.zeros(0)
        self._exps.flags.writeable = False
        self._coeffs.flags.writeable = False
        self._hash = hash((dim, degree, tuple(self._terms.items())))
        self.provenance = dict(provenance or {})

    # -- basic protocol -------------------------------------------------
    @property
    def terms(self):
        return dict(self._terms)

    def is_zero(self):
        return not self._terms

    def coefficient_scale(self):
        return float(np.max(np.abs(self._coeffs))) if self._terms else 0.0

    def __eq__(self, other):
        if not isinstance(other, MonomialPoly):
            return NotImplemented
        return (self.dim, self.degree, self._terms) == (other.dim, other.degree, other._terms)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"MonomialPoly(dim={self.dim}, degree={self.degree}, terms={len(self._terms)})"

    def __call__(self, x):
        return evaluate(self, x)

    # -- arithmetic -----------------------------------------------------
    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, s):
        return MonomialPoly(self.dim, self.degree, {e: s * c for e, c in self._terms.items()},
                            self.provenance)

    def __add__(self, other):
        if other.dim != self.dim or other.degree != self.degree:
            raise DimensionMismatch("can only add polynomials of equal dim and degree")
        items = list(self._terms.items()) + list(other._terms.items())
        return MonomialPoly(self.dim, self.degree, _collect(self.dim, items))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        if other.dim != self.dim:
            raise DimensionMismatch("product of polynomials on different spaces")
        items = []
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                items.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return MonomialPoly(self.dim, self.degree + other.degree, _collect(self.dim, items))

    __rmul__ = __mul__

    def __pow__(self, k):
        out = MonomialPoly(self.dim, 0, {(0,) * self.dim: 1.0})
        for _ in range(int(k)):
            out = out * self
        return out

    def negated(self, reason="p(a) < 0"):
        """Return -p with the flip recorded in ``provenance``."""
        out = -self
        out.provenance = dict(self.provenance, negated=True, negation_reason=reason)
        return out

    def compose_linear(self, L):
        """Pull back along x = L w, where L has shape (dim, k)."""
        L = np.asarray(L, dtype=float)
        if L.ndim != 2 or L.shape[0] != self.dim:
            raise DimensionMismatch(f"linear map must have shape ({self.dim}, k)")
        k = L.shape[1]
        forms = [MonomialPoly(k, 1, {tuple(int(i == j) for i in range(k)): L[row, j]
                                     for j in range(k)}) for row in range(self.dim)]
        total = {}
        for exp, c in self._terms.items():
            term = MonomialPoly(k, 0, {(0,) * k: c})
            for row, e in enumerate(exp):
                for _ in range(e):
                    term = term * forms[row]
            for e2, c2 in term._terms.items():
                total[e2] = total.get(e2, 0.0) + c2
        return MonomialPoly(k, self.degree, _collect(k, total.items()))

    # -- cached derivative chains --------------------------------------
    @lru_cache(maxsize=512)
    def _line_chain(self, a):
        """[p, D_a p / 1!, D_a^2 p / 2!, ...] as MonomialPolys, for restriction."""
        chain = [self]
        for k in range(1, self.degree + 1):
            chain.append(directional_derivative(chain[-1], a).scale(1.0 / k))
        return tuple(chain)

    @lru_cache(maxsize=128)
    def _gradient_polys(self):
        eye = np.eye(self.dim)
        return tuple(directional_derivative(self, eye[j]) for j in range(self.dim))


def _as_vector(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (dim,):
        raise DimensionMismatch(f"expected vectors of length {dim}, got shape {x.shape}")
    return x


def evaluate(p, x):
    """Evaluate ``p`` at ``x``; ``x`` may be a single vector or a stack (..., d)."""
    x = _as_vector(x, p.dim)
    if p.is_zero():
        return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
    mons = np.prod(x[..., None, :] ** p._exps, axis=-1)
    val = mons @ p._coeffs
    return float(val) if x.ndim == 1 else val


def directional_derivative(p, b):
    """Exact derivative d/dt p(y + t b) at t = 0, as a polynomial in y."""
    if p.degree == 0:
        raise ValueError("directional derivative of a constant is not defined here (m = 0)")
    b = _as_vector(b, p.dim)
    if b.ndim != 1:
        raise DimensionMismatch("direction must be a single vector")
    items = []
    for exp, c in p._terms.items():
        for j, e in enumerate(exp):
            if e and b[j] != 0.0:
                new = list(exp)
                new[j] -= 1
                items.append((tuple(new), c * e * b[j]))
    return MonomialPoly(p.dim, p.degree - 1, _collect(p.dim, items))


def gradient(p, x):
    """Gradient of p at x (or at each row of a stack)."""
    x = _as_vector(x, p.dim)
    if p.degree == 0:
        return np.zeros_like(x)
    cols = [evaluate(g, x) for g in p._gradient_polys()]
    return np.stack(cols, axis=-1) if x.ndim > 1 else np.array(cols)


class UnivariatePoly:
    """Coefficients of t -> p(t a + x), highest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        c.flags.writeable = False
        self.coeffs = c

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, t):
        return np.polyval(self.coeffs, t)

    def __repr__(self):
        return f"UnivariatePoly({list(self.coeffs)})"


def degeneracy_threshold(p, a):
    """Tolerance under which p(a) counts as zero: 1e-10 * scale * |a|^m."""
    a = np.asarray(a, dtype=float)
    return 1e-10 * max(p.coefficient_scale(), 1e-300) * max(np.linalg.norm(a), 1e-300) ** p.degree


def restriction_coefficients(p, a, x):
    """Coefficient array of t -> p(t a + x), highest power first.

    ``x`` may be a stack of points, giving an array of shape (..., m+1).
    Does not check degeneracy of ``a``.
    """
    a = _as_vector(a, p.dim)
    x = _as_vector(x, p.dim)
    chain = p._line_chain(tuple(float(v) for v in a))
    cols = [evaluate(q, x) if not q.is_zero() else (np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0)
            for q in chain]
    # chain[k](x) is the coefficient of t^k
    return np.stack(cols[::-1], axis=-1) if x.ndim > 1 else np.array(cols[::-1])


def restrict_line(p, a, x):
    """The univariate polynomial t -> p(t a + x); rejects degenerate ``a``."""
    pa = evaluate(p, a)
    if abs(pa) <= degeneracy_threshold(p, a):
        raise DegenerateDirection(f"p(a) = {pa:g} is zero within tolerance")
    return UnivariatePoly(restriction_coefficients(p, a, x))


def polarized_value(p, directions, check_points=True):
    """Completely polarized form (1/m!) * d^m/dt_1..dt_m p(t_1 b_1 + ... + t_m b_m)."""
    directions = [np.asarray(b, dtype=float) for b in directions]
    if len(directions) != p.degree:
        raise DimensionMismatch(f"need exactly m = {p.degree} directions, got {len(directions)}")
    q = p
    for b in directions:
        _as_vector(b, p.dim)
        q = directional_derivative(q, b)
    v0 = evaluate(q, np.zeros(p.dim))
    if check_points:
        v1 = evaluate(q, np.ones(p.dim))
        assert v0 == v1, "m-fold derivative is not constant"
    return v0 / math.factorial(p.degree)


def is_symmetric(p, rng=None, points=20, perms=10, rtol=1e-9):
    """Sampled check that p is invariant under coordinate permutations."""
    rng = np.random.default_rng(rng)
    for _ in range(points):
        x = rng.standard_normal(p.dim)
        v = evaluate(p, x)
        for _ in range(perms):
            w = evaluate(p, x[rng.permutation(p.dim)])
            if abs(w - v) > rtol * max(1.0, abs(v)):
                return False
    return True


# -- JSON --------------------------------------------------------------------

def to_json_dict(p):
    return {"dim": p.dim, "degree": p.degree,
            "terms": [{"exp": list(e), "coeff": c} for e, c in p._terms.items()]}


def from_json_dict(d):
    try:
        dim, degree, terms = int(d["dim"]), int(d["degree"]), d["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"polynomial JSON needs dim, degree, terms: {exc}") from None
    if dim < 1 or degree < 1:
        raise SchemaError("dim and degree must be positive")
    out = {}
    for i, t in enumerate(terms):
        try:
            exp = [int(e) for e in t["exp"]]
            c = float(t["coeff"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"term {i}: malformed ({exc})") from None
        if len(exp) != dim:
            raise SchemaError(f"term {i}: exponent length {len(exp)} != dim {dim}")
        if min(exp) < 0 or sum(exp) != degree:
            raise SchemaError(f"term {i}: exponents {exp} do not sum to degree {degree}")
        if not math.isfinite(c):
            raise SchemaError(f"term {i}: non-finite coefficient")
        out[tuple(exp)] = out.get(tuple(exp), 0.0) + c
    p = MonomialPoly(dim, degree, out)
    if p.is_zero():
        raise SchemaError("polynomial has no nonzero coefficient")
    return p


def loads(text):
    return from_json_dict(json.loads(text))


def load(path):
    with open(path) as fh:
        return from_json_dict(json.load(fh))


# -- frequently used instances -------------------------------------------------

def linear_form(c):
    c = np.asarray(c, dtype=float)
    d = len(c)
    return MonomialPoly(d, 1, {tuple(int(i == j) for i in range(d)): c[j] for j in range(d)})


def light_cone():
    """x1^2 - x2^2 - x3^2, hyperbolic in the direction (1, 0, 0)."""
    return MonomialPoly(3, 2, {(2, 0, 0): 1.0, (0, 2, 0): -1.0, (0, 0, 2): -1.0})


def product_poly(m):
    """x1 x2 ... xm on R^m."""
    return MonomialPoly(m, m, {(1,) * m: 1.0})


def example_a3():
    """(xy + xz + yz) / 3 on R^3, hyperbolic in the direction (1, 1, 1)."""
    return MonomialPoly(3, 2, {(1, 1, 0): 1 / 3, (1, 0, 1): 1 / 3, (0, 1, 1): 1 / 3})


def sym_index(n):
    """Upper-triangular (i <= j) coordinate order used for Sym^2(R^n) vectors."""
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym_to_vector(A):
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    return np.stack([A[..., i, j] for i, j in sym_index(n)], axis=-1)


def vector_to_sym(v, n):
    v = np.asarray(v, dtype=float)
    A = np.zeros(v.shape[:-1] + (n, n))
    for k, (i, j) in enumerate(sym_index(n)):
        A[..., i, j] = v[..., k]
        A[..., j, i] = v[..., k]
    return A


def _perm_sign(perm):
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def det_expanded(n):
    """det A as a monomial polynomial in the upper-triangular entries of A (n <= 4)."""
    if not 1 <= n <= 4:
        raise ValueError("expanded determinants are only provided for n <= 4")
    idx = {ij: k for k, ij in enumerate(sym_index(n))}
    d = len(idx)
    items = []
    for perm in permutations(range(n)):
        exp = [0] * d
        for i in range(n):
            exp[idx[(min(i, perm[i]), max(i, perm[i]))]] += 1
        items.append((exp, _perm_sign(perm)))
    return MonomialPoly(d, n, _collect(d, items))


def identity_vector(n):
    return sym_to_vector(np.eye(n))
