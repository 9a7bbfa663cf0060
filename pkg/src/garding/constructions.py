"""New hyperbolic polynomials from old ones.

Products, restrictions, derivatives and sigma_j polynomials are realised as
exact ``MonomialPoly`` objects. Compositions, k-fold sums, delta
perturbations and permuted linear products are realised by eigenvalue
recipes (``RecipePoly``); they are never expanded into monomials.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .branches import classify_value
from .errors import ConeViolation, DimensionMismatch, InterlacingViolation, NotReal
from .poly_core import MonomialPoly, directional_derivative, evaluate, is_symmetric
from .spectra import (SpectralPoly, _companion_roots, direction_of, eigenvalues, eigenvalues_batch,
                      elementary_symmetric, is_hyperbolic, sigma_values, value)


def base_eigen(p, a, x):
    """Sorted eigenvalues of one point or a stack of points."""
    x = np.asarray(x, dtype=float)
    if isinstance(p, SpectralPoly):
        return np.sort(np.asarray(p.eigen(x), dtype=float), axis=-1)
    if x.ndim == 1:
        return eigenvalues(p, a, x).values
    flat = x.reshape(-1, x.shape[-1])
    vals, ok = eigenvalues_batch(p, a, flat)
    if not ok.all():
        raise NotReal("restriction has non-real roots", x=flat[np.argmin(ok)])
    return vals.reshape(x.shape[:-1] + (p.degree,))


class RecipePoly(SpectralPoly):
    """Polynomial given by ``eigen = recipe(lambda(x))`` and ``value = valuer(lambda(x))``."""

    def __init__(self, base, a, degree, recipe, valuer):
        self.base, self.a = base, (None if isinstance(base, SpectralPoly) else np.asarray(a, dtype=float))
        self.dim = base.dim
        self.degree = degree
        self.direction = direction_of(base, a)
        self._recipe, self._valuer = recipe, valuer
        self.N = getattr(base, "N", None)

    def base_eigen(self, x):
        return base_eigen(self.base, self.a, x)

    def eigen(self, x):
        return np.sort(self._recipe(self.base_eigen(x)), axis=-1)

    def value(self, x):
        return self._valuer(self.base_eigen(x))

    def matrix(self, x):
        return self.base.matrix(x)


@dataclass
class DerivedPoly:
    """A constructed polynomial plus a record of how it was built."""

    kind: str
    params: dict
    base: object
    realized: object  # MonomialPoly or SpectralPoly
    direction: np.ndarray = field(repr=False)

    @property
    def degree(self):
        return self.realized.degree

    @property
    def dim(self):
        return self.realized.dim

    @property
    def exact(self):
        return isinstance(self.realized, MonomialPoly)

    @property
    def a(self):
        """Direction argument for spectra calls (None for recipe realisations)."""
        return self.direction if self.exact else None

    def eigenvalues(self, x):
        return eigenvalues(self.realized, self.a, x)

    def __call__(self, x):
        return value(self.realized, x)

    def to_json_dict(self):
        from .poly_core import to_json_dict as poly_json

        def ref(obj):
            if isinstance(obj, DerivedPoly):
                return obj.to_json_dict()
            if isinstance(obj, MonomialPoly):
                return {"polynomial": poly_json(obj)}
            if hasattr(obj, "to_json_dict"):
                return {"model": obj.to_json_dict()}
            return {"object": repr(obj)}

        params = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.params.items()
                  if not callable(v) and not isinstance(v, (MonomialPoly, SpectralPoly))}
        return {"kind": self.kind, "params": params, "base": ref(self.base)}


def _realized(p):
    return p.realized if isinstance(p, DerivedPoly) else p


def _direction(p, a):
    if isinstance(p, DerivedPoly):
        return p.direction if a is None else np.asarray(a, dtype=float)
    return direction_of(p, a)


def _spec_a(p, a):
    return None if isinstance(_realized(p), SpectralPoly) else _direction(p, a)


def product(p, q, a=None, sample_count=50, rng=None):
    """Product of two polynomials hyperbolic in the same direction."""
    P, Q = _realized(p), _realized(q)
    if P.dim != Q.dim:
        raise DimensionMismatch("factors live on different spaces")
    ap, aq = _direction(p, a), _direction(q, a)
    if not np.allclose(ap, aq):
        raise ValueError("direction mismatch between the two factors")
    for f in (P, Q):
        if not is_hyperbolic(f, _spec_a(f, ap), sample_count, rng=rng):
            raise NotReal("a factor failed the hyperbolicity probe")
    if isinstance(P, MonomialPoly) and isinstance(Q, MonomialPoly):
        realized = P * Q
    else:
        realized = _UnionPoly(P, Q, ap)
    return DerivedPoly("product", {}, (p, q), realized, ap)


class _UnionPoly(SpectralPoly):
    def __init__(self, P, Q, a):
        self.P, self.Q, self.a = P, Q, a
        self.dim, self.degree, self.direction = P.dim, P.degree + Q.degree, np.asarray(a, dtype=float)

    def _pair(self, x):
        return (base_eigen(self.P, _spec_a(self.P, self.a), x),
                base_eigen(self.Q, _spec_a(self.Q, self.a), x))

    def eigen(self, x):
        u, v = self._pair(x)
        return np.sort(np.concatenate([u, v], axis=-1), axis=-1)

    def value(self, x):
        return value(self.P, x) * value(self.Q, x)


def restrict_subspace(p, a, W, b):
    """Pull p back to coordinates on the subspace spanned by the columns of W.

    ``b`` (coordinates in W) becomes the new direction and must lie in the cone.
    """
    P = _realized(p)
    if not isinstance(P, MonomialPoly):
        raise TypeError("restriction needs an exact monomial polynomial")
    W = np.asarray(W, dtype=float)
    b = np.asarray(b, dtype=float)
    if W.ndim != 2 or W.shape[0] != P.dim or b.shape != (W.shape[1],):
        raise DimensionMismatch("W must be (dim, k) and b of length k")
    bv = W @ b
    lam = eigenvalues(P, _direction(p, a), bv).values
    if not lam[0] > 1e-8 * np.linalg.norm(bv):
        raise ConeViolation("b is not in the Garding cone")
    return DerivedPoly("restriction", {"W": W, "b": b}, p, P.compose_linear(W), b)


def check_interlacing(lam, lam_d, slack):
    """lam_1 <= mu_1 <= lam_2 <= ... <= mu_{m-1} <= lam_m within ``slack``."""
    return bool(np.all(lam[:-1] <= lam_d + slack) and np.all(lam_d <= lam[1:] + slack))


def derivative_poly(p, b, a=None, verify=20, rng=None, slack=1e-7):
    """p'_b, with its eigenvalues checked to interlace those of p on random points."""
    P = _realized(p)
    if not isinstance(P, MonomialPoly):
        raise TypeError("derivatives need an exact monomial polynomial")
    if P.degree < 2:
        raise ValueError("derivative_poly needs degree >= 2")
    b = np.asarray(b, dtype=float)
    if a is not None:
        if not eigenvalues(P, a, b).values[0] > 1e-8 * np.linalg.norm(b):
            raise ConeViolation("b is not in the Garding cone")
    elif not evaluate(P, b) > 0:
        raise ConeViolation("p(b) must be positive")
    D = directional_derivative(P, b)
    if verify:
        rng = np.random.default_rng(rng)
        X = rng.standard_normal((verify, P.dim))
        lam, ok1 = eigenvalues_batch(P, b, X)
        lam_d, ok2 = eigenvalues_batch(D, b, X)
        for x, u, v, good in zip(X, lam, lam_d, ok1 & ok2):
            if not good:
                raise NotReal("restriction not real during interlacing check", x=x)
            s = slack * (1.0 + np.max(np.abs(u)))
            if not check_interlacing(u, v, s):
                raise InterlacingViolation(f"eigenvalues {v} do not interlace {u} at x = {x.tolist()}")
    return DerivedPoly("derivative", {"b": b}, p, D, b)


def sigma_poly(p, a, j):
    """x -> sigma_j(lambda(x)), exactly: the (m-j)-th a-derivative over (m-j)! p(a)."""
    P = _realized(p)
    m = P.degree
    if not 1 <= j <= m:
        raise ValueError(f"j must be in 1..{m}")
    a_ = _direction(p, a)
    if not isinstance(P, MonomialPoly):
        return DerivedPoly("sigma", {"j": j}, p, _sigma_recipe(P, j), a_)
    chain = P._line_chain(tuple(float(v) for v in a_))
    poly = chain[m - j].scale(1.0 / evaluate(P, a_))
    return DerivedPoly("sigma", {"j": j}, p, poly, a_)


def _esym(lam, j):
    return elementary_symmetric(lam)[..., j - 1]


def _sigma_recipe(P, j):
    m = P.degree
    # sigma_j(lambda + t e) = sum_i C(m-i, j-i) sigma_i t^(j-i); its roots give the eigenvalues
    def recipe(lam):
        sig = np.concatenate([np.ones(lam.shape[:-1] + (1,)), elementary_symmetric(lam)], axis=-1)
        coeffs = np.stack([math.comb(m - i, j - i) * sig[..., i] for i in range(j + 1)], axis=-1)
        return -np.sort(_companion_roots(coeffs).real, axis=-1)

    return RecipePoly(P, None, j, recipe, lambda lam: _esym(lam, j))


def universal_compose(Q, p, a=None, rng=None):
    """q(x) = Q(lambda(x)) for a symmetric e-hyperbolic Q on R^m."""
    P = _realized(p)
    m = P.degree
    if Q.dim != m:
        raise DimensionMismatch(f"Q must live on R^{m}")
    e = np.ones(m)
    if not is_symmetric(Q, rng=rng):
        raise ValueError("Q is not symmetric")
    if not evaluate(Q, e) > 0:
        raise ValueError("Q(e) must be positive")
    if not is_hyperbolic(Q, e, 100, rng=rng):
        raise NotReal("Q is not e-hyperbolic on the samples")
    a_ = _direction(p, a)

    def recipe(lam):
        return base_eigen(Q, e, lam)

    realized = RecipePoly(P, _spec_a(p, a), Q.degree, recipe, lambda lam: evaluate(Q, lam))
    return DerivedPoly("composed", {"Q": Q}, p, realized, a_)


def kfold_sum_poly(p, a, k):
    """Eigenvalues are all averages (lambda_i1 + ... + lambda_ik) / k."""
    P = _realized(p)
    m = P.degree
    if not 1 <= k <= m:
        raise ValueError(f"k must be in 1..{m}")
    subsets = np.array(list(itertools.combinations(range(m), k)))
    sel = np.zeros((m, len(subsets)))
    for c, S in enumerate(subsets):
        sel[S, c] = 1.0
    realized = RecipePoly(P, _spec_a(p, a), len(subsets),
                          lambda lam: (lam @ sel) / k,
                          lambda lam: np.prod(lam @ sel, axis=-1))
    return DerivedPoly("kfold", {"k": k}, p, realized, _direction(p, a))


def delta_elliptic(p, a, delta):
    """Eigenvalues (lambda_k + delta tr lambda) / (1 + m delta)."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    P = _realized(p)
    m = P.degree

    def shifted(lam):
        return lam + delta * lam.sum(axis=-1, keepdims=True)

    realized = RecipePoly(P, _spec_a(p, a), m,
                          lambda lam: shifted(lam) / (1 + m * delta),
                          lambda lam: np.prod(shifted(lam), axis=-1))
    return DerivedPoly("delta", {"delta": float(delta)}, p, realized, _direction(p, a))


def perm_product_poly(p, a, w):
    """Eigenvalues (sigma w) . lambda / (w . e) over all permutations sigma."""
    P = _realized(p)
    m = P.degree
    if m > 5:
        raise ValueError("permutation products are limited to m <= 5")
    w = np.asarray(w, dtype=float)
    if w.shape != (m,):
        raise DimensionMismatch(f"w must have length {m}")
    we = float(w.sum())
    if not we > 0:
        raise ValueError("w . e must be positive")
    Wp = np.array([w[list(s)] for s in itertools.permutations(range(m))]).T  # (m, m!)
    realized = RecipePoly(P, _spec_a(p, a), math.factorial(m),
                          lambda lam: (lam @ Wp) / we,
                          lambda lam: np.prod(lam @ Wp, axis=-1))
    return DerivedPoly("perm_product", {"w": w}, p, realized, _direction(p, a))


def krylov_value(p, a, x, c):
    """p(x) - sum_k c_k p^(k)(x), where p^(k) is the k-th a-derivative (p^(0) = p)."""
    P = _realized(p)
    m = P.degree
    c = np.asarray(c, dtype=float)
    if c.shape != (m,):
        raise DimensionMismatch(f"need m = {m} coefficients c_0..c_(m-1)")
    a_ = _direction(p, a)
    pa = value(P, a_)
    sig = np.concatenate([[1.0], sigma_values(P, _spec_a(p, a), x)])
    # p^(k)(x) = k! p(a) sigma_(m-k)(lambda(x))
    derivs = np.array([math.factorial(k) * pa * sig[m - k] for k in range(m)])
    return float(value(P, x) - c @ derivs), float(abs(value(P, x)) + np.abs(c) @ np.abs(derivs))


def krylov_membership(p, a, x, c, tol=1e-9):
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise ValueError("coefficients must be nonnegative")
    lam = eigenvalues(_realized(p), _spec_a(p, a), x).values
    if lam[0] < -1e-8 * (1 + np.linalg.norm(x)):
        raise ConeViolation("x is outside the closed Garding cone")
    v, scale = krylov_value(p, a, x, c)
    return classify_value(v, tol * max(scale, 1e-300))
