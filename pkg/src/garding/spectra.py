"""a-eigenvalues, hyperbolicity verdicts, ranks and eigenvalue curves.

Two kinds of polynomial objects are understood:

* ``MonomialPoly`` together with an explicit direction ``a``; eigenvalues are
  minus the roots of t -> p(t a + x), found as companion-matrix eigenvalues.
* any ``SpectralPoly`` (matrix models, eigenvalue recipes), which carries its
  own direction and returns its eigenvalue list directly.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConeViolation, DegenerateDirection, DimensionMismatch, NotReal, TrackingAmbiguous
from .poly_core import MonomialPoly, degeneracy_threshold, evaluate, restriction_coefficients

DEFAULT_TOL = 1e-7
# Backward error assumed for companion eigenvalues; a k-fold root may split
# into a cluster of radius about (CLUSTER_EPS)^(1/k).
CLUSTER_EPS = 1e-13


class SpectralPoly:
    """Hyperbolic polynomial defined through its eigenvalue map.

    Subclasses provide ``dim``, ``degree``, ``direction`` and implement
    ``eigen`` (sorted eigenvalues, vectorised over leading axes) and
    ``value``. The value need not be normalised; ``value(direction)`` > 0.
    """

    dim: int
    degree: int
    direction: np.ndarray

    def eigen(self, x):
        raise NotImplementedError

    def value(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)


@dataclass(frozen=True)
class EigenList:
    values: np.ndarray
    max_imag: float = 0.0  # relative: max |Im z| / (1 + |Re z|) over the roots
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(np.diff(v) < 0):
            raise ValueError("eigenvalues must be sorted nondecreasing")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    @property
    def min(self):
        return float(self.values[0])

    @property
    def max(self):
        return float(self.values[-1])


@dataclass(frozen=True)
class RankProfile:
    plus: int
    minus: int
    nullity: int

    @property
    def rank(self):
        return self.plus + self.minus


@dataclass(frozen=True)
class Verdict:
    """Outcome of a sampled check: confirmed, or refuted with a witness."""

    confirmed: bool
    sample_count: int
    witness: np.ndarray | None = None
    residue: float = 0.0

    def __bool__(self):
        return self.confirmed


@dataclass
class CurveBundle:
    t_samples: np.ndarray
    curves: np.ndarray  # shape (m, len(t_samples))
    arrangement: str = "analytic-continuation"
    refinements: int = 0

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        m = self.curves.shape[0]
        w.writerow(["t"] + [f"lambda_{k + 1}" for k in range(m)])
        for i, t in enumerate(self.t_samples):
            w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in self.curves[:, i]])
        return buf.getvalue()

    def is_strictly_increasing(self):
        return bool(np.all(np.diff(self.curves, axis=1) > 0))

    def level_crossings(self, s, value_at):
        """Parameter where each curve reaches level ``s``.

        ``value_at(t)`` must return the sorted eigenvalue list at ``t``; the
        crossing is refined by bisection, following the curve through the
        member of the multiset nearest to the linear interpolant.
        """
        out = []
        t = self.t_samples
        for curve in self.curves:
            idx = np.nonzero((curve[:-1] - s) * (curve[1:] - s) <= 0)[0]
            if len(idx) == 0:
                out.append(math.nan)
                continue
            i = idx[0]
            lo, hi = t[i], t[i + 1]
            vlo, vhi = curve[i], curve[i + 1]

            def follow(tt):
                guess = vlo + (vhi - vlo) * (tt - t[i]) / (t[i + 1] - t[i])
                vals = value_at(tt)
                return vals[np.argmin(np.abs(vals - guess))] - s

            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if follow(mid) > 0:
                    hi = mid
                else:
                    lo = mid
                if hi - lo < 1e-14 * (1 + abs(mid)):
                    break
            out.append(0.5 * (lo + hi))
        return np.array(out)


def _is_spectral(p):
    return isinstance(p, SpectralPoly)


def _check_direction(p, a):
    if a is None:
        return
    a = np.asarray(a, dtype=float)
    if a.shape != np.shape(p.direction) or not np.allclose(a, p.direction, rtol=1e-12, atol=1e-12):
        raise ValueError("this spectral object carries a fixed direction; pass a=None or that direction")


def direction_of(p, a=None):
    if _is_spectral(p):
        _check_direction(p, a)
        return np.asarray(p.direction, dtype=float)
    if a is None:
        raise ValueError("a direction is required for monomial polynomials")
    return np.asarray(a, dtype=float)


def value(p, x):
    return evaluate(p, x) if isinstance(p, MonomialPoly) else p.value(x)


def oriented(p, a):
    """Return p, or -p when p(a) < 0 (the flip is recorded in provenance)."""
    pa = evaluate(p, a)
    if abs(pa) <= degeneracy_threshold(p, a):
        raise DegenerateDirection(f"p(a) = {pa:g} is zero within tolerance")
    return p.negated() if pa < 0 else p


# -- root extraction ----------------------------------------------------------

def _companion_roots(coeffs):
    """Roots of each row of ``coeffs`` (highest first), via balanced companion eigenvalues."""
    c = coeffs / coeffs[..., :1]
    m = c.shape[-1] - 1
    if m == 1:
        return (-c[..., 1:]).astype(complex)
    comp = np.zeros(c.shape[:-1] + (m, m))
    comp[..., 0, :] = -c[..., 1:]
    idx = np.arange(m - 1)
    comp[..., idx + 1, idx] = 1.0
    return np.linalg.eigvals(comp)


def _accept_row(z, tol):
    """Turn one row of roots into real values, merging split multiple roots.

    Returns (real roots, max discarded imaginary part, effective tolerance) or
    raises NotReal with the worst unexplained imaginary part.
    """
    m = len(z)
    re = z.real.copy()
    simple_ok = np.abs(z.imag) <= tol * (1 + np.abs(z.real))
    used_tol = tol
    handled = simple_ok.copy()
    for i in range(m):
        if handled[i]:
            continue
        order = np.argsort(np.abs(z - z[i]))
        merged = False
        for k in range(2, m + 1):
            S = order[:k]
            c = z[S].mean()
            rad = np.max(np.abs(z[S] - c))
            allowed = 4.0 * (1 + abs(c.real)) * CLUSTER_EPS ** (1.0 / k)
            if abs(c.imag) <= tol * (1 + abs(c.real)) and rad <= allowed:
                re[S] = c.real
                handled[S] = True
                used_tol = max(used_tol, allowed / (1 + abs(c.real)))
                merged = True
                break
        if not merged:
            raise NotReal(f"root {z[i]:.3g} is not real", residue=float(abs(z[i].imag)))
    return np.sort(re), float(np.max(np.abs(z.imag) / (1 + np.abs(z.real)))), used_tol


def _roots_to_eigen(coeffs, tol):
    """Eigenvalues (= minus roots) for a single restriction polynomial."""
    z = _companion_roots(np.asarray(coeffs, dtype=float)[None, :])[0]
    roots, imag, used = _accept_row(z, tol)
    return np.sort(-roots), imag, used


def eigenvalues(p, a, x, tol=DEFAULT_TOL):
    """Sorted a-eigenvalues of x as an ``EigenList``."""
    if _is_spectral(p):
        _check_direction(p, a)
        vals = np.asarray(p.eigen(np.asarray(x, dtype=float)), dtype=float)
        return EigenList(np.sort(vals), 0.0, tol)
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.shape != (p.dim,) or a.shape != (p.dim,):
        raise DimensionMismatch(f"vectors must have length {p.dim}")
    pa = evaluate(p, a)
    if abs(pa) <= degeneracy_threshold(p, a):
        raise DegenerateDirection(f"p(a) = {pa:g} is zero within tolerance")
    coeffs = restriction_coefficients(p, a, x)
    try:
        vals, imag, used = _roots_to_eigen(coeffs, tol)
    except NotReal as exc:
        exc.x = x
        raise
    return EigenList(vals, imag, used)


def eigenvalues_batch(p, a, X, tol=DEFAULT_TOL):
    """Eigenvalues for a stack of points.

    Returns ``(values, ok)`` with ``values`` of shape (N, m) (NaN rows where
    the roots were not accepted as real) and boolean mask ``ok``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if _is_spectral(p):
        _check_direction(p, a)
        vals = np.sort(np.asarray(p.eigen(X), dtype=float), axis=-1)
        return vals, np.ones(len(X), dtype=bool)
    a = np.asarray(a, dtype=float)
    pa = evaluate(p, a)
    if abs(pa) <= degeneracy_threshold(p, a):
        raise DegenerateDirection(f"p(a) = {pa:g} is zero within tolerance")
    coeffs = restriction_coefficients(p, a, X)
    z = _companion_roots(coeffs)
    out = np.full(z.shape, np.nan)
    ok = np.zeros(len(X), dtype=bool)
    simple = np.all(np.abs(z.imag) <= tol * (1 + np.abs(z.real)), axis=-1)
    out[simple] = np.sort(-z[simple].real, axis=-1)
    ok[simple] = True
    for i in np.nonzero(~simple)[0]:
        try:
            roots, _, _ = _accept_row(z[i], tol)
        except NotReal:
            continue
        out[i] = np.sort(-roots)
        ok[i] = True
    return out, ok


# -- derived scalar quantities -------------------------------------------------

def elementary_symmetric(lams):
    """[sigma_1, ..., sigma_m] of the given values (vectorised over leading axes)."""
    lams = np.asarray(lams, dtype=float)
    m = lams.shape[-1]
    sig = np.zeros(lams.shape[:-1] + (m + 1,))
    sig[..., 0] = 1.0
    for j in range(m):
        lam = lams[..., j]
        sig[..., 1:j + 2] = sig[..., 1:j + 2] + lam[..., None] * sig[..., 0:j + 1]
    return sig[..., 1:]


def shift_identity_check(p, a, x, t, tol=DEFAULT_TOL):
    """max_k |lambda_k(t a + x) - (t + lambda_k(x))|."""
    a_ = direction_of(p, a)
    x = np.asarray(x, dtype=float)
    lhs = eigenvalues(p, a, t * a_ + x, tol).values
    rhs = t + eigenvalues(p, a, x, tol).values
    return float(np.max(np.abs(lhs - rhs)))


def sphere_samples(rng, count, dim):
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _probe_points(dim, rng, sample_count):
    eye = np.eye(dim)
    basis = np.concatenate([eye, -eye])
    pairs = [basis[i] + basis[j] for i in range(len(basis)) for j in range(i + 1, len(basis))]
    pairs = [v for v in pairs if np.any(v)]
    pts = [basis]
    if pairs:
        pts.append(np.array(pairs))
    if sample_count:
        pts.append(sphere_samples(rng, sample_count, dim))
    return np.concatenate(pts)


def _spectral_restriction_residue(p, x):
    """How far the recipe eigenvalues are from explaining t -> p(t a + x).

    A degree-m polynomial is fixed by m+1 values, so agreement at m+1 probe
    values of t shows that all m roots are real and equal to the recipe.
    """
    a = np.asarray(p.direction, dtype=float)
    lam = np.asarray(p.eigen(x), dtype=float)
    m = p.degree
    pa = p.value(a)
    scale = 1.0 + np.max(np.abs(lam))
    ts = scale * np.cos(np.pi * (np.arange(m + 1) + 0.5) / (m + 1))
    ref = abs(pa) * (2.0 * scale) ** m
    worst = 0.0
    for t in ts:
        lhs = p.value(t * a + x)
        rhs = pa * np.prod(t + lam)
        worst = max(worst, abs(lhs - rhs) / ref)
    return worst


def is_hyperbolic(p, a=None, sample_count=200, tol=DEFAULT_TOL, rng=None):
    """Sampled hyperbolicity test in direction ``a``.

    Probes the +/- basis vectors, their pairwise sums, and ``sample_count``
    uniform points on the unit sphere; the first failure is the witness.
    """
    rng = np.random.default_rng(rng)
    pts = _probe_points(p.dim, rng, sample_count)
    if _is_spectral(p):
        _check_direction(p, a)
        for x in pts:
            r = _spectral_restriction_residue(p, x)
            if not r <= 1e-8:
                return Verdict(False, len(pts), x, float(r))
        return Verdict(True, len(pts))
    a = np.asarray(a, dtype=float)
    if evaluate(p, a) <= degeneracy_threshold(p, a):
        raise DegenerateDirection("is_hyperbolic requires p(a) > 0")
    coeffs = restriction_coefficients(p, a, pts)
    z = _companion_roots(coeffs)
    for x, row in zip(pts, z):
        try:
            _accept_row(row, tol)
        except NotReal as exc:
            return Verdict(False, len(pts), x, exc.residue)
    return Verdict(True, len(pts))


def rank_profile(p, a, x, tol=None):
    x = np.asarray(x, dtype=float)
    lam = eigenvalues(p, a, x).values
    if tol is None:
        tol = 1e-8 * (1 + np.linalg.norm(x))
    plus = int(np.sum(lam > tol))
    minus = int(np.sum(lam < -tol))
    return RankProfile(plus, minus, len(lam) - plus - minus)


def trace_a(p, a, x, path="eigen"):
    """Sum of the a-eigenvalues; ``path='derivative'`` uses p'_x(a) / p(a)."""
    x = np.asarray(x, dtype=float)
    if path == "eigen":
        return float(np.sum(eigenvalues(p, a, x).values))
    if path == "derivative":
        if _is_spectral(p):
            raise ValueError("derivative path needs a monomial polynomial")
        from .poly_core import directional_derivative
        return evaluate(directional_derivative(p, x), a) / evaluate(p, a)
    raise ValueError(f"unknown path {path!r}")


def sigma_values(p, a, x):
    """[sigma_1, ..., sigma_m] of lambda(x), read off the restriction coefficients."""
    x = np.asarray(x, dtype=float)
    if _is_spectral(p):
        _check_direction(p, a)
        return elementary_symmetric(p.eigen(x))
    pa = evaluate(p, a)
    if abs(pa) <= degeneracy_threshold(p, a):
        raise DegenerateDirection(f"p(a) = {pa:g} is zero within tolerance")
    c = restriction_coefficients(p, a, x)
    return c[..., 1:] / c[..., :1]


# -- eigenvalue curves along a line ---------------------------------------------

def track_curves(p, a, b, x, t_min, t_max, steps, tol=DEFAULT_TOL):
    """Follow lambda(x + t b) for t in [t_min, t_max] as m analytic curves.

    Values are matched between samples by a linear predictor and 1-D optimal
    assignment; a step is halved whenever the predictor error exceeds half
    the smallest gap between roots.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    lam_b = eigenvalues(p, a, b, tol).values
    if not lam_b[0] > 1e-8 * np.linalg.norm(b):
        raise ConeViolation("b must lie in the Garding cone")

    def at(t):
        return eigenvalues(p, a, x + t * b, tol).values

    grid = np.linspace(t_min, t_max, steps)
    floor = 1e-9 * (t_max - t_min)
    scale = 1.0 + np.max(np.abs(at(t_min)))
    prev_t, cur = grid[0], at(grid[0])
    prev_vals = None  # values one accepted step earlier, for the predictor
    prev_prev_t = None
    curves = [cur.copy()]
    refinements = 0
    for target in grid[1:]:
        while prev_t < target:
            h = target - prev_t
            while True:
                t_new = prev_t + h
                new = at(t_new)
                if prev_vals is None:
                    pred = cur
                else:
                    pred = cur + (cur - prev_vals) * (h / (prev_t - prev_prev_t))
                order = np.argsort(pred, kind="stable")
                matched = np.empty_like(new)
                matched[order] = new  # new is sorted; pair sorted predictions with it
                gap_pred = np.max(np.abs(matched - pred))
                gaps = np.diff(new)
                min_gap = np.min(gaps) if len(gaps) else np.inf
                if gap_pred <= max(0.5 * min_gap, 1e-10 * scale):
                    break
                h *= 0.5
                refinements += 1
                if h < floor:
                    raise TrackingAmbiguous(f"could not resolve a crossing near t = {prev_t:.6g}", t=prev_t)
            prev_vals, prev_prev_t = cur, prev_t
            cur, prev_t = matched, t_new
        curves.append(cur.copy())
    return CurveBundle(grid, np.array(curves).T, refinements=refinements)
