"""Cone and branch membership, sign-variation classification, edges and norms."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BracketFailure, GardingError, NotOnHyperplane
from .poly_core import directional_derivative, evaluate
from .spectra import direction_of, eigenvalues, sigma_values, trace_a


class Region(str, Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"

    def __str__(self):
        return self.value

    @property
    def member(self):
        """Closed-set membership: inside or on the boundary band."""
        return self is not Region.OUTSIDE


def classify_value(v, tol):
    if v > tol:
        return Region.INSIDE
    if v < -tol:
        return Region.OUTSIDE
    return Region.BOUNDARY


def default_tol(x):
    return 1e-8 * (1.0 + float(np.linalg.norm(x)))


def _check_k(k, m):
    if not 1 <= k <= m:
        raise ValueError(f"branch index k must be in 1..{m}, got {k}")


def in_garding_cone(p, a, x, tol=None):
    x = np.asarray(x, dtype=float)
    tol = default_tol(x) if tol is None else tol
    return bool(eigenvalues(p, a, x).values[0] > tol)


def branch_membership_eigen(p, a, x, k, tol=None):
    """Classify x against F_k = {lambda_k (ascending) >= 0}."""
    x = np.asarray(x, dtype=float)
    _check_k(k, p.degree)
    tol = default_tol(x) if tol is None else tol
    return classify_value(eigenvalues(p, a, x).values[k - 1], tol)


def sign_variation(sigma, zero_tol=None):
    """Number of strict sign changes in ``sigma`` after dropping near-zero entries."""
    s = np.asarray(sigma, dtype=float)
    if zero_tol is None:
        zero_tol = 1e-9 * float(np.max(np.abs(s))) if len(s) else 0.0
    kept = s[np.abs(s) > zero_tol]
    return int(np.sum(np.sign(kept[1:]) != np.sign(kept[:-1])))


def full_sigma(p, a, x):
    return np.concatenate([[1.0], sigma_values(p, a, x)])


def branch_membership_descartes(p, a, x, k, zero_tol=None):
    _check_k(k, p.degree)
    return sign_variation(full_sigma(p, a, x), zero_tol) <= k - 1


@dataclass(frozen=True)
class SignVector:
    entries: tuple

    def __post_init__(self):
        if not self.entries or self.entries[0] != 1:
            raise ValueError("first entry of a sign vector must be +1")

    @property
    def variation(self):
        return sign_variation(self.entries, zero_tol=0.0)


def sign_orthant_decomposition(p, a, x, zero_tol=None):
    """Signs of (1, sigma_1..sigma_m) and every cell eps with eps_j sigma_j >= 0."""
    s = full_sigma(p, a, x)
    if zero_tol is None:
        zero_tol = 1e-9 * float(np.max(np.abs(s)))
    signs = tuple(int(np.sign(v)) if abs(v) > zero_tol else 0 for v in s)
    choices = [(1,)] + [(v,) if v else (1, -1) for v in signs[1:]]
    cells = [SignVector(tuple(c)) for c in itertools.product(*choices)]
    return SignVector(signs), cells


def dual_branch_membership(p, a, x, k, tol=None):
    """Classify x against the dual branch, which is F_{m-k+1}.

    Also checks the definition of the dual: x is in it exactly when -x is
    not in the interior of F_k.
    """
    x = np.asarray(x, dtype=float)
    m = p.degree
    _check_k(k, m)
    tol = default_tol(x) if tol is None else tol
    lam = eigenvalues(p, a, x).values
    region = classify_value(lam[m - k], tol)
    neg = classify_value(eigenvalues(p, a, -x).values[k - 1], tol)
    if region.member != (neg is not Region.INSIDE):
        raise GardingError(f"dual classification mismatch at x = {x.tolist()}")
    return region


def edge_test(p, x, probe_count=0, tol=1e-10, a=None, rng=None):
    """Whether x lies in the edge of p, i.e. the derivative p'_x vanishes identically.

    With a direction ``a``, the answer is cross-checked against the
    eigenvalue description of the edge (all a-eigenvalues of x vanish), and
    ``probe_count`` random points test p(y + x) = p(y).
    """
    x = np.asarray(x, dtype=float)
    scale = p.coefficient_scale() * (1.0 + np.linalg.norm(x))
    dp = directional_derivative(p, x)
    on_edge = dp.is_zero() or max(abs(c) for c in dp.terms.values()) <= tol * scale
    if a is not None:
        lam = eigenvalues(p, a, x).values
        by_eigen = bool(np.all(np.abs(lam) <= 1e-7 * (1.0 + np.linalg.norm(x))))
        if by_eigen != on_edge:
            raise GardingError("edge test disagrees with the eigenvalue nullity")
    if probe_count and on_edge:
        rng = np.random.default_rng(rng)
        ys = rng.standard_normal((probe_count, p.dim))
        diff = np.abs(evaluate(p, ys + x) - evaluate(p, ys))
        ref = 1.0 + np.abs(evaluate(p, ys))
        if np.any(diff > 1e-8 * ref * (1.0 + np.linalg.norm(x)) ** p.degree):
            raise GardingError("p is not translation invariant along x")
    return bool(on_edge)


def norms_pm(p, a, x):
    """(|x|+, |x|-) = (-lambda_min(x), lambda_max(x)) on the trace-zero hyperplane."""
    x = np.asarray(x, dtype=float)
    tr = trace_a(p, a, x)
    if abs(tr) > 1e-8 * max(np.linalg.norm(x), 1e-300) and np.linalg.norm(x) > 0:
        raise NotOnHyperplane(f"trace of x is {tr:g}, not zero")
    lam = eigenvalues(p, a, x).values
    return max(-float(lam[0]), 0.0), max(float(lam[-1]), 0.0)


def project_to_hyperplane(p, a, x):
    """Remove the a-component so that the a-trace vanishes."""
    a_ = direction_of(p, a)
    x = np.asarray(x, dtype=float)
    return x - trace_a(p, a, x) / p.degree * a_


def graph_function(p, a, member, x0, bracket=None, tol=1e-10, max_expand=40):
    """Height t at which t a + x0 crosses into the Gamma-monotone set ``member``.

    ``member(x) -> bool`` decides membership. The search starts on a bracket
    derived from the norms of x0 and widens it geometrically before bisecting.
    """
    a_ = direction_of(p, a)
    x0 = np.asarray(x0, dtype=float)
    if bracket is None:
        try:
            plus, minus = norms_pm(p, a, x0)
        except NotOnHyperplane:
            plus = minus = float(np.linalg.norm(x0))
        lo, hi = -1.0 - minus, 1.0 + plus
    else:
        lo, hi = map(float, bracket)
    width0 = hi - lo
    for _ in range(max_expand + 1):
        if not member(lo * a_ + x0) and member(hi * a_ + x0):
            break
        if member(lo * a_ + x0):
            lo -= hi - lo
        if not member(hi * a_ + x0):
            hi += hi - lo
    else:
        raise BracketFailure("no boundary crossing found along a; the set looks empty or full on this line")
    if hi - lo > 2.0 ** max_expand * width0:
        raise BracketFailure("bracket grew past its limit")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid * a_ + x0):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def branch_member(p, a, k):
    """Closed-membership predicate for F_k (boundary band counts as inside)."""
    m = p.degree
    _check_k(k, m)

    def member(x):
        return bool(eigenvalues(p, a, x).values[k - 1] >= 0.0)

    return member


def classification_report(p, a, x, tol=None):
    x = np.asarray(x, dtype=float)
    tol = default_tol(x) if tol is None else tol
    lam = eigenvalues(p, a, x).values
    sigma = full_sigma(p, a, x)
    return {
        "x": x.tolist(),
        "lambda": lam.tolist(),
        "sigma": sigma.tolist(),
        "var": sign_variation(sigma),
        "branches": [classify_value(v, tol).value for v in lam],
    }
