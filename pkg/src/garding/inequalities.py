"""Gårding and Gurvits inequalities, equality diagnostics, and capacity."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .branches import edge_test
from .errors import ConeViolation, DimensionMismatch
from .poly_core import MonomialPoly, directional_derivative, evaluate, gradient, polarized_value, restriction_coefficients
from .spectra import eigenvalues

EQ_RTOL = 1e-7


@dataclass(frozen=True)
class InequalityReport:
    """lhs <= rhs is the claim; ``slack`` = rhs - lhs and the check passes when slack >= -tol."""

    name: str
    lhs: float
    rhs: float
    slack: float
    tol: float
    equality: bool
    diagnostic: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.slack >= -self.tol

    def to_json_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "tol": self.tol,
                "equality": self.equality, "passed": self.passed, "diagnostic": self.diagnostic}


@dataclass(frozen=True)
class CapacityConfig:
    restarts: int = 8
    max_iter: int = 3000
    grad_tol: float = 1e-10
    seed: int = 0
    spread: float = 2.0  # std of random log-starting points


@dataclass(frozen=True)
class CapacityResult:
    value: float
    minimizer: np.ndarray
    stationarity_residual: float
    restarts_used: int
    converged: bool
    regime: str = "interior"

    def to_json_dict(self):
        return {"value": self.value, "minimizer": self.minimizer.tolist(),
                "stationarity_residual": self.stationarity_residual,
                "restarts_used": self.restarts_used, "converged": self.converged, "regime": self.regime}


def _require_cone(p, a, bs, closed=False):
    """Raise unless every b is in the cone; return 'interior' or 'boundary'."""
    regime = "interior"
    for b in bs:
        b = np.asarray(b, dtype=float)
        if b.shape != (p.dim,):
            raise DimensionMismatch(f"vectors must have length {p.dim}")
        lo = eigenvalues(p, a, b).values[0]
        margin = 1e-8 * np.linalg.norm(b)
        if lo > margin:
            continue
        if closed and lo >= -margin:
            regime = "unvalidated-boundary"
            continue
        raise ConeViolation(f"{b.tolist()} is not in the Garding cone (lambda_min = {lo:.3g})")
    return regime


def _close(lhs, rhs, rtol=EQ_RTOL):
    return abs(rhs - lhs) <= rtol * max(1.0, abs(lhs), abs(rhs))


def pure_power_fit(p, a, b):
    """Relative residual of fitting s, t -> p(s a + t b) by (alpha s + beta t)^m."""
    c = restriction_coefficients(p, b, a)[::-1]  # p(a + t b) = sum_k c_k t^k
    m = p.degree
    alpha = c[0] ** (1.0 / m)
    beta = c[1] / (m * alpha ** (m - 1))
    target = np.array([math.comb(m, k) * alpha ** (m - k) * beta ** k for k in range(m + 1)])
    return float(np.max(np.abs(c - target)) / max(np.max(np.abs(c)), 1e-300))


def garding_basic(p, a, b):
    """p(b) <= p(a)^(1-m) ((1/m) p'_b(a))^m for a, b in the cone."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    _require_cone(p, a, [a, b])
    m = p.degree
    pa = evaluate(p, a)
    lhs = evaluate(p, b)
    rhs = pa ** (1 - m) * (float(gradient(p, a) @ b) / m) ** m
    lam = eigenvalues(p, a, b).values
    equal_eigen = bool(np.ptp(lam) <= 1e-7 * (1 + np.max(np.abs(lam))))
    diag = {"lambda_a(b)": lam.tolist(), "equal_eigenvalues": equal_eigen,
            "pure_power_residual": pure_power_fit(p, a, b)}
    return InequalityReport("garding_basic", lhs, rhs, rhs - lhs, 1e-7 * (1 + abs(rhs)), _close(lhs, rhs), diag)


def proportional_modulo_edge(p, a, bi, bj):
    """Is bi - mu bj in the edge for the mu suggested by eigenvalue ratios?"""
    li = eigenvalues(p, a, bi).values
    lj = eigenvalues(p, a, bj).values
    mu = float(np.mean(li / lj))
    return edge_test(p, np.asarray(bi) - mu * np.asarray(bj), tol=1e-8), mu


def garding_mixed(p, bs, a):
    """prod p(b_i)^(1/m) <= (1/m!) p^(m)_{b_1..b_m}."""
    bs = [np.asarray(b, dtype=float) for b in bs]
    m = p.degree
    if len(bs) != m:
        raise DimensionMismatch(f"need m = {m} vectors")
    _require_cone(p, a, bs)
    lhs = float(np.prod([evaluate(p, b) ** (1.0 / m) for b in bs]))
    rhs = polarized_value(p, bs)
    pairs = [proportional_modulo_edge(p, a, bs[i], bs[j])[0] for i in range(m) for j in range(i + 1, m)]
    diag = {"pairwise_proportional_mod_edge": bool(all(pairs))}
    return InequalityReport("garding_mixed", lhs, rhs, rhs - lhs, 1e-7 * (1 + abs(rhs)), _close(lhs, rhs), diag)


# -- capacity -----------------------------------------------------------------

def _cap_objective(p, B):
    """g(s) = log p(sum e^{s_i} b_i) - sum s_i and its gradient."""
    def f(s):
        w = np.exp(s)
        y = w @ B
        py = evaluate(p, y)
        if not py > 0:
            return np.inf, None
        g = w * (B @ gradient(p, y)) / py - 1.0
        return math.log(py) - float(s.sum()), g

    return f


def _descend(f, s, free, cfg):
    """Gradient descent with Barzilai-Borwein trial steps and Armijo backtracking."""
    val, g = f(s)
    step = 1.0
    prev_s = prev_g = None
    for _ in range(cfg.max_iter):
        gf = np.where(free, g, 0.0)
        gnorm = float(np.max(np.abs(gf)))
        if gnorm <= cfg.grad_tol:
            break
        if prev_s is not None:
            ds, dg = s - prev_s, gf - prev_g
            denom = float(ds @ dg)
            if denom > 0:
                step = float(ds @ ds) / denom
        step = min(max(step, 1e-12), 1e6)
        while True:
            trial = s - step * gf
            tv, tg = f(trial)
            if tv <= val - 1e-4 * step * float(gf @ gf):
                break
            step *= 0.5
            if step < 1e-16:
                return s, val, gf, gnorm
        prev_s, prev_g = s, gf
        s, val, g = trial, tv, tg
    gf = np.where(free, g, 0.0)
    return s, val, gf, float(np.max(np.abs(gf)))


def capacity(p, bs, a, config=CapacityConfig()):
    """inf over t > 0 of p(sum t_i b_i) / prod t_i, in log coordinates with s_m pinned to 0."""
    B = np.array([np.asarray(b, dtype=float) for b in bs])
    m = p.degree
    if len(B) != m:
        raise DimensionMismatch(f"need m = {m} vectors")
    regime = _require_cone(p, a, B, closed=True)
    f = _cap_objective(p, B)
    free = np.arange(m) < m - 1
    rng = np.random.default_rng(config.seed)
    starts = [np.zeros(m)] + [np.where(free, rng.normal(0.0, config.spread, m), 0.0)
                              for _ in range(config.restarts)]
    best = None
    for s0 in starts:
        s, val, _, res = _descend(f, s0, free, config)
        if best is None or val < best[1] - 1e-15 or (abs(val - best[1]) <= 1e-15 and res < best[2]):
            best = (s, val, res)
    s, val, res = best
    return CapacityResult(math.exp(val), np.exp(s), res, len(starts), res <= max(config.grad_tol, 1e-7), regime)


def capacity_grid(p, bs, points=61, span=8.0, zooms=30, shrink=4.0):
    """Grid-search oracle for m <= 3: a points^m log-lattice, then repeated zooms around the best node."""
    B = np.array([np.asarray(b, dtype=float) for b in bs])
    m = p.degree
    if m > 3:
        raise ValueError("the grid oracle is meant for m <= 3")
    center = np.zeros(m)
    half = np.full(m, span)
    best_val = np.inf
    for _ in range(zooms + 1):
        axes = [np.linspace(center[i] - half[i], center[i] + half[i], points) for i in range(m)]
        S = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
        y = np.exp(S) @ B
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.log(np.clip(evaluate(p, y), 1e-300, None)) - S.sum(axis=1)
        i = int(np.argmin(vals))
        if vals[i] <= best_val:
            best_val, center = float(vals[i]), S[i]
        half = half / shrink
    return math.exp(best_val)


def gurvits_two_point(p, a, b):
    """((m-1)^(m-1)/m^m) inf_t p(a + t b)/t <= (1/m) p'_b(a)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    m = p.degree
    if m < 2:
        raise ValueError("needs degree >= 2")
    _require_cone(p, a, [a, b])
    c = restriction_coefficients(p, b, a)  # p(a + t b) as polynomial in t, highest power first

    def h(u):  # log of p(a + e^u b) / e^u
        return math.log(max(np.polyval(c, math.exp(u)), 1e-300)) - u

    us = np.linspace(math.log(1e-8), math.log(1e8), 64)
    vals = [h(u) for u in us]
    i = int(np.clip(np.argmin(vals), 1, len(us) - 2))
    res = minimize_scalar(h, bracket=(us[i - 1], us[i], us[i + 1]), method="golden", tol=1e-10)
    inf_val = math.exp(min(res.fun, vals[int(np.argmin(vals))]))
    lhs = (m - 1) ** (m - 1) / m ** m * inf_val
    rhs = float(gradient(p, a) @ b) / m
    diag = {"argmin_t": math.exp(res.x)}
    return InequalityReport("gurvits_two_point", lhs, rhs, rhs - lhs, 1e-7 * (1 + abs(rhs)), _close(lhs, rhs), diag)


def gurvits_capacity(p, bs, a, config=CapacityConfig()):
    """Cap / m^m <= (1/m!) p^(m)_{b_1..b_m}."""
    m = p.degree
    cap = capacity(p, bs, a, config)
    lhs = cap.value / m ** m
    rhs = polarized_value(p, [np.asarray(b, dtype=float) for b in bs])
    tol = 1e-7 * (1 + abs(rhs)) + abs(lhs) * cap.stationarity_residual
    diag = {"capacity": cap.to_json_dict()}
    return InequalityReport("gurvits_capacity", lhs, rhs, rhs - lhs, tol, _close(lhs, rhs), diag)


def refinement_chain(p, bs, a, config=CapacityConfig()):
    """Jointly check prod p(b_i)^(1/m) <= Cap/m^m <= (1/m!) p^(m)."""
    m = p.degree
    cap = capacity(p, bs, a, config)
    geo = float(np.prod([evaluate(p, np.asarray(b, dtype=float)) ** (1.0 / m) for b in bs]))
    mid = cap.value / m ** m
    top = polarized_value(p, [np.asarray(b, dtype=float) for b in bs])
    tol = 1e-7 * (1 + abs(top)) + abs(mid) * cap.stationarity_residual
    return {"geometric": geo, "capacity_over_m_m": mid, "polarized": top,
            "holds": bool(geo <= mid + tol and mid <= top + tol), "tol": tol}


def capacity_induction_chain(p, bs, a, config=CapacityConfig()):
    """Each inductive step Cap_k(q_k)/k^k <= Cap_(k-1)(q_(k-1)) / (k (k-1)^(k-1)).

    q_k is p differentiated along b_(k+1), ..., b_m. Returns one
    (k, lhs, rhs, holds) tuple per step k = m..2.
    """
    bs = [np.asarray(b, dtype=float) for b in bs]
    m = p.degree
    qs = {m: p}
    for k in range(m - 1, 0, -1):
        qs[k] = directional_derivative(qs[k + 1], bs[k])
    caps = {}
    for k in range(1, m + 1):
        q = qs[k]
        caps[k] = evaluate(q, bs[0]) if k == 1 else capacity(q, bs[:k], a, config).value
    out = []
    for k in range(m, 1, -1):
        lhs = caps[k] / k ** k
        rhs = caps[k - 1] / (k * (k - 1) ** (k - 1))
        out.append((k, lhs, rhs, bool(lhs <= rhs * (1 + 1e-7) + 1e-12)))
    return out


def linear_power(c, m):
    """(c . x)^m, the equality case of the inequalities."""
    c = np.asarray(c, dtype=float)
    d = len(c)
    lin = MonomialPoly(d, 1, {tuple(int(i == j) for i in range(d)): c[j] for j in range(d)})
    return lin ** m
