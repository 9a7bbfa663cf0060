"""Universal eigenvalue subequations E in R^m.

Each set is described by an *excess* function g, vectorised over the last
axis, with E = {g >= 0}. Every g used here is nondecreasing along e, so the
boundary of E meets each line lambda + t e at most once; ``offset`` returns
the shift t with lambda - t e on that boundary.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .branches import Region
from .errors import BracketFailure, DimensionMismatch, SchemaError
from .spectra import Verdict

_CODES = np.array([Region.OUTSIDE, Region.BOUNDARY, Region.INSIDE], dtype=object)


def _bisect_offset(g, lam, iters=80, max_expand=60):
    """Vectorised root of t -> g(lam - t e), which is nonincreasing in t."""
    lam = np.asarray(lam, dtype=float)
    e = np.ones(lam.shape[-1])
    scale = 1.0 + np.max(np.abs(lam), axis=-1)
    lo, hi = -scale.copy(), scale.copy()
    for _ in range(max_expand):
        bad_lo = g(lam - lo[..., None] * e) < 0
        bad_hi = g(lam - hi[..., None] * e) > 0
        if not (np.any(bad_lo) or np.any(bad_hi)):
            break
        width = hi - lo
        lo = np.where(bad_lo, lo - width, lo)
        hi = np.where(bad_hi, hi + width, hi)
    else:
        raise BracketFailure("E looks empty or all of R^m along e")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = g(lam - mid[..., None] * e) >= 0
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def _sorted_column(values, k):
    return np.sort(values, axis=-1)[..., k - 1]


def _elem_sym_e_eigen(lam, p):
    """e-eigenvalues of sigma_p at lam: roots of sigma_p(lam + t e) in -t."""
    from .spectra import _companion_roots, elementary_symmetric
    m = lam.shape[-1]
    sig = np.concatenate([np.ones(lam.shape[:-1] + (1,)), elementary_symmetric(lam)], axis=-1)
    coeffs = np.stack([math.comb(m - j, p - j) * sig[..., j] for j in range(p + 1)], axis=-1)
    roots = _companion_roots(coeffs)
    return np.sort(-roots.real, axis=-1)


class UniversalSet:
    """A closed, symmetric, orphant-monotone set {g >= 0} in R^m."""

    def __init__(self, variant, m, params, excess, slope=None):
        self.variant, self.m, self.params = variant, int(m), dict(params)
        self._excess = excess
        self.slope = slope  # d/dt g(lam + t e) when constant, else None

    def __repr__(self):
        shown = {k: v for k, v in self.params.items() if not callable(v) and k != "of"}
        return f"UniversalSet({self.variant!r}, m={self.m}, {shown})"

    def _check(self, lam):
        lam = np.asarray(lam, dtype=float)
        if lam.shape[-1] != self.m:
            raise DimensionMismatch(f"expected vectors of length {self.m}")
        return lam

    def excess(self, lam):
        return self._excess(self._check(lam))

    def default_tol(self, lam):
        return 1e-9 * (1.0 + np.max(np.abs(lam), axis=-1))

    def contains(self, lam, tol=None):
        lam = self._check(lam)
        g = self._excess(lam)
        tol = self.default_tol(lam) if tol is None else tol
        code = np.where(g > tol, 2, np.where(g < -tol, 0, 1))
        return _CODES[code] if np.ndim(code) else _CODES[int(code)]

    def offset(self, lam):
        """t with lam - t e on the boundary of E."""
        lam = self._check(lam)
        if self.slope is not None:
            return self._excess(lam) / self.slope
        return _bisect_offset(self._excess, lam)

    @property
    def is_cone(self):
        """Whether E is invariant under positive scaling, so its asymptotic cone is E itself."""
        if self.variant in ("branch", "elem_symmetric_branch", "pconvex_branch", "delta_branch", "positive_orphant"):
            return True
        if self.variant == "halfspace":
            return self.params["c"] == 0.0
        if self.variant == "dual":
            return self.params["of"].is_cone
        return False

    def to_json_dict(self):
        if self.variant in ("graph", "dual"):
            raise SchemaError(f"variant {self.variant!r} has no JSON form")
        params = {k: (list(map(float, v)) if isinstance(v, (list, tuple, np.ndarray)) else v)
                  for k, v in self.params.items()}
        return {"variant": self.variant, "m": self.m, "params": params}


# -- variants -------------------------------------------------------------------

def branch(m, k):
    if not 1 <= k <= m:
        raise ValueError(f"k must be in 1..{m}")
    return UniversalSet("branch", m, {"k": k}, lambda lam: _sorted_column(lam, k), 1.0)


def elem_symmetric_branch(m, p, k):
    if not 1 <= p <= m or not 1 <= k <= p:
        raise ValueError("need 1 <= k <= p <= m")
    return UniversalSet("elem_symmetric_branch", m, {"p": p, "k": k},
                        lambda lam: _elem_sym_e_eigen(lam, p)[..., k - 1], 1.0)


def pconvex_branch(m, p, r):
    subsets = np.array(list(itertools.combinations(range(m), p)))
    N = len(subsets)
    if not 1 <= r <= N:
        raise ValueError(f"r must be in 1..{N}")
    sel = np.zeros((m, N))
    for c, S in enumerate(subsets):
        sel[S, c] = 1.0
    # at least r of the p-fold sums are >= 0
    return UniversalSet("pconvex_branch", m, {"p": p, "r": r},
                        lambda lam: _sorted_column(lam @ sel, N - r + 1), float(p))


def delta_branch(m, delta, k):
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not 1 <= k <= m:
        raise ValueError(f"k must be in 1..{m}")

    def g(lam):
        return _sorted_column(lam + delta * lam.sum(axis=-1, keepdims=True), k)

    return UniversalSet("delta_branch", m, {"delta": float(delta), "k": k}, g, 1.0 + m * delta)


def special_lagrangian(m, c):
    if not -m * math.pi / 2 < c < m * math.pi / 2:
        raise ValueError("c must lie in (-m pi/2, m pi/2)")
    return UniversalSet("special_lagrangian", m, {"c": float(c)},
                        lambda lam: np.sum(np.arctan(lam), axis=-1) - c)


def halfspace(w, c):
    w = np.asarray(w, dtype=float)
    we = float(w.sum())
    return UniversalSet("halfspace", len(w), {"w": w.tolist(), "c": float(c)},
                        lambda lam: lam @ w - c, we if we > 0 else None)


def graph(m, f):
    """E = {mu + t e : mu . e = 0, t >= f(mu)} for a Lipschitz symmetric f."""
    def g(lam):
        t = lam.mean(axis=-1)
        return t - f(lam - t[..., None])

    return UniversalSet("graph", m, {"f": f}, g, 1.0)


def positive_orphant(m):
    return branch(m, 1)


def dual_set(E):
    """lam is in the dual exactly when -lam is not in the interior of E."""
    return UniversalSet("dual", E.m, {"of": E}, lambda lam: -E._excess(-lam), E.slope)


_BUILDERS = {
    "branch": lambda m, p: branch(m, p["k"]),
    "elem_symmetric_branch": lambda m, p: elem_symmetric_branch(m, p["p"], p["k"]),
    "pconvex_branch": lambda m, p: pconvex_branch(m, p["p"], p["r"]),
    "delta_branch": lambda m, p: delta_branch(m, p["delta"], p["k"]),
    "special_lagrangian": lambda m, p: special_lagrangian(m, p["c"]),
    "halfspace": lambda m, p: halfspace(p["w"], p["c"]),
}


def from_json_dict(d):
    try:
        return _BUILDERS[d["variant"]](int(d["m"]), d.get("params", {}))
    except KeyError as exc:
        raise SchemaError(f"universal set JSON: unknown variant or missing field {exc}") from None


# -- induced subequations on matrix models ---------------------------------------

def induced_membership(E, model, A, tol=None):
    if E.m != model.degree:
        raise DimensionMismatch(f"E lives in R^{E.m} but the model has degree {model.degree}")
    return E.contains(model.eigen(model.matrix(A)), tol)


# -- structure graph and probes ------------------------------------------------------

def structure_graph(E, lam_perp, tol=1e-9):
    """f(lam_perp): the height t with lam_perp + t e on the boundary of E."""
    lam_perp = np.asarray(lam_perp, dtype=float)
    if np.any(np.abs(lam_perp.sum(axis=-1)) > 1e-8 * (1 + np.max(np.abs(lam_perp)))):
        raise DimensionMismatch("lam_perp must be orthogonal to e")
    return -E.offset(lam_perp)


def boundary_points(E, rng, count, spread=(0.1, 1.0, 10.0)):
    """Random boundary points: hyperplane vectors lifted along e onto the boundary."""
    scales = rng.choice(np.asarray(spread), size=count)
    v = rng.standard_normal((count, E.m)) * scales[:, None]
    v -= v.mean(axis=1, keepdims=True)
    return v - E.offset(v)[:, None]


def sample_members(E, rng, count):
    """Boundary points plus nonnegative orphant offsets (half of them left on the boundary)."""
    pts = boundary_points(E, rng, count)
    push = rng.exponential(1.0, size=(count, E.m)) * (rng.random((count, 1)) < 0.5)
    return pts + push


def _orphant_steps(rng, count, m):
    mu = rng.exponential(1.0, size=(count, m)) * rng.choice([0.01, 1.0, 100.0], size=(count, 1))
    mu[: min(count, m)] = np.eye(m)[: min(count, m)] * 10.0
    return mu


def monotonicity_check(E, sample_count=1000, rng=None):
    """lam in E and mu >= 0 componentwise imply lam + mu in E."""
    rng = np.random.default_rng(rng)
    lam = sample_members(E, rng, sample_count)
    mu = _orphant_steps(rng, sample_count, E.m)
    return _first_failure(E, lam, mu, sample_count)


def delta_monotonicity_check(E, delta, sample_count=1000, rng=None):
    """Same with mu drawn from the delta-widened orphant {mu_k + delta tr mu >= 0}."""
    rng = np.random.default_rng(rng)
    lam = sample_members(E, rng, sample_count)
    nu = _orphant_steps(rng, sample_count, E.m)
    mu = nu - delta * nu.sum(axis=1, keepdims=True) / (1 + E.m * delta)
    return _first_failure(E, lam, mu, sample_count)


def _first_failure(E, lam, mu, n):
    base_ok = E.excess(lam) >= -E.default_tol(lam)
    after = E.excess(lam + mu) < -E.default_tol(lam + mu)
    bad = np.nonzero(base_ok & after)[0]
    if len(bad):
        i = bad[0]
        return Verdict(False, n, np.stack([lam[i], mu[i]]), float(E.excess(lam[i] + mu[i])))
    return Verdict(True, n)


def _lift(E, v):
    v = np.asarray(v, dtype=float)
    v = v - v.mean()
    return v - float(E.offset(v[None, :])[0])


def _worst_midpoint(E, lam):
    """Most negative excess at (lam + sigma lam)/2 over the permutations sigma."""
    best, arg = np.inf, None
    for perm in itertools.permutations(range(E.m)):
        mu = lam[list(perm)]
        g = float(E.excess(0.5 * (lam + mu)))
        if g < best:
            best, arg = g, mu
    return best, arg


def directed_violation_search(E, seeds, iters=300):
    """Coordinate descent on the midpoint excess over boundary points.

    The second point of each pair is a permutation of the first (E is
    symmetric, so it is also on the boundary). Returns (excess, lam, mu) for
    the most negative midpoint excess found.
    """
    m = E.m
    basis = np.eye(m) - 1.0 / m
    best = (np.inf, None, None)
    for seed in seeds:
        v = np.asarray(seed, dtype=float) - np.mean(seed)
        lam = _lift(E, v)
        cur, mu = _worst_midpoint(E, lam)
        step = 0.25 * (1.0 + np.max(np.abs(v)))
        for _ in range(iters):
            improved = False
            for d in basis:
                for sgn in (1.0, -1.0):
                    trial_v = v + sgn * step * d
                    trial = _lift(E, trial_v)
                    g, tmu = _worst_midpoint(E, trial)
                    if g < cur:
                        v, lam, cur, mu, improved = trial_v, trial, g, tmu, True
            if not improved:
                step *= 0.5
                if step < 1e-10:
                    break
        if cur < best[0]:
            best = (cur, lam, mu)
    return best


def convexity_probe(E, pair_count=10_000, rng=None, directed=True, tol=1e-9):
    """Midpoint convexity test; returns a refuting Verdict with the pair (lam, mu)."""
    rng = np.random.default_rng(rng)
    if directed:
        big = math.tan(math.pi / 2 - 0.1)
        seeds = []
        for L in (big, 3 * big, 10 * big):
            s = np.zeros(E.m)
            s[0] = -L
            seeds.append(s)
        seeds += list(rng.standard_normal((2, E.m)))
        g, lam, mu = directed_violation_search(E, seeds)
        if g < -tol:
            return Verdict(False, pair_count, np.stack([lam, mu]), g)
    done = 0
    chunk = 20_000
    while done < pair_count:
        n = min(chunk, pair_count - done)
        lam = sample_members(E, rng, n)
        mu = sample_members(E, rng, n)
        mid = 0.5 * (lam + mu)
        g = E.excess(mid)
        bad = np.nonzero(g < -tol * (1 + np.max(np.abs(mid), axis=1)))[0]
        if len(bad):
            i = bad[0]
            return Verdict(False, done + i + 1, np.stack([lam[i], mu[i]]), float(g[i]))
        done += n
    return Verdict(True, pair_count)


def lipschitz_check(E, pair_count=200, rng=None):
    """-|y|- <= f(x + y) - f(x) <= |y|+ with |y|+ = -min y, |y|- = max y."""
    rng = np.random.default_rng(rng)
    x = rng.standard_normal((pair_count, E.m))
    y = rng.standard_normal((pair_count, E.m))
    x -= x.mean(axis=1, keepdims=True)
    y -= y.mean(axis=1, keepdims=True)
    d = structure_graph(E, x + y) - structure_graph(E, x)
    plus, minus = -y.min(axis=1), y.max(axis=1)
    bad = np.nonzero((d > plus + 1e-7) | (d < -minus - 1e-7))[0]
    if len(bad):
        return Verdict(False, pair_count, np.stack([x[bad[0]], y[bad[0]]]), float(d[bad[0]]))
    return Verdict(True, pair_count)
