"""Spectrally defined hyperbolic polynomials on symmetric matrices.

Every model is hyperbolic in the identity direction and is evaluated from
symmetric eigendecompositions, never by expanding a determinant. Points are
accepted either as n x n matrices or as upper-triangular coordinate vectors
(the same ordering as ``poly_core.sym_index``).
"""
from __future__ import annotations

import itertools
import json
import math

import numpy as np

from .errors import DimensionMismatch, GardingError, SchemaError
from .poly_core import identity_vector, sym_index, vector_to_sym
from .spectra import EigenList, SpectralPoly, Verdict, sphere_samples

_L_I = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
_L_J = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
_L_K = _L_I @ _L_J


def complex_structure(N):
    """Block-diagonal J on R^N (N even): each 2x2 block is [[0, -1], [1, 0]]."""
    if N % 2:
        raise DimensionMismatch("complex structure needs an even dimension")
    return np.kron(np.eye(N // 2), np.array([[0.0, -1.0], [1.0, 0.0]]))


def quaternion_structures(N):
    """Left multiplication by i, j, k on each 4-block of R^N."""
    if N % 4:
        raise DimensionMismatch("quaternionic structure needs a dimension divisible by 4")
    eye = np.eye(N // 4)
    return np.kron(eye, _L_I), np.kron(eye, _L_J), np.kron(eye, _L_K)


def hermitian_part(A):
    """A_C = (A - J A J) / 2, the part commuting with J."""
    A = np.asarray(A, dtype=float)
    J = complex_structure(A.shape[-1])
    return 0.5 * (A - J @ A @ J)


def skew_part(A):
    """(A + J A J) / 2, the part anti-commuting with J."""
    A = np.asarray(A, dtype=float)
    J = complex_structure(A.shape[-1])
    return 0.5 * (A + J @ A @ J)


def quaternionic_part(A):
    A = np.asarray(A, dtype=float)
    I, J, K = quaternion_structures(A.shape[-1])
    return 0.25 * (A - I @ A @ I - J @ A @ J - K @ A @ K)


def complex_matrix(A_C):
    """The n x n hermitian matrix represented by a J-commuting real 2n x 2n matrix."""
    return A_C[..., 0::2, 0::2] + 1j * A_C[..., 1::2, 0::2]


def skew_moduli(A, rtol=1e-8):
    """mu_1..mu_n >= 0 with the skew part's eigenvalues equal to +/- mu_i."""
    S = skew_part(A)
    w = np.linalg.eigvalsh(S)
    n = w.shape[-1] // 2
    mismatch = np.max(np.abs(w + w[..., ::-1]), axis=-1)
    scale = 1.0 + np.max(np.abs(np.asarray(A)), axis=(-2, -1))
    if np.any(mismatch > rtol * scale):
        raise GardingError(f"skew eigenvalues do not pair as +/-mu (mismatch {np.max(mismatch):.3g})")
    return np.clip(0.5 * (w[..., n:] - w[..., :n][..., ::-1]), 0.0, None)


def _sign_patterns(k):
    return np.array(list(itertools.product((1.0, -1.0), repeat=k)))


def isotropic_eigenvalues(A, p):
    """All tau +/- mu_i1 +/- ... +/- mu_ip over index sets of size p, sorted.

    tau is half the real trace. Values are not normalised; at the identity
    of R^{2n} every entry equals n.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[-1] // 2
    if not 1 <= p <= n:
        raise ValueError(f"p must be in 1..{n}")
    tau = 0.5 * np.trace(A, axis1=-2, axis2=-1)
    mu = skew_moduli(A)
    signs = _sign_patterns(p)
    parts = []
    for S in itertools.combinations(range(n), p):
        parts.append(tau[..., None] + mu[..., list(S)] @ signs.T)
    return np.sort(np.concatenate(parts, axis=-1), axis=-1)


class SpectralModel(SpectralPoly):
    """A polynomial on Sym^2(R^N) given by an eigenvalue map.

    ``kind`` is one of det_real, det_complex, det_quaternionic, trace,
    lagrangian, isotropic. ``n`` is the real, complex or quaternionic size;
    the ambient matrix size ``N`` follows from it.
    """

    KINDS = ("det_real", "det_complex", "det_quaternionic", "trace", "lagrangian", "isotropic")

    def __init__(self, kind, n, p=None):
        if kind not in self.KINDS:
            raise SchemaError(f"unknown model kind {kind!r}")
        n = int(n)
        if n < 1:
            raise SchemaError("n must be positive")
        self.kind, self.n, self.p = kind, n, p
        if kind == "det_real":
            self.N, self.degree = n, n
        elif kind == "det_complex":
            self.N, self.degree = 2 * n, n
        elif kind == "det_quaternionic":
            self.N, self.degree = 4 * n, n
        elif kind == "trace":
            self.N, self.degree = n, 1
        elif kind == "lagrangian":
            if n > 4:
                raise SchemaError("the Lagrangian model is limited to n <= 4")
            self.N, self.degree, self.p = 2 * n, 2 ** n, n
        else:
            if p is None or not 1 <= int(p) <= n:
                raise SchemaError("isotropic model needs 1 <= p <= n")
            self.p = int(p)
            self.N, self.degree = 2 * n, 2 ** self.p * math.comb(n, self.p)
        self.dim = self.N * (self.N + 1) // 2
        self.direction = identity_vector(self.N)

    def __repr__(self):
        extra = f", p={self.p}" if self.kind == "isotropic" else ""
        return f"SpectralModel({self.kind!r}, n={self.n}{extra})"

    def matrix(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim >= 2 and x.shape[-2:] == (self.N, self.N):
            if np.max(np.abs(x - np.swapaxes(x, -1, -2)), initial=0.0) > 1e-12 * (1 + np.max(np.abs(x), initial=0.0)):
                raise SchemaError("matrix is not symmetric")
            return 0.5 * (x + np.swapaxes(x, -1, -2))
        if x.shape[-1] != self.dim:
            raise DimensionMismatch(f"expected {self.N}x{self.N} matrices or vectors of length {self.dim}")
        return vector_to_sym(x, self.N)

    def _raw(self, A):
        k = self.kind
        if k == "det_real":
            return np.linalg.eigvalsh(A)
        if k == "det_complex":
            return np.linalg.eigvalsh(complex_matrix(hermitian_part(A)))
        if k == "det_quaternionic":
            w = np.linalg.eigvalsh(quaternionic_part(A))
            return w.reshape(w.shape[:-1] + (self.n, 4)).mean(axis=-1)
        if k == "trace":
            return np.trace(A, axis1=-2, axis2=-1)[..., None]
        return isotropic_eigenvalues(A, self.p)

    def _normaliser(self):
        return self.n if self.kind in ("trace", "lagrangian", "isotropic") else 1

    def eigen(self, x):
        return np.sort(self._raw(self.matrix(x)) / self._normaliser(), axis=-1)

    def value(self, x):
        A = self.matrix(x)
        if self.kind == "det_real":
            return np.linalg.det(A)
        if self.kind == "det_complex":
            return np.linalg.det(complex_matrix(hermitian_part(A))).real
        return np.prod(self._raw(A), axis=-1)

    def to_json_dict(self):
        d = {"kind": self.kind, "n": self.n}
        if self.kind == "isotropic":
            d["p"] = self.p
        return d


class RecipeModel(SpectralPoly):
    """A model whose eigenvalues are ``recipe(base eigenvalues)``.

    Used for compositions and, in tests, for deliberately broken models.
    """

    def __init__(self, base, recipe, degree, name="recipe"):
        self.base, self.recipe, self.degree, self.name = base, recipe, degree, name
        self.dim, self.direction = base.dim, base.direction
        self.N = getattr(base, "N", None)

    def matrix(self, x):
        return self.base.matrix(x)

    def eigen(self, x):
        return np.sort(self.recipe(self.base.eigen(x)), axis=-1)

    def value(self, x):
        return np.prod(self.eigen(x), axis=-1)


def model_from_json_dict(d):
    try:
        return SpectralModel(d["kind"], d["n"], d.get("p"))
    except KeyError as exc:
        raise SchemaError(f"model JSON is missing field {exc}") from None


def load_model(path):
    with open(path) as fh:
        return model_from_json_dict(json.load(fh))


def load_matrix(obj, N=None):
    """Row-major nested list -> symmetric array; rejects asymmetry above 1e-12."""
    A = np.asarray(obj, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SchemaError("matrix must be square")
    if N is not None and A.shape[0] != N:
        raise SchemaError(f"matrix must be {N}x{N}")
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12:
        raise SchemaError("matrix is not symmetric")
    return A


def lambda_map(model, A):
    return EigenList(model.eigen(model.matrix(A)))


def dg_positivity_check(model, unit_sample_count=200, rng=None, tol=1e-9):
    """Check that every rank-one projection P_e has nonnegative eigenvalues."""
    rng = np.random.default_rng(rng)
    N = model.N
    units = np.concatenate([np.eye(N), sphere_samples(rng, unit_sample_count, N)])
    P = units[:, :, None] * units[:, None, :]
    lam_min = np.asarray(model.eigen(P))[:, 0]
    bad = np.nonzero(lam_min < -tol)[0]
    if len(bad):
        i = bad[0]
        return Verdict(False, len(units), units[i], float(lam_min[i]))
    return Verdict(True, len(units))


def random_symmetric(rng, N, count=None, scale=1.0):
    shape = (N, N) if count is None else (count, N, N)
    G = rng.standard_normal(shape) * scale
    return 0.5 * (G + np.swapaxes(G, -1, -2))


def commuting_orthogonal(rng, n):
    """A random orthogonal 2n x 2n matrix commuting with J (a unitary in real form)."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    U = Q * (np.diag(R) / np.abs(np.diag(R)))
    out = np.zeros((2 * n, 2 * n))
    out[0::2, 0::2] = U.real
    out[1::2, 1::2] = U.real
    out[1::2, 0::2] = U.imag
    out[0::2, 1::2] = -U.imag
    return out


__all__ = [
    "SpectralModel", "RecipeModel", "complex_structure", "quaternion_structures",
    "hermitian_part", "skew_part", "quaternionic_part", "complex_matrix", "skew_moduli",
    "isotropic_eigenvalues", "lambda_map", "dg_positivity_check", "model_from_json_dict",
    "load_model", "load_matrix", "random_symmetric", "commuting_orthogonal", "sym_index",
]
