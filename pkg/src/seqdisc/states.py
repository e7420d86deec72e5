"""Equal-overlap and two-class state families and their dual (reciprocal) sets.

Vectors are stored as the rows of a 2-D array.  State ``j`` of the
documentation (1-based) is row ``j - 1``.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidSpecError, NumericalFailure
from .linalg import gram, sym_eigen

INDEPENDENCE_TOL = 1e-12


def _check_overlap(name, value, allow_one):
    if not np.isfinite(value) or value < 0 or value > 1 or (value == 1 and not allow_one):
        bound = "[0, 1]" if allow_one else "[0, 1)"
        raise InvalidSpecError(f"{name}={value!r} outside {bound}")


@dataclass(frozen=True)
class EqualOverlap:
    n: int
    s: float
    allow_degenerate: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidSpecError(f"N must be an integer >= 2, got {self.n!r}")
        _check_overlap("s", self.s, self.allow_degenerate)

    def target_gram(self):
        g = np.full((self.n, self.n), float(self.s))
        np.fill_diagonal(g, 1.0)
        return g

    def to_dict(self):
        return {"variant": "equal", "n": int(self.n), "s": float(self.s)}


@dataclass(frozen=True)
class TwoSetOverlap:
    """States ``1..m`` carry amplitude ``s1`` on the shared direction, ``m+1..n`` carry ``s2``."""

    n: int
    m: int
    s1: float
    s2: float
    allow_degenerate: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidSpecError(f"N must be an integer >= 2, got {self.n!r}")
        if int(self.m) != self.m or not 1 <= self.m <= self.n - 1:
            raise InvalidSpecError(f"M must satisfy 1 <= M <= N-1, got M={self.m!r}, N={self.n}")
        _check_overlap("s1", self.s1, self.allow_degenerate)
        _check_overlap("s2", self.s2, self.allow_degenerate)

    def amplitudes(self):
        return np.array([self.s1] * self.m + [self.s2] * (self.n - self.m), dtype=float)

    def target_gram(self):
        a = self.amplitudes()
        g = np.outer(a, a)
        np.fill_diagonal(g, 1.0)
        return g

    def to_dict(self):
        return {"variant": "twoset", "n": int(self.n), "m": int(self.m),
                "s1": float(self.s1), "s2": float(self.s2)}


def spec_from_dict(d):
    if d["variant"] == "equal":
        return EqualOverlap(d["n"], d["s"], allow_degenerate=True)
    if d["variant"] == "twoset":
        return TwoSetOverlap(d["n"], d["m"], d["s1"], d["s2"], allow_degenerate=True)
    raise InvalidSpecError(f"unknown variant {d['variant']!r}")


@dataclass(frozen=True, eq=False)
class StateFamily:
    spec: object
    vectors: np.ndarray
    gram: np.ndarray

    @property
    def n(self):
        return self.vectors.shape[0]

    @property
    def ambient_dim(self):
        return self.vectors.shape[1]

    @property
    def terminal(self):
        """True when the family is linearly dependent (no further USD possible)."""
        return bool(sym_eigen(self.gram).values[0] <= INDEPENDENCE_TOL)

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(),
            "ambient_dim": int(self.ambient_dim),
            "vectors": self.vectors.tolist(),
            "gram": self.gram.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        vectors = np.array(d["vectors"], dtype=float)
        if vectors.shape[1] != d["ambient_dim"]:
            raise InvalidSpecError("ambient_dim does not match vector length")
        return cls(spec_from_dict(d["spec"]), vectors, gram(vectors))


def _from_gram(spec, g):
    if spec.s == 1.0:
        # Rank-one limit of the Cholesky factor: every state is the first axis.
        vectors = np.zeros((spec.n, spec.n))
        vectors[:, 0] = 1.0
    else:
        vectors = np.linalg.cholesky(g)
    return StateFamily(spec, vectors, gram(vectors))


def build_equal_overlap(n, s, *, allow_degenerate=False):
    """N unit vectors in R^N with every pairwise overlap equal to ``s``.

    Rows of the lower Cholesky factor of the target Gram matrix are used as
    the state coordinates.
    """
    spec = EqualOverlap(n, s, allow_degenerate=allow_degenerate)
    return _from_gram(spec, spec.target_gram())


def equal_overlap_from_amplitudes(n, alpha, beta):
    """Alternative equal-overlap family ``(beta|j> + alpha sum_{k!=j} |k>) / norm``.

    Returns the family in the standard basis of R^N; its overlap is
    ``1 - (alpha - beta)**2 / ((n - 1) alpha**2 + beta**2)``.
    """
    alpha, beta = float(alpha), float(beta)
    norm2 = (n - 1) * alpha**2 + beta**2
    if norm2 <= 0:
        raise InvalidSpecError("alpha and beta cannot both vanish")
    s = 1.0 - (alpha - beta) ** 2 / norm2
    vectors = np.full((n, n), alpha)
    np.fill_diagonal(vectors, beta)
    vectors /= np.sqrt(norm2)
    if abs(s) < 1e-15:
        s = 0.0
    # alpha == beta gives identical states (s = 1); opposite signs can give s < 0
    spec = EqualOverlap(n, s)
    return StateFamily(spec, vectors, gram(vectors))


def build_two_set(n, m, s1, s2, *, allow_degenerate=False):
    """Two overlap classes embedded in R^(N+1).

    Axis 0 is the shared all-zero direction, axis ``j`` the single-excitation
    slot of state ``j``: ``eta_j = s_i e_0 + sqrt(1 - s_i**2) e_j``.
    """
    spec = TwoSetOverlap(n, m, s1, s2, allow_degenerate=allow_degenerate)
    amp = spec.amplitudes()
    vectors = np.zeros((n, n + 1))
    vectors[:, 0] = amp
    vectors[np.arange(n), np.arange(1, n + 1)] = np.sqrt(1.0 - amp**2)
    return StateFamily(spec, vectors, gram(vectors))


@dataclass(frozen=True, eq=False)
class ReciprocalSet:
    vectors: np.ndarray
    coefficients: np.ndarray
    """Column ``j`` expands dual ``j`` in the family: ``dual_j = sum_k C[k, j] eta_k``."""
    overlaps_with_own: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def r_values(self):
        return self.overlaps_with_own**2


def reciprocal_generic(family):
    """Dual set via the inverse Gram matrix, normalized, with positive own-overlap."""
    eig = sym_eigen(family.gram)
    if eig.values[0] <= INDEPENDENCE_TOL:
        raise NumericalFailure(
            f"Gram matrix is numerically singular (min eigenvalue {eig.values[0]:.3e})")
    ginv = (eig.vectors / eig.values) @ eig.vectors.T
    # ||sum_k C_kj eta_k||^2 = (C^T G C)_jj = (G^-1)_jj
    coeffs = ginv / np.sqrt(np.diag(ginv))
    vectors = coeffs.T @ family.vectors
    norms = np.linalg.norm(vectors, axis=1)
    vectors /= norms[:, None]
    coeffs = coeffs / norms
    own = np.einsum("ij,ij->i", family.vectors, vectors)
    signs = np.where(own < 0, -1.0, 1.0)
    return ReciprocalSet(vectors * signs[:, None], coeffs * signs, own * signs)


class EqualDuals(NamedTuple):
    d_self: float
    d_other: float
    r: float


def reciprocal_equal_closed_form(n, s):
    """Expansion coefficients of a dual vector in the equal-overlap family, and ``r``."""
    EqualOverlap(n, s)
    d_self = np.sqrt((1 + s * (n - 2)) / ((1 - s) * (1 + (n - 1) * s)))
    d_other = -s * d_self / (1 + s * (n - 2))
    r = (1 - s) * (1 + (n - 1) * s) / (1 + s * (n - 2))
    return EqualDuals(float(d_self), float(d_other), float(r))


class TwoSetDuals(NamedTuple):
    d1: float
    d2: float
    gamma1: float
    gamma2: float
    coefficients: np.ndarray
    """Column ``j`` holds the expansion of dual ``j`` in the family."""


def reciprocal_twoset_closed_form(n, m, s1, s2):
    TwoSetOverlap(n, m, s1, s2)
    a, b = s1 * s1, s2 * s2
    d1 = (1 + b * (n - m - 1)) * (1 - a) + (m - 1) * a * (1 - b)
    d2 = b * (1 - a) * (n - m - 1) + (1 - b) * (1 + a * (m - 1))
    gamma1 = (1 - a) * (d1 + a * (1 - b)) / d1
    gamma2 = (1 - b) * (d2 + b * (1 - a)) / d2
    dj1 = 1.0 / np.sqrt(gamma1)
    dj2 = 1.0 / np.sqrt(gamma2)
    coeffs = np.zeros((n, n))
    for j in range(n):
        if j < m:
            coeffs[:m, j] = -a * (1 - b) / d1 * dj1
            coeffs[m:, j] = -s1 * s2 * (1 - a) / d1 * dj1
            coeffs[j, j] = dj1
        else:
            coeffs[:m, j] = -s1 * s2 * (1 - b) / d2 * dj2
            coeffs[m:, j] = -b * (1 - a) / d2 * dj2
            coeffs[j, j] = dj2
    return TwoSetDuals(float(d1), float(d2), float(gamma1), float(gamma2), coeffs)


def reciprocal_closed_form(family):
    """Dual set assembled from the analytic expansion coefficients."""
    spec = family.spec
    if isinstance(spec, EqualOverlap):
        cf = reciprocal_equal_closed_form(spec.n, spec.s)
        coeffs = np.full((spec.n, spec.n), cf.d_other)
        np.fill_diagonal(coeffs, cf.d_self)
        own = np.full(spec.n, np.sqrt(cf.r))
        meta = {"r": cf.r}
    elif isinstance(spec, TwoSetOverlap):
        cf = reciprocal_twoset_closed_form(spec.n, spec.m, spec.s1, spec.s2)
        coeffs = cf.coefficients
        own = np.sqrt(np.array([cf.gamma1] * spec.m + [cf.gamma2] * (spec.n - spec.m)))
        meta = {"D1": cf.d1, "D2": cf.d2, "Gamma1": cf.gamma1, "Gamma2": cf.gamma2}
    else:
        raise InvalidSpecError(f"unsupported spec {spec!r}")
    vectors = coeffs.T @ family.vectors
    return ReciprocalSet(vectors, coeffs, own, meta)


def biorthogonality(family, duals):
    """Matrix of ``<eta_k|dual_j>``; diagonal for a valid dual set."""
    return family.vectors @ duals.vectors.T

