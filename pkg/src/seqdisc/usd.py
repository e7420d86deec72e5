"""Unambiguous discrimination of an equal-overlap family with tunable post-states.

Outcome labels follow the usual convention: ``0`` is the inconclusive
(failure) outcome and ``k = 1..N`` identifies state ``k``.  Operator stacks
are indexed the same way, ``povm[0]`` being the failure element.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError, PositivityError
from .linalg import as_symmetric, sym_eigen
from .states import EqualOverlap, StateFamily, build_equal_overlap, reciprocal_generic

PARAM_TOL = 1e-12


def max_c(n, s):
    """Largest detection constant keeping the failure element positive."""
    return (1 + s * (n - 2)) / (1 + s * (n - 1))


def _own_overlap_sq(n, s):
    return (1 - s) * (1 + (n - 1) * s) / (1 + (n - 2) * s)


def failure_prob_from_c(n, s, c):
    if c < -PARAM_TOL or c > max_c(n, s) + PARAM_TOL:
        raise InvalidParameterError(f"c={c!r} outside [0, {max_c(n, s)!r}]")
    return 1 - c * _own_overlap_sq(n, s)


def c_from_failure_prob(n, s, q):
    return (1 - q) / _own_overlap_sq(n, s)


def povm_from_duals(duals, consts, dim):
    """Stack ``[I - sum_j c_j |d_j><d_j|, c_1 |d_1><d_1|, ...]``."""
    n = duals.shape[0]
    povm = np.empty((n + 1, dim, dim))
    for j in range(n):
        povm[j + 1] = consts[j] * np.outer(duals[j], duals[j])
    povm[0] = np.eye(dim) - povm[1:].sum(axis=0)
    return povm


def kraus_from_duals(post, duals, detect_amp, fail_amp):
    """``A_j = detect_amp[j] |phi_j><d_j|`` and ``A_0 = sum_j fail_amp[j] |phi_j><d_j|``."""
    n, dim = duals.shape
    kraus = np.empty((n + 1, dim, dim))
    for j in range(n):
        kraus[j + 1] = detect_amp[j] * np.outer(post[j], duals[j])
    kraus[0] = np.einsum("j,ja,jb->ab", fail_amp, post, duals)
    return kraus


def _null_basis(vectors, dim, tol=1e-10):
    """Orthonormal basis (rows) of the complement of the span of ``vectors``."""
    eig = sym_eigen(vectors.T @ vectors)
    scale = max(float(eig.values[-1]), 1.0)
    return eig.vectors[:, eig.values <= tol * scale].T


def complete_failure_kraus(kraus0, in_vectors, out_vectors):
    """Extend ``A_0`` by an isometry from span(in)^perp into span(out)^perp.

    Needed when the ambient space is larger than the span of the family: the
    failure element then acts as the identity on the complement, and this
    term reproduces it without touching any family state.
    """
    dim = kraus0.shape[0]
    src = _null_basis(in_vectors, dim)
    if src.shape[0] == 0:
        return kraus0
    dst = _null_basis(out_vectors, dim)[: src.shape[0]]
    return kraus0 + dst.T @ src


def sandwich(ops, left, right):
    """``out[k, i, j] = <left_i| ops[k] |right_j>`` for a stack of operators."""
    return np.einsum("ia,kab,jb->kij", left, ops, right)


def povm_residuals(povm, kraus, family):
    """Worst-case deviations from the measurement invariants.

    Keys: ``completeness``, ``kraus``, ``unambiguity`` (max-abs residuals) and
    ``min_eigenvalues`` (one per POVM element).
    """
    dim = povm.shape[1]
    out = {
        "completeness": float(np.max(np.abs(povm.sum(axis=0) - np.eye(dim)))),
        "min_eigenvalues": [float(sym_eigen(p).values[0]) for p in povm],
    }
    if kraus is not None:
        ktk = np.einsum("kab,kac->kbc", kraus, kraus)
        out["kraus"] = float(np.max(np.abs(ktk - povm)))
    diag = np.einsum("ja,kab,jb->jk", family.vectors, povm[1:], family.vectors)
    offdiag = ~np.eye(family.n, dtype=bool)
    out["unambiguity"] = float(np.max(np.abs(diag[offdiag]))) if family.n > 1 else 0.0
    return out


def _post_family(n, t, dim):
    fam = build_equal_overlap(n, t, allow_degenerate=True)
    if dim > n:
        vectors = np.zeros((n, dim))
        vectors[:, :n] = fam.vectors
        fam = StateFamily(fam.spec, vectors, fam.gram)
    return fam


@dataclass(frozen=True, eq=False)
class UsdMeasurement:
    povm: np.ndarray
    kraus: np.ndarray
    input_family: StateFamily
    post_family: StateFamily
    duals: np.ndarray
    c: float
    q: float
    t: float
    a: float
    r: float

    @property
    def n(self):
        return self.input_family.n

    @property
    def terminal(self):
        return self.t >= 1.0

    def outcome_probabilities(self, state):
        """Return ``(probs, amplitudes)`` for outcomes ``0..N``; ``amplitudes[k] = A_k state``."""
        amps = self.kraus @ np.asarray(state, dtype=float)
        return np.einsum("ka,ka->k", amps, amps), amps

    def residuals(self):
        out = povm_residuals(self.povm, self.kraus, self.input_family)
        fail = np.einsum("ai,aj->ij", self.kraus[0] @ self.input_family.vectors.T,
                         self.kraus[0] @ self.input_family.vectors.T)
        expected = np.full((self.n, self.n), self.q * self.t)
        np.fill_diagonal(expected, self.q)
        out["failure_matrix"] = float(np.max(np.abs(fail - expected)))
        return out

    def to_dict(self):
        return {
            "kind": "usd_equal",
            "c": self.c, "q": self.q, "t": self.t, "a": self.a, "r": self.r,
            "povm": self.povm.tolist(),
            "kraus": self.kraus.tolist(),
            "input_family": self.input_family.to_dict(),
            "post_family": self.post_family.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        family = StateFamily.from_dict(d["input_family"])
        return cls(
            povm=np.array(d["povm"], dtype=float),
            kraus=np.array(d["kraus"], dtype=float),
            input_family=family,
            post_family=StateFamily.from_dict(d["post_family"]),
            duals=reciprocal_generic(family).vectors,
            c=d["c"], q=d["q"], t=d["t"], a=d["a"], r=d["r"],
        )


def build_measurement(family, target_q, post_overlap=None):
    """Equal-overlap USD measurement with failure probability ``target_q``.

    The post-measurement states have pairwise overlap ``t = s / target_q``
    (``t = 1`` when ``target_q == s``).  Pass ``post_overlap`` to pin ``t``
    explicitly; this is only needed in the orthogonal case ``s == 0``, where
    ``target_q * t == s`` holds for any ``t`` once ``target_q == 0``.
    """
    spec = family.spec
    if not isinstance(spec, EqualOverlap):
        raise InvalidParameterError("build_measurement requires an equal-overlap family")
    n, s = spec.n, float(spec.s)
    target_q = float(target_q)
    if target_q < s - PARAM_TOL:
        raise PositivityError(
            f"target_q={target_q!r} below the positivity floor s={s!r}",
            min_eigenvalue=target_q - s)
    if target_q > 1 + PARAM_TOL:
        raise InvalidParameterError(f"target_q={target_q!r} exceeds 1")
    target_q = min(max(target_q, s), 1.0)
    if post_overlap is None:
        t = 1.0 if target_q == s else s / target_q
    else:
        t = float(post_overlap)
        if not 0 <= t <= 1 or abs(target_q * t - s) > PARAM_TOL:
            raise InvalidParameterError(
                f"post_overlap={t!r} inconsistent with q*t = s (q={target_q!r}, s={s!r})")
    t = min(t, 1.0)

    rec = reciprocal_generic(family)
    r = float(np.mean(rec.r_values))
    c = (1 - target_q) / r
    a = np.sqrt(target_q / r)
    dim = family.ambient_dim
    post = _post_family(n, t, dim)
    povm = povm_from_duals(rec.vectors, np.full(n, c), dim)
    povm[0] = as_symmetric(povm[0])
    kraus = kraus_from_duals(post.vectors, rec.vectors, np.full(n, np.sqrt(c)), np.full(n, a))
    kraus[0] = complete_failure_kraus(kraus[0], family.vectors, post.vectors)
    return UsdMeasurement(povm, kraus, family, post, rec.vectors, float(c), target_q,
                          float(t), float(a), r)


class PovmCheck(NamedTuple):
    ok: bool
    min_eigenvalue: float
    c: float
    c_max: float


def povm_from_c(family, c):
    """Raw POVM for a given detection constant, no Kraus operators; may be invalid."""
    rec = reciprocal_generic(family)
    return povm_from_duals(rec.vectors, np.full(family.n, float(c)), family.ambient_dim)


def check_positivity(family, c, tol=1e-10):
    povm = povm_from_c(family, c)
    lam = float(sym_eigen(povm[0]).values[0])
    spec = family.spec
    return PovmCheck(lam >= -tol, lam, float(c), max_c(spec.n, spec.s))


class MeasurementOutcome(NamedTuple):
    label: int
    post_state: np.ndarray


def sample_outcome(probs, u):
    """Inverse-CDF pick over outcomes ``1..K-1``; any leftover mass goes to ``0``.

    If outcome ``0`` has zero weight the leftover (rounding-level) mass goes to
    the last outcome with positive weight instead.
    """
    acc = 0.0
    last = 0
    for k in range(1, len(probs)):
        if probs[k] > 0.0:
            last = k
        acc += probs[k]
        if u < acc:
            return k
    return 0 if probs[0] > 0.0 else last


def measure(meas, state_index, rng):
    """Measure input state ``state_index`` (1-based) once."""
    if not 1 <= state_index <= meas.n:
        raise InvalidParameterError(f"state_index {state_index} outside 1..{meas.n}")
    probs, amps = meas.outcome_probabilities(meas.input_family.vectors[state_index - 1])
    k = sample_outcome(probs, rng.random())
    post = amps[k] / np.linalg.norm(amps[k])
    return MeasurementOutcome(k, post)
