"""USD measurements for the two-overlap-class family.

Class 1 holds states ``1..M`` and class 2 holds ``M+1..N``.  Each class gets
its own detection constant ``c_i``, failure probability ``q_i`` and
post-measurement amplitude ``t_i``, so the post-states overlap as ``t1**2``,
``t2**2`` and ``t1*t2``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError, PositivityError
from .linalg import as_symmetric, sym_eigen
from .states import (StateFamily, TwoSetOverlap, build_two_set, reciprocal_generic,
                     reciprocal_twoset_closed_form)
from .usd import (PARAM_TOL, complete_failure_kraus, kraus_from_duals, povm_from_duals,
                  povm_residuals, sandwich)


def analytic_failure_spectrum(n, m, s1, s2, c1, c2):
    """Eigenvalues of the failure element in the state-coordinate representation.

    Returns ``(roots, f1, f2, gammas)``: the two roots of the block quadratic,
    the class eigenvalues ``F_i = 1 - Gamma_i c_i - s_i**2`` (multiplicities
    ``M-1`` and ``N-M-1``), and ``(Gamma1, Gamma2)``.
    """
    duals = reciprocal_twoset_closed_form(n, m, s1, s2)
    g1, g2 = duals.gamma1, duals.gamma2
    a, b = s1 * s1, s2 * s2
    f1 = 1 - g1 * c1 - a
    f2 = 1 - g2 * c2 - b
    lin = m * a + (n - m) * b + f1 + f2
    const = f1 * f2 + m * a * f2 + (n - m) * b * f1
    disc = max(lin * lin - 4 * const, 0.0)
    root = np.sqrt(disc)
    big = 0.5 * (lin + root) if lin >= 0 else 0.5 * (lin - root)
    small = const / big if big != 0 else 0.0
    return (min(big, small), max(big, small)), f1, f2, (g1, g2)


@dataclass(frozen=True)
class PositivityReport:
    q1: float
    q2: float
    f1: float
    f2: float
    quadratic_roots: tuple
    quadratic_margin: float
    """``M s1^2 F2 + (N-M) s2^2 F1 + F1 F2``; non-negative whenever both ``F_i`` are."""
    analytic: np.ndarray
    numeric_state_basis: np.ndarray
    numeric_ambient: np.ndarray

    @property
    def min_eigenvalue(self):
        return float(self.numeric_ambient[0])


def positivity_check(n, m, s1, s2, c1, c2, tol=1e-10):
    """Positivity of ``I - sum_j Pi_j`` for detection constants ``(c1, c2)``.

    ``ok`` follows the class floors ``q_i >= s_i**2``; the report carries the
    analytic spectrum next to two numerical spectra of the constructed
    failure element (state-coordinate matrix and orthonormal ambient basis).
    """
    family = build_two_set(n, m, s1, s2)
    roots, f1, f2, (g1, g2) = analytic_failure_spectrum(n, m, s1, s2, c1, c2)
    analytic = np.sort(np.array(list(roots) + [f1] * (m - 1) + [f2] * (n - m - 1)))
    consts = np.array([c1] * m + [c2] * (n - m), dtype=float)
    rec = reciprocal_generic(family)
    povm = povm_from_duals(rec.vectors, consts, family.ambient_dim)
    fail = as_symmetric(povm[0])
    in_states = sandwich(fail[None], family.vectors, family.vectors)[0]
    a, b = s1 * s1, s2 * s2
    q1, q2 = 1 - c1 * g1, 1 - c2 * g2
    report = PositivityReport(
        q1=q1, q2=q2, f1=f1, f2=f2,
        quadratic_roots=roots,
        quadratic_margin=m * a * f2 + (n - m) * b * f1 + f1 * f2,
        analytic=analytic,
        numeric_state_basis=sym_eigen(as_symmetric(in_states, atol=1e-10)).values,
        numeric_ambient=sym_eigen(fail).values,
    )
    ok = q1 >= a - tol and q2 >= b - tol
    return ok, report


@dataclass(frozen=True, eq=False)
class TwoSetUsdMeasurement:
    povm: np.ndarray
    kraus: np.ndarray
    input_family: StateFamily
    post_family: StateFamily
    duals: np.ndarray
    c1: float
    c2: float
    q1: float
    q2: float
    t1: float
    t2: float
    a1: float
    a2: float
    gamma1: float
    gamma2: float

    @property
    def n(self):
        return self.input_family.n

    @property
    def f1(self):
        s1 = self.input_family.spec.s1
        return 1 - self.gamma1 * self.c1 - s1 * s1

    @property
    def f2(self):
        s2 = self.input_family.spec.s2
        return 1 - self.gamma2 * self.c2 - s2 * s2

    @property
    def terminal(self):
        return self.t1 >= 1.0 and self.t2 >= 1.0

    def outcome_probabilities(self, state):
        amps = self.kraus @ np.asarray(state, dtype=float)
        return np.einsum("ka,ka->k", amps, amps), amps

    def residuals(self):
        return povm_residuals(self.povm, self.kraus, self.input_family)

    def to_dict(self):
        return {
            "kind": "usd_twoset",
            "c1": self.c1, "c2": self.c2, "q1": self.q1, "q2": self.q2,
            "t1": self.t1, "t2": self.t2, "a1": self.a1, "a2": self.a2,
            "F1": self.f1, "F2": self.f2,
            "povm": self.povm.tolist(),
            "kraus": self.kraus.tolist(),
            "input_family": self.input_family.to_dict(),
            "post_family": self.post_family.to_dict(),
            "Gamma1": self.gamma1, "Gamma2": self.gamma2,
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
            c1=d["c1"], c2=d["c2"], q1=d["q1"], q2=d["q2"], t1=d["t1"], t2=d["t2"],
            a1=d["a1"], a2=d["a2"], gamma1=d["Gamma1"], gamma2=d["Gamma2"],
        )


def _class_amplitude(s, q, override, name):
    floor = s * s
    if q < floor - PARAM_TOL:
        raise PositivityError(f"target_{name}={q!r} below the positivity floor {floor!r}",
                              min_eigenvalue=q - floor)
    if q > 1 + PARAM_TOL:
        raise InvalidParameterError(f"target_{name}={q!r} exceeds 1")
    q = min(max(q, floor), 1.0)
    if override is None:
        return q, (1.0 if q == floor else s / np.sqrt(q))
    t = float(override)
    if not 0 <= t <= 1 or abs(q * t * t - floor) > PARAM_TOL:
        raise InvalidParameterError(f"post amplitude {t!r} inconsistent with q t^2 = s^2")
    return q, t


def build_twoset_measurement(family, target_q1, target_q2, post_amplitudes=None):
    """Two-class USD measurement with per-class failure probabilities.

    ``t_i = s_i / sqrt(q_i)`` unless ``post_amplitudes=(t1, t2)`` is given.
    """
    spec = family.spec
    if not isinstance(spec, TwoSetOverlap):
        raise InvalidParameterError("build_twoset_measurement requires a two-set family")
    n, m = spec.n, spec.m
    if family.ambient_dim < n + 1:
        raise InvalidParameterError("two-set family must live in at least N+1 dimensions")
    over = post_amplitudes or (None, None)
    q1, t1 = _class_amplitude(spec.s1, float(target_q1), over[0], "q1")
    q2, t2 = _class_amplitude(spec.s2, float(target_q2), over[1], "q2")

    rec = reciprocal_generic(family)
    g1 = float(np.mean(rec.r_values[:m]))
    g2 = float(np.mean(rec.r_values[m:]))
    c1, c2 = (1 - q1) / g1, (1 - q2) / g2
    a1, a2 = np.sqrt(q1 / g1), np.sqrt(q2 / g2)

    post = build_two_set(n, m, t1, t2, allow_degenerate=True)
    if family.ambient_dim > n + 1:
        vectors = np.zeros((n, family.ambient_dim))
        vectors[:, : n + 1] = post.vectors
        post = StateFamily(post.spec, vectors, post.gram)
    consts = np.array([c1] * m + [c2] * (n - m))
    povm = povm_from_duals(rec.vectors, consts, family.ambient_dim)
    povm[0] = as_symmetric(povm[0])
    detect = np.sqrt(consts)
    fail = np.array([a1] * m + [a2] * (n - m))
    kraus = kraus_from_duals(post.vectors, rec.vectors, detect, fail)
    kraus[0] = complete_failure_kraus(kraus[0], family.vectors, post.vectors)
    return TwoSetUsdMeasurement(povm, kraus, family, post, rec.vectors,
                                float(c1), float(c2), q1, q2, float(t1), float(t2),
                                float(a1), float(a2), g1, g2)


class ProductLaw(NamedTuple):
    qc1: float
    qc2: float
    products: tuple


def bob_charlie_product_law(s1, s2, qb1, qb2):
    """Optimal second-observer failure rates after a first measurement at ``(qb1, qb2)``."""
    qcs = []
    for s, qb in ((s1, qb1), (s2, qb2)):
        floor = s * s
        if qb < floor - PARAM_TOL or qb > 1 + PARAM_TOL:
            raise InvalidParameterError(f"first-observer failure {qb!r} outside [{floor!r}, 1]")
        qcs.append(1.0 if qb <= floor else floor / qb)
    return ProductLaw(qcs[0], qcs[1], (qb1 * qcs[0], qb2 * qcs[1]))
