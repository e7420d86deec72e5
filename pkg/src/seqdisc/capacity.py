"""Capacities of the erasure channels induced by USD measurements.

All logarithms are base 2.  ``0 log 0`` is taken as ``0`` throughout.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError, InvalidSpecError

GOLDEN = (math.sqrt(5) - 1) / 2
P1_TOL = 1e-9
MAX_ITER = 200


def _check_prob(name, x):
    if not 0.0 <= x <= 1.0:
        raise InvalidSpecError(f"{name}={x!r} outside [0, 1]")


def _xlog2(x, y):
    """``x * log2(y)`` with the convention ``0 * log2(anything) = 0``."""
    return 0.0 if x == 0 else x * math.log2(y)


def binary_entropy(q):
    _check_prob("q", q)
    return -_xlog2(q, q) - _xlog2(1 - q, 1 - q)


def capacity_equal(n, q_e):
    _check_prob("q_e", q_e)
    return (1 - q_e) * math.log2(n)


def combined_capacity(n, qb, qc):
    """Capacity when the two observers pool their outcomes (erasure only if both fail)."""
    _check_prob("qB", qb)
    _check_prob("qC", qc)
    return (1 - qb * qc) * math.log2(n)


@dataclass(frozen=True)
class ErasureChannelSpec:
    n: int
    m: int
    q1: float
    q2: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidSpecError(f"N must be an integer >= 2, got {self.n!r}")
        if int(self.m) != self.m or not 1 <= self.m <= self.n:
            raise InvalidSpecError(f"M must satisfy 1 <= M <= N, got {self.m!r}")
        _check_prob("q1", self.q1)
        _check_prob("q2", self.q2)

    def erasure_probs(self):
        return np.array([self.q1] * self.m + [self.q2] * (self.n - self.m))

    def channel_matrix(self):
        """``W[x, y]`` with outputs ``y = 0..N-1`` and the erasure symbol at ``y = N``."""
        q = self.erasure_probs()
        w = np.zeros((self.n, self.n + 1))
        w[np.arange(self.n), np.arange(self.n)] = 1 - q
        w[:, self.n] = q
        return w

    def input_distribution(self, p1):
        """Uniform within each class, total weight ``p1`` on class 1."""
        p = np.empty(self.n)
        p[: self.m] = p1 / self.m
        if self.m < self.n:
            p[self.m:] = (1 - p1) / (self.n - self.m)
        return p

    def to_dict(self):
        return {"n": self.n, "m": self.m, "q1": self.q1, "q2": self.q2}


def mutual_info_two_rate(spec, p1):
    """Mutual information for class weight ``p1`` with uniform inputs inside each class."""
    _check_prob("p1", p1)
    n, m, q1, q2 = spec.n, spec.m, spec.q1, spec.q2
    if m == n and p1 != 1.0:
        raise InvalidParameterError("with M = N all input weight sits in class 1 (p1 = 1)")
    p2 = 1 - p1
    erased = p1 * q1 + p2 * q2
    g = 0.0
    # log differences, not logs of ratios: the ratios over/underflow for subnormal weights
    if p1 * q1 > 0:
        g += p1 * q1 * (math.log2(q1) - math.log2(erased))
    g -= _xlog2(p1 * (1 - q1), p1) - _xlog2(p1 * (1 - q1), m)
    if p2 * q2 > 0:
        g += p2 * q2 * (math.log2(q2) - math.log2(erased))
    if m < n:
        g -= _xlog2(p2 * (1 - q2), p2) - _xlog2(p2 * (1 - q2), n - m)
    return g


class CapacityResult(NamedTuple):
    capacity_bits: float
    optimal_p1: float
    iterations: int
    tolerance_achieved: float


def golden_section_max(f, lo, hi, tol=P1_TOL, max_iter=MAX_ITER):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; endpoints are compared at the end.

    Returns ``(x, f(x), iterations, final bracket width)``.
    """
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol and it < max_iter:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        it += 1
    x = 0.5 * (a + b)
    best = (f(x), x)
    for edge in (lo, hi):
        fe = f(edge)
        if fe > best[0]:
            best = (fe, edge)
    return best[1], best[0], it, b - a


def capacity_two_rate(spec, tol=P1_TOL, max_iter=MAX_ITER):
    if spec.m == spec.n:
        return CapacityResult(capacity_equal(spec.n, spec.q1), 1.0, 0, 0.0)
    x, fx, it, width = golden_section_max(lambda p: mutual_info_two_rate(spec, p),
                                          0.0, 1.0, tol, max_iter)
    return CapacityResult(max(fx, 0.0), x, it, width)


def series_gmax(n, m, q, dq):
    """First-order expansion of the two-rate capacity at ``q1 = q + dq``, ``q2 = q - dq``."""
    if not (0 < q - abs(dq) and q + abs(dq) < 1):
        raise InvalidParameterError(f"need 0 < q - |dq| and q + |dq| < 1 (q={q!r}, dq={dq!r})")
    return (1 - q) * math.log2(n) + dq * (1 - 2 * m / n) * math.log2(n)


class FigureTable(NamedTuple):
    header: tuple
    rows: list


FIG1_Q2 = (0.2, 0.5, 0.8)
FIG2_M = (1, 3, 5)
FIG3_N = (2, 3, 4, 8, 16, 100, 1000)


def capacity_vs_m(n=10, q1=0.5, q2_values=FIG1_Q2):
    rows = []
    for q2 in q2_values:
        for m in range(1, n):
            cap = capacity_two_rate(ErasureChannelSpec(n, m, q1, q2)).capacity_bits
            rows.append((m, f"q2={q2:g}", cap))
    return FigureTable(("M", "series", "capacity_bits"), rows)


def capacity_vs_q2(n=6, q1=0.5, m_values=FIG2_M, points=21):
    rows = []
    for m in m_values:
        for q2 in np.linspace(0.0, 1.0, points):
            cap = capacity_two_rate(ErasureChannelSpec(n, m, q1, float(q2))).capacity_bits
            rows.append((float(q2), f"M={m}", cap))
    return FigureTable(("q2", "series", "capacity_bits"), rows)


def figure_data(figure_id, **grid):
    """Dataset behind one figure.

    ``fig1``: capacity against the class-1 size M (N=10, q1=0.5, a few q2).
    ``fig2``: capacity against q2 (N=6, q1=0.5, a few M).
    ``fig3``: eavesdropper success against s for several N.
    """
    if figure_id == "fig1":
        return capacity_vs_m(**grid)
    if figure_id == "fig2":
        return capacity_vs_q2(**grid)
    if figure_id == "fig3":
        from .eve import success_vs_overlap
        return success_vs_overlap(**grid)
    raise InvalidParameterError(f"unknown figure id {figure_id!r}; expected fig1, fig2 or fig3")
