"""Invariant suites for the USD constructions, as plain data (used by the CLI)."""
import numpy as np

from .errors import SeqDiscError
from .states import build_equal_overlap, build_two_set
from .twoset import build_twoset_measurement, positivity_check
from .usd import build_measurement, check_positivity, failure_prob_from_c, max_c

EXACT_TOL = 1e-12
PSD_TOL = 1e-10
BOUNDARY_TOL = 1e-8
SPECTRUM_TOL = 1e-9


def _check(name, value, tol, ok=None):
    value = float(value)
    return {"invariant": name, "value": value, "tol": tol,
            "pass": bool(abs(value) <= tol if ok is None else ok)}


def default_equal_grid():
    grid = []
    for n in range(2, 9):
        for s in np.round(np.arange(0.0, 0.95, 0.1), 10):
            s = float(s)
            for q in (s, (1 + s) / 2, 1.0):
                grid.append((n, s, float(q)))
    return grid


def default_twoset_grid():
    grid = []
    for n in (3, 4, 6):
        for m in sorted({1, n // 2, n - 1}):
            for s1, s2 in ((0.2, 0.6), (0.6, 0.3), (0.5, 0.5)):
                for frac in (0.0, 0.5, 1.0):
                    q1 = s1**2 + frac * (1 - s1**2)
                    q2 = s2**2 + frac * (1 - s2**2)
                    grid.append((n, m, s1, s2, q1, q2))
    return grid


def verify_equal_point(n, s, target_q):
    checks = []
    try:
        meas = build_measurement(build_equal_overlap(n, s), target_q)
    except SeqDiscError as exc:
        return [{"invariant": "construction", "value": float("nan"), "tol": 0.0,
                 "pass": False, "error": str(exc)}]
    res = meas.residuals()
    checks.append(_check("completeness", res["completeness"], EXACT_TOL))
    checks.append(_check("kraus_consistency", res["kraus"], EXACT_TOL))
    checks.append(_check("unambiguity", res["unambiguity"], EXACT_TOL))
    checks.append(_check("failure_operator_form", res["failure_matrix"], EXACT_TOL))
    lam = min(res["min_eigenvalues"])
    checks.append(_check("povm_positivity", lam, PSD_TOL, ok=lam >= -PSD_TOL))
    if target_q == s:
        checks.append(_check("boundary_min_eigenvalue", res["min_eigenvalues"][0], BOUNDARY_TOL))
        checks.append(_check("optimal_failure_equals_s",
                             failure_prob_from_c(n, s, max_c(n, s)) - s, EXACT_TOL))
    return checks


def verify_twoset_point(n, m, s1, s2, q1, q2):
    try:
        meas = build_twoset_measurement(build_two_set(n, m, s1, s2), q1, q2)
    except SeqDiscError as exc:
        return [{"invariant": "construction", "value": float("nan"), "tol": 0.0,
                 "pass": False, "error": str(exc)}]
    res = meas.residuals()
    checks = [
        _check("completeness", res["completeness"], EXACT_TOL),
        _check("kraus_consistency", res["kraus"], EXACT_TOL),
        _check("unambiguity", res["unambiguity"], EXACT_TOL),
    ]
    lam = min(res["min_eigenvalues"])
    checks.append(_check("povm_positivity", lam, PSD_TOL, ok=lam >= -PSD_TOL))
    ok, rep = positivity_check(n, m, s1, s2, meas.c1, meas.c2)
    gap = float(np.max(np.abs(rep.analytic - rep.numeric_state_basis)))
    checks.append(_check("analytic_spectrum", gap, SPECTRUM_TOL))
    checks.append(_check("class_floors", min(rep.f1, rep.f2), PSD_TOL, ok=ok))
    return checks


def run_verify(equal_grid=None, twoset_grid=None):
    """Run both suites; returns ``(records, all_pass)``."""
    records = []
    for n, s, q in equal_grid if equal_grid is not None else default_equal_grid():
        for chk in verify_equal_point(n, s, q):
            records.append({"family": "equal", "n": n, "m": n, "s1": s, "s2": s,
                            "target_q1": q, "target_q2": q, **chk})
    for n, m, s1, s2, q1, q2 in twoset_grid if twoset_grid is not None else default_twoset_grid():
        for chk in verify_twoset_point(n, m, s1, s2, q1, q2):
            records.append({"family": "twoset", "n": n, "m": m, "s1": s1, "s2": s2,
                            "target_q1": q1, "target_q2": q2, **chk})
    return records, all(r["pass"] for r in records)


def verify_injected_c(n, s, c):
    """Positivity report for a deliberately chosen detection constant."""
    chk = check_positivity(build_equal_overlap(n, s), c)
    return [{"family": "equal", "n": n, "m": n, "s1": s, "s2": s, "target_q1": float("nan"),
             "target_q2": float("nan"), "invariant": "povm_positivity",
             "value": chk.min_eigenvalue, "tol": PSD_TOL, "pass": bool(chk.ok),
             "c": chk.c, "c_max": chk.c_max}]
