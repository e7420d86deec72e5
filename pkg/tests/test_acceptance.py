"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line PASS/FAIL verdict that is echoed in the pytest
terminal summary; running this file as a script prints the same lines.
"""
import itertools
import math
import time

import numpy as np
import pytest

from oracles import mutual_information, two_state_min_error
from seqdisc.capacity import (ErasureChannelSpec, capacity_equal, capacity_two_rate, capacity_vs_m,
                              capacity_vs_q2, mutual_info_two_rate, series_gmax)
from seqdisc.chain import plan_equal_split, simulate_chain
from seqdisc.cli import main as cli_main
from seqdisc.eve import build_sqrt_measurement, eve_success, intercept_resend_sim
from seqdisc.states import build_equal_overlap, build_two_set, reciprocal_twoset_closed_form
from seqdisc.twoset import build_twoset_measurement, positivity_check
from seqdisc.usd import build_measurement, sandwich
from seqdisc.verify import default_equal_grid, run_verify

VERDICTS = {}
TRIALS = 100_000


def record(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS[number] = line
    print(line)
    return ok


def usd_grid_check():
    t0 = time.perf_counter()
    records, _ = run_verify(default_equal_grid(), [])
    elapsed = time.perf_counter() - t0
    worst = {}
    for r in records:
        worst[r["invariant"]] = max(worst.get(r["invariant"], 0.0), abs(r["value"]))
    psd = min(r["value"] for r in records if r["invariant"] == "povm_positivity")
    ok = (worst["completeness"] <= 1e-12 and worst["unambiguity"] <= 1e-12
          and psd >= -1e-10 and worst["boundary_min_eigenvalue"] <= 1e-8 and elapsed < 10)
    ok = ok and all(r["pass"] for r in records)
    return ok, (f"{len(records)} checks, completeness {worst['completeness']:.1e}, "
                f"unambiguity {worst['unambiguity']:.1e}, min eig {psd:.1e}, "
                f"boundary {worst['boundary_min_eigenvalue']:.1e}, {elapsed:.2f}s")


def product_law_check():
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 9))
        s = float(rng.uniform(0.01, 0.95))
        qb = float(rng.uniform(s, 1.0))
        bob = build_measurement(build_equal_overlap(n, s), qb)
        charlie = build_measurement(bob.post_family, bob.t)
        post = bob.post_family.vectors
        qc = float(np.mean(np.einsum("ja,ab,jb->j", post, charlie.povm[0], post)))
        worst = max(worst, abs(qb * qc - s), abs(qb * charlie.q - s))
    split_gap = 0.0
    for s in (0.04, 0.25, 0.49, 0.81):
        bob = build_measurement(build_equal_overlap(3, s), math.sqrt(s))
        charlie = build_measurement(bob.post_family, bob.t)
        joint = (1 - bob.q) * (1 - charlie.q)
        split_gap = max(split_gap, abs(bob.q - math.sqrt(s)), abs(charlie.q - math.sqrt(s)),
                        abs(joint - (1 - math.sqrt(s)) ** 2))
    ok = worst <= 1e-12 and split_gap <= 1e-12
    return ok, f"max |qB qC - s| = {worst:.1e} on 20 triples, equal-split gap {split_gap:.1e}"


def chain_mc_check():
    t0 = time.perf_counter()
    worst_z, mislabels = 0.0, 0
    failures = []
    for i, (n, s, m) in enumerate(itertools.product((2, 3, 5), (0.04, 0.25, 0.49), (2, 3, 4))):
        stats = simulate_chain(plan_equal_split(n, s, m), TRIALS, seed=1000 + i)
        p = (1 - s ** (1 / m)) ** m
        z = abs(stats.all_success_rate - p) / math.sqrt(p * (1 - p) / TRIALS)
        worst_z = max(worst_z, z)
        mislabels += stats.mislabels
        if z >= 3:
            failures.append((n, s, m, round(z, 2)))
    elapsed = time.perf_counter() - t0
    ok = not failures and mislabels == 0 and elapsed < 60
    return ok, (f"27 configs x {TRIALS} trials, max |z| = {worst_z:.2f}, mislabels {mislabels}, "
                f"{elapsed:.1f}s" + (f", outside 3 sigma: {failures}" if failures else ""))


def dimension_check():
    plan2, plan7 = plan_equal_split(2, 0.25, 2), plan_equal_split(7, 0.25, 2)
    a = simulate_chain(plan2, TRIALS, seed=77)
    b = simulate_chain(plan7, TRIALS, seed=78)
    pa, pb = a.all_success_rate, b.all_success_rate
    sigma = math.sqrt(pa * (1 - pa) / TRIALS + pb * (1 - pb) / TRIALS)
    diff = abs(pa - pb)
    return diff < 3 * sigma, f"N=2 {pa:.5f} vs N=7 {pb:.5f}, |diff| = {diff / sigma:.2f} sigma"


def twoset_check():
    red = 0.0
    for n, sig, frac in itertools.product((3, 4, 6, 8), (0.2, 0.5, 0.8), (0.0, 0.5, 1.0)):
        s = sig * sig
        q = s + frac * (1 - s)
        for m in (1, n // 2, n - 1):
            two = build_twoset_measurement(build_two_set(n, m, sig, sig), q, q)
            eq = build_measurement(build_equal_overlap(n, s), q)
            fi, fe = two.input_family.vectors, eq.input_family.vectors
            red = max(red,
                      np.abs(sandwich(two.povm, fi, fi) - sandwich(eq.povm, fe, fe)).max(),
                      np.abs(sandwich(two.kraus, two.post_family.vectors, fi)
                             - sandwich(eq.kraus, eq.post_family.vectors, fe)).max())
    rng = np.random.default_rng(5150)
    spec_gap, mult_ok = 0.0, True
    for _ in range(50):
        n = int(rng.integers(3, 9))
        m = int(rng.integers(1, n))
        s1, s2 = rng.uniform(0.0, 0.95, 2)
        q1 = s1 * s1 + rng.uniform() * (1 - s1 * s1)
        q2 = s2 * s2 + rng.uniform() * (1 - s2 * s2)
        d = reciprocal_twoset_closed_form(n, m, s1, s2)
        c1, c2 = (1 - q1) / d.gamma1, (1 - q2) / d.gamma2
        _, rep = positivity_check(n, m, s1, s2, c1, c2)
        spec_gap = max(spec_gap, float(np.abs(rep.analytic - rep.numeric_state_basis).max()))
        num = rep.numeric_state_basis
        mult_ok &= int(np.sum(np.abs(num - rep.f1) < 1e-9)) >= m - 1
        mult_ok &= int(np.sum(np.abs(num - rep.f2) < 1e-9)) >= n - m - 1
    ok = red <= 1e-12 and spec_gap <= 1e-9 and mult_ok
    return ok, (f"reduction gap {red:.1e}, spectrum gap {spec_gap:.1e} on 50 points, "
                f"multiplicities {'ok' if mult_ok else 'wrong'}")


def capacity_oracle_check():
    rng = np.random.default_rng(8080)
    mi_gap, cap_gap, p_gap = 0.0, 0.0, 0.0
    for _ in range(100):
        n = int(rng.integers(2, 13))
        m = int(rng.integers(1, n))
        spec = ErasureChannelSpec(n, m, float(rng.uniform()), float(rng.uniform()))
        p1 = float(rng.uniform())
        brute = mutual_information(spec.input_distribution(p1), spec.channel_matrix())
        mi_gap = max(mi_gap, abs(mutual_info_two_rate(spec, p1) - brute))
        q = float(rng.uniform(0.0, 0.99))
        res = capacity_two_rate(ErasureChannelSpec(n, m, q, q))
        cap_gap = max(cap_gap, abs(res.capacity_bits - capacity_equal(n, q)))
        p_gap = max(p_gap, abs(res.optimal_p1 - m / n))
    ok = mi_gap <= 1e-12 and cap_gap <= 1e-9 and p_gap <= 1e-6
    return ok, f"MI gap {mi_gap:.1e} on 100 specs, q1=q2 capacity gap {cap_gap:.1e}, p1 gap {p_gap:.1e}"


def series_and_figures_check():
    ratios = []
    for m in (3, 5, 7):
        gaps = []
        for dq in (0.08, 0.04, 0.02):
            cap = capacity_two_rate(ErasureChannelSpec(10, m, 0.4 + dq, 0.4 - dq)).capacity_bits
            gaps.append(abs(cap - series_gmax(10, m, 0.4, dq)))
        ratios += [gaps[0] / gaps[1], gaps[1] / gaps[2]]
    q_sweep = capacity_vs_q2()
    monotone = True
    for label in sorted({r[1] for r in q_sweep.rows}):
        caps = [r[2] for r in q_sweep.rows if r[1] == label]
        monotone &= all(b <= a + 1e-12 for a, b in zip(caps, caps[1:]))
    m_sweep = capacity_vs_m()
    for m in range(1, 10):
        caps = [r[2] for r in m_sweep.rows if r[0] == m]
        monotone &= all(b <= a + 1e-12 for a, b in zip(caps, caps[1:]))
    lowest = min(m_sweep.rows, key=lambda r: r[2])
    corner = lowest[0] == 1 and lowest[1] == "q2=0.8"
    ok = min(ratios) >= 3.5 and monotone and corner
    return ok, (f"min shrink ratio {min(ratios):.2f}, decreasing in q2: {monotone}, "
                f"lowest at M={lowest[0]} {lowest[1]}")


def eve_formula_check():
    t0 = time.perf_counter()
    gap = 0.0
    for n in range(2, 9):
        for s in np.round(np.arange(0.0, 0.95, 0.1), 10):
            meas = build_sqrt_measurement(build_equal_overlap(n, float(s)))
            gap = max(gap, abs(meas.success_prob - eve_success(n, float(s))))
    shape = True
    for s in np.round(np.arange(0.1, 0.95, 0.1), 10):
        vals = [eve_success(n, s) for n in range(2, 9)]
        lim = [v - (1 - s) for v in vals]
        shape &= all(b <= a for a, b in zip(vals, vals[1:]))
        shape &= all(x > 0 for x in lim) and all(b < a for a, b in zip(lim, lim[1:]))
    brute = max(abs(build_sqrt_measurement(build_equal_overlap(2, s)).success_prob
                    - two_state_min_error(s)) for s in (0.1, 0.3, 0.5, 0.7, 0.9))
    elapsed = time.perf_counter() - t0
    ok = gap <= 1e-12 and shape and brute <= 1e-9 and elapsed < 10
    return ok, (f"formula gap {gap:.1e}, monotone/limit: {shape}, N=2 brute-force gap {brute:.1e}, "
                f"{elapsed:.2f}s")


def eavesdropper_check():
    parts, ok = [], True
    for n in (2, 4, 8):
        plan = plan_equal_split(n, 0.25, 1)
        stats = intercept_resend_sim(n, 0.25, plan, TRIALS, seed=4000 + n, link=0)
        p, rate = float(stats.exact_error[0]), float(stats.error_rates[0])
        z = abs(rate - p) / math.sqrt(p * (1 - p) / TRIALS)
        clean = simulate_chain(plan, TRIALS, seed=5000 + n).mislabels
        ok &= p > 0 and rate > 0 and z < 3 and clean == 0
        parts.append(f"N={n}: error {rate:.4f} vs exact {p:.4f} ({z:.2f} sigma), no-Eve errors {clean}")
    return ok, "; ".join(parts)


def determinism_check(tmp):
    commands = [
        ["chain", "--n", "3", "--s", "0.25", "--observers", "3", "--trials", "20000", "--seed", "17",
         "--workers", "3", "--format", "csv"],
        ["eve", "--n", "4", "--s", "0.25", "--trials", "20000", "--seed", "23"],
        ["capacity", "--n", "10", "--m-split", "3", "--q1", "0.5", "--q2", "0.2"],
        ["figures", "fig1"],
        ["verify-usd", "--n-values", "2,3", "--format", "csv"],
    ]
    same = 0
    for i, argv in enumerate(commands):
        blobs = []
        for rep in range(2):
            path = tmp / f"run{i}_{rep}.out"
            if cli_main(argv + ["-o", str(path)]) != 0:
                return False, f"command failed: {' '.join(argv)}"
            blobs.append(path.read_bytes())
        same += blobs[0] == blobs[1]
    return same == len(commands), f"{same}/{len(commands)} commands byte-identical across reruns"


CHECKS = {
    1: usd_grid_check,
    2: product_law_check,
    3: chain_mc_check,
    4: dimension_check,
    5: twoset_check,
    6: capacity_oracle_check,
    7: series_and_figures_check,
    8: eve_formula_check,
    9: eavesdropper_check,
}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    ok, detail = CHECKS[number]()
    assert record(number, ok, detail), detail


def test_criterion_10(tmp_path):
    ok, detail = determinism_check(tmp_path)
    assert record(10, ok, detail), detail


if __name__ == "__main__":
    import pathlib
    import tempfile

    for k in sorted(CHECKS):
        record(k, *CHECKS[k]())
    with tempfile.TemporaryDirectory() as d:
        record(10, *determinism_check(pathlib.Path(d)))
