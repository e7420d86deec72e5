"""Command-line entry point: ``seqdisc <command> [options]``.

Exit status is 0 on success, 1 when an invariant check fails and 2 on
usage errors.
"""
import argparse
import json
import sys

from . import __version__
from .capacity import (ErasureChannelSpec, capacity_equal, capacity_two_rate, combined_capacity,
                       figure_data)
from .chain import exact_success, plan_custom, plan_equal_split, simulate_chain
from .errors import SeqDiscError
from .eve import intercept_resend_sim
from .rng import MAX_SEED
from .serialize import read_json, render_csv, render_json, write_sidecar, write_text
from .states import build_equal_overlap, build_two_set
from .twoset import TwoSetUsdMeasurement, build_twoset_measurement
from .usd import UsdMeasurement, build_measurement
from .verify import run_verify, verify_injected_c

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE = 0, 1, 2


def _seed(text):
    value = int(text, 0)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="seqdisc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--output", "-o", default=None, help="data file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt)

    p = sub.add_parser("verify-usd", help="run the USD invariant suites on a parameter grid")
    p.add_argument("--n-values", type=_ints, default=None, help="comma list, default 2..8")
    p.add_argument("--s-values", type=_floats, default=None, help="comma list, default 0,0.1..0.9")
    p.add_argument("--skip-twoset", action="store_true")
    p.add_argument("--inject-c", type=float, default=None,
                   help="check positivity for this detection constant (needs --n, --s)")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--s", type=float, default=0.5)
    common(p)

    p = sub.add_parser("chain", help="Monte Carlo of an equal-overlap observer chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--observers", type=int, default=2)
    p.add_argument("--overlaps", type=_floats, default=None,
                   help="custom post-overlap ladder t1,...,tM (must end at 1)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    common(p)

    p = sub.add_parser("capacity", help="erasure-channel capacities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m-split", type=int, default=None, help="size of class 1")
    p.add_argument("--q1", type=float, default=None)
    p.add_argument("--q2", type=float, default=None)
    p.add_argument("--qe", type=float, default=None, help="single erasure rate")
    p.add_argument("--qb", type=float, default=None)
    p.add_argument("--qc", type=float, default=None)
    common(p)

    p = sub.add_parser("eve", help="intercept-resend attack on a chain")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--observers", type=int, default=1)
    p.add_argument("--link", type=int, default=0, help="0 = Alice->Bob_1")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)
    common(p)

    p = sub.add_parser("figures", help="emit figure datasets")
    p.add_argument("figure", choices=("fig1", "fig2", "fig3"))
    p.add_argument("--points", type=int, default=None, help="grid density along the sweep axis")
    common(p, fmt="csv")

    p = sub.add_parser("fixture", help="serialize a state family and its USD measurement")
    p.add_argument("--n", type=int, default=None, help="required unless --replay is given")
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--m-split", type=int, default=None)
    p.add_argument("--s1", type=float, default=None)
    p.add_argument("--s2", type=float, default=None)
    p.add_argument("--target-q", type=float, default=None)
    p.add_argument("--target-q2", type=float, default=None)
    p.add_argument("--replay", default=None, help="re-check a measurement fixture JSON file")
    common(p)
    return parser


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k != "output"}
    return cfg


def _emit(args, config, csv_table, json_data):
    if args.format == "csv":
        header, rows = csv_table
        text = render_csv(header, rows, config)
    else:
        text = render_json(json_data, config)
    if args.output:
        write_text(args.output, text)
        write_sidecar(args.output, config)
    else:
        sys.stdout.write(text)


def _summary(args, message):
    stream = sys.stdout if args.output else sys.stderr
    print(f"{message} seed={args.seed}", file=stream)


VERIFY_COLUMNS = ("family", "n", "m", "s1", "s2", "target_q1", "target_q2",
                  "invariant", "value", "tol", "pass")


def cmd_verify_usd(args):
    config = _config(args)
    if args.inject_c is not None:
        records = verify_injected_c(args.n, args.s, args.inject_c)
        ok = all(r["pass"] for r in records)
    else:
        equal_grid = None
        if args.n_values or args.s_values:
            ns = args.n_values or list(range(2, 9))
            ss = args.s_values or [round(0.1 * i, 10) for i in range(10)]
            equal_grid = [(n, s, q) for n in ns for s in ss for q in (s, (1 + s) / 2, 1.0)]
        records, ok = run_verify(equal_grid, [] if args.skip_twoset else None)
    rows = [[r[c] for c in VERIFY_COLUMNS] for r in records]
    _emit(args, config, (VERIFY_COLUMNS, rows), {"all_pass": ok, "checks": records})
    failed = sum(not r["pass"] for r in records)
    worst = min((r["value"] for r in records if r["invariant"] == "povm_positivity"),
                default=float("nan"))
    _summary(args, f"verify-usd: {len(records) - failed}/{len(records)} checks passed "
                   f"min_povm_eigenvalue={worst:.3e}")
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_chain(args):
    config = _config(args)
    if args.overlaps:
        plan = plan_custom(args.n, args.s, args.overlaps)
    else:
        plan = plan_equal_split(args.n, args.s, args.observers)
    stats = simulate_chain(plan, args.trials, args.seed, workers=args.workers)
    header = ("stage", "failure_prob", "post_overlap", "successes", "trials",
              "success_rate", "expected_rate", "mislabels")
    rows = []
    for l, (q, t) in enumerate(zip(plan.stage_failures, plan.overlaps[1:]), start=1):
        succ = int(stats.stage_success[l - 1])
        rows.append((l, q, t, succ, stats.trials, succ / stats.trials, 1 - q,
                     int(stats.stage_mislabels[l - 1])))
    rows.append(("all", float("nan"), 1.0, stats.all_success, stats.trials,
                 stats.all_success_rate, exact_success(plan), stats.mislabels))
    _emit(args, config, (header, rows), {"plan": plan.to_dict(), "trials": stats.trials,
                                         "seed": stats.seed, "stats": stats.to_dict()})
    _summary(args, f"chain: all_success={stats.all_success_rate:.6f} "
                   f"exact={exact_success(plan):.6f} mislabels={stats.mislabels}")
    return EXIT_OK if stats.mislabels == 0 else EXIT_INVARIANT


def cmd_capacity(args):
    config = _config(args)
    rows = []
    if args.qe is not None:
        rows.append(("equal", capacity_equal(args.n, args.qe), float("nan")))
    if args.qb is not None and args.qc is not None:
        rows.append(("combined", combined_capacity(args.n, args.qb, args.qc), float("nan")))
    if args.q1 is not None:
        q2 = args.q1 if args.q2 is None else args.q2
        m = args.n if args.m_split is None else args.m_split
        res = capacity_two_rate(ErasureChannelSpec(args.n, m, args.q1, q2))
        rows.append(("two_rate", res.capacity_bits, res.optimal_p1))
    if not rows:
        print("capacity: give --qe, --qb/--qc or --q1 [--q2 --m-split]", file=sys.stderr)
        return EXIT_USAGE
    header = ("channel", "capacity_bits", "optimal_p1")
    _emit(args, config, (header, rows),
          {"results": [dict(zip(header, r)) for r in rows]})
    _summary(args, "capacity: " + " ".join(f"{r[0]}={r[1]:.6f}" for r in rows))
    return EXIT_OK


def cmd_eve(args):
    config = _config(args)
    plan = plan_equal_split(args.n, args.s, args.observers)
    stats = intercept_resend_sim(args.n, args.s, plan, args.trials, args.seed,
                                 link=args.link, workers=args.workers)
    header = ("observer", "conclusive", "errors", "trials", "error_rate",
              "exact_error_rate", "exact_conclusive_rate")
    rows = []
    for i, obs in enumerate(range(args.link + 1, plan.observers + 1)):
        rows.append((obs, int(stats.downstream_conclusive[i]), int(stats.downstream_errors[i]),
                     stats.trials, stats.error_rates[i], stats.exact_error[i],
                     stats.exact_conclusive[i]))
    _emit(args, config, (header, rows), {"plan": plan.to_dict(), "stats": stats.to_dict()})
    _summary(args, f"eve: success={stats.eve_success_rate:.6f} "
                   f"formula={stats.eve_success_formula:.6f} "
                   f"downstream_errors={int(stats.downstream_errors.sum())}")
    return EXIT_OK


def cmd_figures(args):
    config = _config(args)
    grid = {}
    if args.points is not None and args.figure in ("fig2", "fig3"):
        grid["points"] = args.points
    table = figure_data(args.figure, **grid)
    _emit(args, config, (table.header, table.rows),
          {"figure": args.figure, "header": list(table.header), "rows": table.rows})
    _summary(args, f"figures: {args.figure} rows={len(table.rows)}")
    return EXIT_OK


def cmd_fixture(args):
    config = _config(args)
    if args.replay:
        d = read_json(args.replay)
        d = d.get("data", d)
        meas_d = d["measurement"]
        if meas_d["kind"] == "usd_equal":
            meas = UsdMeasurement.from_dict(meas_d)
        else:
            meas = TwoSetUsdMeasurement.from_dict(meas_d)
        res = meas.residuals()
        ok = (res["completeness"] <= 1e-12 and res["kraus"] <= 1e-12
              and res["unambiguity"] <= 1e-12 and min(res["min_eigenvalues"]) >= -1e-10)
        _summary(args, f"fixture replay: {'pass' if ok else 'FAIL'} {json.dumps(res)}")
        return EXIT_OK if ok else EXIT_INVARIANT
    if args.n is None:
        print("fixture: --n is required", file=sys.stderr)
        return EXIT_USAGE
    needed = ("s1", "s2") if args.m_split is not None else ("s",)
    missing = [f"--{k}" for k in needed if getattr(args, k) is None]
    if missing:
        print(f"fixture: missing {' '.join(missing)}", file=sys.stderr)
        return EXIT_USAGE
    if args.m_split is not None:
        family = build_two_set(args.n, args.m_split, args.s1, args.s2)
        q1 = args.s1**2 if args.target_q is None else args.target_q
        q2 = args.s2**2 if args.target_q2 is None else args.target_q2
        meas = build_twoset_measurement(family, q1, q2)
    else:
        family = build_equal_overlap(args.n, args.s)
        meas = build_measurement(family, args.s if args.target_q is None else args.target_q)
    if args.format == "csv":
        print("fixture: only JSON output is supported", file=sys.stderr)
        return EXIT_USAGE
    _emit(args, config, None, {"family": family.to_dict(), "measurement": meas.to_dict()})
    _summary(args, f"fixture: N={family.n} ambient_dim={family.ambient_dim}")
    return EXIT_OK


COMMANDS = {
    "verify-usd": cmd_verify_usd,
    "chain": cmd_chain,
    "capacity": cmd_capacity,
    "eve": cmd_eve,
    "figures": cmd_figures,
    "fixture": cmd_fixture,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (SeqDiscError, ValueError) as exc:
        print(f"seqdisc {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"seqdisc {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
