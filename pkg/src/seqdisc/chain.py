"""Sequential chain Alice -> Bob_1 -> ... -> Bob_M for the equal-overlap family."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, InvalidPlanError
from .kernels import run_chain
from .rng import check_seed, split_counts, stream
from .states import EqualOverlap, build_equal_overlap
from .usd import build_measurement

LADDER_TOL = 1e-12


def _ratio(prev, cur):
    return prev / cur if cur > 0 else 0.0


@dataclass(frozen=True)
class ChainPlan:
    n: int
    s: float
    overlaps: tuple
    """``(t0 = s, t1, ..., tM = 1)``."""
    stage_failures: tuple

    def __post_init__(self):
        EqualOverlap(self.n, self.s)
        t = self.overlaps
        if len(t) < 2 or len(self.stage_failures) != len(t) - 1:
            raise InvalidPlanError("plan needs at least one observer")
        if abs(t[0] - self.s) > LADDER_TOL or t[-1] != 1.0:
            raise InvalidPlanError("overlap ladder must start at s and end at 1")
        if any(b < a - LADDER_TOL for a, b in zip(t, t[1:])):
            raise InvalidPlanError(f"overlap ladder is not monotone: {t}")
        if any(x >= 1.0 for x in t[1:-1]):
            raise InvalidPlanError("only the last observer may leave overlap 1 behind")

    @property
    def observers(self):
        return len(self.stage_failures)

    def to_dict(self):
        return {"n": self.n, "s": self.s, "overlaps": list(self.overlaps),
                "stage_failures": list(self.stage_failures)}


def plan_custom(n, s, overlaps):
    """Plan from the post-measurement overlaps ``(t1, ..., tM)``; ``tM`` must be 1."""
    ladder = (float(s),) + tuple(float(x) for x in overlaps)
    if len(ladder) < 2:
        raise InvalidPlanError("plan needs at least one observer")
    failures = tuple(_ratio(a, b) for a, b in zip(ladder, ladder[1:]))
    return ChainPlan(int(n), float(s), ladder, failures)


def plan_equal_split(n, s, m):
    """Every observer fails with the same probability ``s**(1/M)``."""
    if int(m) != m or m < 1:
        raise InvalidPlanError(f"number of observers must be >= 1, got {m!r}")
    m = int(m)
    overlaps = [float(s) ** ((m - l) / m) for l in range(1, m)] + [1.0]
    plan = plan_custom(n, s, overlaps)
    w = float(s) ** (1.0 / m)
    return ChainPlan(plan.n, plan.s, plan.overlaps, (w,) * m)


def exact_success(plan):
    return float(np.prod([1.0 - q for q in plan.stage_failures]))


def stage_measurements(plan):
    """USD measurement for every observer; stage ``l`` acts on the stage ``l-1`` post-states."""
    family = build_equal_overlap(plan.n, plan.s)
    stages = []
    for q, t in zip(plan.stage_failures, plan.overlaps[1:]):
        meas = build_measurement(family, q, post_overlap=t)
        stages.append(meas)
        family = meas.post_family
    return stages


def stage_post_overlap_residuals(stages):
    """Max deviation of ``<phi_j|phi_k>`` from the stage's ``t`` using the operators themselves."""
    out = []
    for meas in stages:
        fam = meas.input_family
        posts = []
        for j in range(fam.n):
            probs, amps = meas.outcome_probabilities(fam.vectors[j])
            for k in (0, j + 1):
                if probs[k] > 1e-14:
                    posts.append((j, amps[k] / np.sqrt(probs[k])))
        worst = 0.0
        for j, u in posts:
            for k, v in posts:
                target = 1.0 if j == k else meas.t
                worst = max(worst, abs(float(u @ v) - target))
        out.append(worst)
    return out


@dataclass
class ChainRunStats:
    trials: int
    seed: int
    workers: int
    stage_success: np.ndarray
    stage_mislabels: np.ndarray
    all_success: int
    per_state_trials: np.ndarray
    per_state_all_success: np.ndarray
    exact: float = field(default=float("nan"))

    @property
    def all_success_rate(self):
        return self.all_success / self.trials

    @property
    def sigma(self):
        p = self.exact if np.isfinite(self.exact) else self.all_success_rate
        return float(np.sqrt(p * (1 - p) / self.trials))

    @property
    def mislabels(self):
        return int(self.stage_mislabels.sum())

    def to_dict(self):
        return {
            "trials": self.trials, "seed": self.seed, "workers": self.workers,
            "stage_success": self.stage_success.tolist(),
            "stage_mislabels": self.stage_mislabels.tolist(),
            "all_success": self.all_success,
            "all_success_rate": self.all_success_rate,
            "exact_all_success": self.exact,
            "per_state_trials": self.per_state_trials.tolist(),
            "per_state_all_success": self.per_state_all_success.tolist(),
        }


def draw_inputs(rng, trials, n, distribution=None):
    """Alice's 0-based state indices, inverse-CDF sampled from ``distribution``."""
    if distribution is None:
        cdf = np.arange(1, n + 1) / n
    else:
        p = np.asarray(distribution, dtype=float)
        if p.shape != (n,) or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
            raise InvalidParameterError("input distribution must be N non-negative weights summing to 1")
        cdf = np.cumsum(p)
    idx = np.searchsorted(cdf, rng.random(trials), side="right")
    return np.minimum(idx, n - 1)


def sample_chunk(kraus, vectors, n, trials, rng, distribution=None, backend=None):
    start = draw_inputs(rng, trials, n, distribution)
    uniforms = rng.random((trials, kraus.shape[0]))
    return start, run_chain(kraus, vectors, start, uniforms, backend=backend)


def run_parallel(job, counts, seed, workers):
    """Run ``job(count, rng)`` on disjoint sub-streams ``(seed, i)`` and keep the order."""
    args = [(c, stream(seed, i)) for i, c in enumerate(counts)]
    if workers == 1:
        return [job(*a) for a in args]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda a: job(*a), args))


def simulate_chain(plan, trials, seed, input_distribution=None, workers=1, backend=None):
    """Monte Carlo estimate of per-stage and joint success for a chain plan."""
    if int(trials) < 1:
        raise InvalidParameterError("trials must be >= 1")
    seed = check_seed(seed)
    stages = stage_measurements(plan)
    kraus = np.stack([m.kraus for m in stages])
    vectors = stages[0].input_family.vectors
    n = plan.n

    def job(count, rng):
        return sample_chunk(kraus, vectors, n, count, rng, input_distribution, backend)

    parts = run_parallel(job, split_counts(trials, workers), seed, workers)
    start = np.concatenate([p[0] for p in parts])
    labels = np.concatenate([p[1] for p in parts])
    truth = (start + 1)[:, None]
    success = labels == truth
    mislabel = (labels != 0) & ~success
    everyone = success.all(axis=1)
    return ChainRunStats(
        trials=int(trials), seed=seed, workers=int(workers),
        stage_success=success.sum(axis=0),
        stage_mislabels=mislabel.sum(axis=0),
        all_success=int(everyone.sum()),
        per_state_trials=np.bincount(start, minlength=n),
        per_state_all_success=np.bincount(start, weights=everyone, minlength=n).astype(np.int64),
        exact=exact_success(plan),
    )
