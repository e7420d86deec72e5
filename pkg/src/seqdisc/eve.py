"""Minimum-error (square-root) measurement and an intercept-resend eavesdropper."""
from dataclasses import dataclass

import numpy as np

from .capacity import FIG3_N, FigureTable
from .chain import draw_inputs, run_parallel, stage_measurements
from .errors import InvalidParameterError, NumericalFailure
from .kernels import run_chain
from .linalg import as_symmetric, inv_sqrt_psd, sym_eigen
from .rng import check_seed, split_counts
from .states import EqualOverlap

SPECTRUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MinErrorMeasurement:
    gammas: np.ndarray
    projectors: np.ndarray
    rho: np.ndarray
    rho_eigenvalues: np.ndarray
    success_prob: float


def rho_spectrum(n, s, dim=None):
    """Eigenvalues of the uniform mixture, ascending: ``(1-s)/N`` (N-1 fold) and ``(1+(N-1)s)/N``."""
    vals = [(1 - s) / n] * (n - 1) + [(1 + (n - 1) * s) / n]
    vals += [0.0] * ((dim or n) - n)
    return np.sort(np.array(vals))


def build_sqrt_measurement(family):
    spec = family.spec
    if not isinstance(spec, EqualOverlap):
        raise InvalidParameterError("square-root measurement is only provided for equal-overlap families")
    n, vecs = family.n, family.vectors
    rho = as_symmetric(vecs.T @ vecs / n)
    eig = sym_eigen(rho).values
    expected = rho_spectrum(n, spec.s, family.ambient_dim)
    if np.max(np.abs(eig - expected)) > SPECTRUM_TOL:
        raise NumericalFailure("mixture spectrum does not have the equal-overlap structure")
    root = inv_sqrt_psd(rho)
    gammas = vecs @ root / np.sqrt(n)
    projectors = np.einsum("ja,jb->jab", gammas, gammas)
    success = float(np.mean(np.einsum("ja,ja->j", vecs, gammas) ** 2))
    return MinErrorMeasurement(gammas, projectors, rho, eig, success)


def eve_success(n, s):
    """Average success of the square-root measurement on N equiprobable states."""
    return (np.sqrt(1 + (n - 1) * s) + (n - 1) * np.sqrt(1 - s)) ** 2 / n**2


def success_vs_overlap(n_values=FIG3_N, points=21):
    rows = []
    for n in n_values:
        for s in np.linspace(0.0, 1.0, points):
            rows.append((float(s), int(n), float(eve_success(n, float(s)))))
    return FigureTable(("s", "N", "eve_success"), rows)


def intercept_instrument(family, meas=None):
    """Kraus stack ``K_0 = 0``, ``K_k = |eta_k><gamma_k|``: measure, then resend the guess."""
    meas = meas or build_sqrt_measurement(family)
    n, dim = family.n, family.ambient_dim
    kraus = np.zeros((n + 1, dim, dim))
    kraus[1:] = np.einsum("ja,jb->jab", family.vectors, meas.gammas)
    return kraus


def exact_label_probabilities(kraus_chain, vectors, merge_decimals=12):
    """Exact per-stage outcome statistics by branching over outcomes.

    Returns ``(correct, erased, wrong)``, each ``(S, N)``: probability that the
    stage returns the true label, ``0``, or another label, given Alice's state.
    Branches landing on the same post-state are merged.
    """
    n_stages = kraus_chain.shape[0]
    n = vectors.shape[0]
    correct = np.zeros((n_stages, n))
    erased = np.zeros((n_stages, n))
    wrong = np.zeros((n_stages, n))
    for j in range(n):
        branches = [(vectors[j], 1.0)]
        for st in range(n_stages):
            merged = {}
            for psi, w in branches:
                amps = kraus_chain[st] @ psi
                probs = np.einsum("ka,ka->k", amps, amps)
                for k in np.flatnonzero(probs > 1e-300):
                    pk = w * probs[k]
                    if k == j + 1:
                        correct[st, j] += pk
                    elif k == 0:
                        erased[st, j] += pk
                    else:
                        wrong[st, j] += pk
                    post = amps[k] / np.sqrt(probs[k])
                    key = tuple(np.round(post, merge_decimals) + 0.0)
                    if key in merged:
                        merged[key][1] += pk
                    else:
                        merged[key] = [post, pk]
            branches = [(v[0], v[1]) for v in merged.values()]
    return correct, erased, wrong


@dataclass
class AttackStats:
    trials: int
    seed: int
    link: int
    eve_correct: int
    eve_success_exact: float
    eve_success_formula: float
    downstream_conclusive: np.ndarray
    downstream_errors: np.ndarray
    exact_conclusive: np.ndarray
    exact_error: np.ndarray
    exact_error_per_state: np.ndarray

    @property
    def eve_success_rate(self):
        return self.eve_correct / self.trials

    @property
    def error_rates(self):
        return self.downstream_errors / self.trials

    def error_sigmas(self):
        p = self.exact_error
        return np.sqrt(p * (1 - p) / self.trials)

    def to_dict(self):
        return {
            "trials": self.trials, "seed": self.seed, "link": self.link,
            "eve_correct": self.eve_correct,
            "eve_success_rate": self.eve_success_rate,
            "eve_success_exact": self.eve_success_exact,
            "eve_success_formula": self.eve_success_formula,
            "downstream_conclusive": self.downstream_conclusive.tolist(),
            "downstream_errors": self.downstream_errors.tolist(),
            "exact_conclusive": self.exact_conclusive.tolist(),
            "exact_error": self.exact_error.tolist(),
            "exact_error_per_state": self.exact_error_per_state.tolist(),
        }


def attacked_chain(plan, link):
    """Kraus chain with the eavesdropper inserted in front of observer ``link`` (0-based)."""
    if not 0 <= link < plan.observers:
        raise InvalidParameterError(f"link {link} outside 0..{plan.observers - 1}")
    stages = stage_measurements(plan)
    in_flight = stages[link].input_family
    eve = intercept_instrument(in_flight)
    chain = [m.kraus for m in stages[:link]] + [eve] + [m.kraus for m in stages[link:]]
    return np.stack(chain), stages[0].input_family, in_flight


def intercept_resend_sim(n, s, plan, trials, seed, link=0, workers=1, backend=None):
    """Monte Carlo and exact statistics of an intercept-resend attack on a chain.

    ``link = 0`` is the Alice -> Bob_1 link; ``link = l`` sits between
    Bob_l and Bob_(l+1).  Downstream arrays are indexed by the observers after
    the eavesdropper.
    """
    if plan.n != n or abs(plan.s - s) > 1e-15:
        raise InvalidParameterError("plan does not match (n, s)")
    if int(trials) < 1:
        raise InvalidParameterError("trials must be >= 1")
    seed = check_seed(seed)
    kraus, alice, in_flight = attacked_chain(plan, link)

    def job(count, rng):
        start = draw_inputs(rng, count, n)
        return start, run_chain(kraus, alice.vectors, start, rng.random((count, kraus.shape[0])),
                                backend=backend)

    parts = run_parallel(job, split_counts(trials, workers), seed, workers)
    start = np.concatenate([p[0] for p in parts])
    labels = np.concatenate([p[1] for p in parts])
    truth = (start + 1)[:, None]
    down = labels[:, link + 1:]
    correct, _erased, wrong = exact_label_probabilities(kraus, alice.vectors)
    return AttackStats(
        trials=int(trials), seed=seed, link=int(link),
        eve_correct=int((labels[:, link] == start + 1).sum()),
        eve_success_exact=float(correct[link].mean()),
        eve_success_formula=float(eve_success(n, in_flight.spec.s)),
        downstream_conclusive=(down != 0).sum(axis=0),
        downstream_errors=((down != 0) & (down != truth)).sum(axis=0),
        exact_conclusive=(correct[link + 1:] + wrong[link + 1:]).mean(axis=1),
        exact_error=wrong[link + 1:].mean(axis=1),
        exact_error_per_state=wrong[link + 1:],
    )
