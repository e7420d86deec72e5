"""Monte Carlo kernels: push states through a sequence of quantum instruments.

An instrument is a stack of Kraus operators ``(K, d, d)``; a chain of ``S``
instruments is a ``(S, K, d, d)`` array.  Outcome ``k`` is drawn with
probability ``||A_k psi||^2`` by inverse CDF over ``k = 1..K-1`` followed by
``k = 0``, and the state is replaced by ``A_k psi / ||A_k psi||``.

Both backends consume the same pre-drawn uniforms, so they return identical
labels for identical inputs.
"""
import numpy as np

from ._accel import njit, resolve_backend


@njit(cache=True, nogil=True)
def _chain_numba(kraus, vectors, start, uniforms, labels):
    n_trials = start.shape[0]
    n_stages, n_out, dim, _ = kraus.shape
    psi = np.empty(dim)
    amps = np.empty((n_out, dim))
    probs = np.empty(n_out)
    for t in range(n_trials):
        for a in range(dim):
            psi[a] = vectors[start[t], a]
        for st in range(n_stages):
            for k in range(n_out):
                acc = 0.0
                for a in range(dim):
                    v = 0.0
                    for b in range(dim):
                        v += kraus[st, k, a, b] * psi[b]
                    amps[k, a] = v
                    acc += v * v
                probs[k] = acc
            u = uniforms[t, st]
            chosen = -1
            last = 0
            cum = 0.0
            for k in range(1, n_out):
                if probs[k] > 0.0:
                    last = k
                cum += probs[k]
                if u < cum:
                    chosen = k
                    break
            if chosen < 0:
                chosen = 0 if probs[0] > 0.0 else last
            labels[t, st] = chosen
            norm = np.sqrt(probs[chosen])
            for a in range(dim):
                psi[a] = amps[chosen, a] / norm


def _chain_numpy(kraus, vectors, start, uniforms, labels):
    n_stages, n_out = kraus.shape[:2]
    psi = vectors[start].copy()
    rows = np.arange(psi.shape[0])
    for st in range(n_stages):
        amps = np.einsum("kab,tb->tka", kraus[st], psi)
        probs = np.einsum("tka,tka->tk", amps, amps)
        cum = np.cumsum(probs[:, 1:], axis=1)
        hit = uniforms[:, st, None] < cum
        chosen = np.argmax(hit, axis=1) + 1
        missed = ~hit.any(axis=1)
        if missed.any():
            positive = probs[missed, 1:] > 0.0
            last = n_out - 1 - np.argmax(positive[:, ::-1], axis=1)
            last = np.where(positive.any(axis=1), last, 0)
            chosen[missed] = np.where(probs[missed, 0] > 0.0, 0, last)
        labels[:, st] = chosen
        picked = amps[rows, chosen]
        psi = picked / np.sqrt(probs[rows, chosen])[:, None]


def run_chain(kraus, vectors, start, uniforms, backend=None):
    """Sample outcome labels for every trial and stage.

    Parameters
    ----------
    kraus : (S, K, d, d) array
    vectors : (N, d) array of initial states
    start : (T,) int array, row of ``vectors`` each trial starts in
    uniforms : (T, S) array of U[0, 1) draws

    Returns
    -------
    (T, S) int64 array of outcome labels.
    """
    kraus = np.ascontiguousarray(kraus, dtype=np.float64)
    vectors = np.ascontiguousarray(vectors, dtype=np.float64)
    start = np.ascontiguousarray(start, dtype=np.int64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    if kraus.ndim != 4 or uniforms.shape != (start.shape[0], kraus.shape[0]):
        raise ValueError("shape mismatch between kraus stack, start indices and uniforms")
    labels = np.empty((start.shape[0], kraus.shape[0]), dtype=np.int64)
    if resolve_backend(backend) == "numba":
        _chain_numba(kraus, vectors, start, uniforms, labels)
    else:
        _chain_numpy(kraus, vectors, start, uniforms, labels)
    return labels
