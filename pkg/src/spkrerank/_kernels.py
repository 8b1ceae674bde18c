"""Batch scoring of every candidate combination in one conversation.

Two implementations share one contract and one floating-point evaluation
order, so they agree bit for bit:

* ``score_all_numba``: an ``@njit`` loop over combinations.
* ``score_all_numpy``: the same arithmetic vectorized over combinations.

``score_all`` is the numba kernel unless numba is missing or the environment
variable ``SPKRERANK_DISABLE_NUMBA`` is set to a non-empty value other than
``0``.

Inputs, for ``S`` slots and ``n`` local speakers:

* ``cand``  int64 ``(S, K)``: local speaker index per slot option (padded).
* ``val``   float64 ``(S, K)``: normalized acoustic score per slot option.
* ``sizes`` int64 ``(S,)``: number of live options per slot.
* ``cent``  float64 ``(n,)``: degree centrality per local speaker.
* ``ratio`` float64 ``(n, n)``: pair weight over total weight (0 on empty graph).

Combinations are numbered in mixed radix with slot 0 most significant, so a
smaller index means a lexicographically smaller option tuple. Rejected
combinations (repeats when ``allow_repeat`` is false) score ``-1``.
"""
import os

import numpy as np

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    HAS_NUMBA = False


def _env_disabled():
    return os.environ.get("SPKRERANK_DISABLE_NUMBA", "") not in ("", "0")


def n_combinations(sizes):
    total = 1
    for s in sizes:
        total *= int(s)
    return total


def score_all_numpy(cand, val, sizes, cent, ratio, lam, allow_repeat):
    S = cand.shape[0]
    n = cent.shape[0]
    M = n_combinations(sizes)
    digits = np.unravel_index(np.arange(M), tuple(int(s) for s in sizes))
    rows = np.arange(M)
    sums = np.zeros((M, n))
    counts = np.zeros((M, n), dtype=np.int64)
    for s in range(S):
        k = cand[s][digits[s]]
        sums[rows, k] += val[s][digits[s]]
        counts[rows, k] += 1
    present = counts > 0
    acc = np.zeros(M)
    nd = present.sum(axis=1)
    for k in range(n):
        mean_k = np.where(present[:, k], sums[:, k] / np.maximum(counts[:, k], 1), 0.0)
        acc = np.where(present[:, k], acc + mean_k * (1.0 + cent[k]), acc)
    prod = np.ones(M)
    for i in range(n):
        for j in range(i + 1, n):
            both = present[:, i] & present[:, j]
            prod = np.where(both, prod * (1.0 + lam * ratio[i, j]), prod)
    out = acc / nd * prod
    if not allow_repeat:
        out = np.where(nd < S, -1.0, out)
    return out


def _score_all_loop(cand, val, sizes, cent, ratio, lam, allow_repeat):
    S = cand.shape[0]
    n = cent.shape[0]
    M = 1
    for s in range(S):
        M *= sizes[s]
    out = np.empty(M)
    digits = np.zeros(S, dtype=np.int64)
    sums = np.zeros(n)
    counts = np.zeros(n, dtype=np.int64)
    present = np.zeros(n, dtype=np.int64)
    for m in range(M):
        rem = m
        for s in range(S - 1, -1, -1):
            digits[s] = rem % sizes[s]
            rem //= sizes[s]
        for k in range(n):
            sums[k] = 0.0
            counts[k] = 0
        for s in range(S):
            k = cand[s, digits[s]]
            sums[k] += val[s, digits[s]]
            counts[k] += 1
        nd = 0
        acc = 0.0
        for k in range(n):
            if counts[k] > 0:
                present[nd] = k
                nd += 1
                acc = acc + (sums[k] / counts[k]) * (1.0 + cent[k])
        if not allow_repeat and nd < S:
            out[m] = -1.0
            continue
        prod = 1.0
        for a in range(nd):
            i = present[a]
            for b in range(a + 1, nd):
                prod = prod * (1.0 + lam * ratio[i, present[b]])
        out[m] = acc / nd * prod
    return out


if HAS_NUMBA:
    score_all_numba = njit(cache=True, nogil=True)(_score_all_loop)
else:  # pragma: no cover
    score_all_numba = None

score_all_python = _score_all_loop


def _pick():
    if HAS_NUMBA and not _env_disabled():
        return score_all_numba, "numba"
    return score_all_numpy, "numpy"


score_all, BACKEND = _pick()


def best_index(scores):
    """Index of the maximum score; the first one wins ties."""
    return int(np.argmax(scores))
