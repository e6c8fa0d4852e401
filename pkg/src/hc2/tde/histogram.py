"""Sparse word histograms with spatial pyramids and bigrams, and histogram-intersection 1-NN.

A key is a pair of int64 ``(hi, lo)``. Unigrams use ``hi = dim << 40 | level << 32
| position`` and ``lo = word``; bigrams set bit 62 and use ``hi = 1 << 62 | previous
word``, ``lo = word``, so the two key spaces never collide. Keys are kept
sorted lexicographically so intersections are a linear merge.
"""

from __future__ import annotations

import dataclasses

import numba as nb
import numpy as np

__all__ = ["WordHistogram", "BagSet", "case_histogram", "histogram_similarity",
           "similarity_matrix", "nearest_neighbours", "loocv_accuracy", "BIGRAM_FLAG"]

BIGRAM_FLAG = 1 << 62


@nb.njit(cache=True, nogil=True)
def _raw_keys(words, dims, m, w, levels, bigrams):
    g, P = words.shape
    cap = g * P * (levels + 1)
    hi = np.empty(cap, dtype=np.int64)
    lo = np.empty(cap, dtype=np.int64)
    wt = np.empty(cap)
    n = 0
    for gi in range(g):
        for j in range(P):
            r = words[gi, j]
            if j > 0 and r == words[gi, j - 1]:
                continue  # numerosity reduction
            for v in range(1, levels + 1):
                pos = (j * (1 << (v - 1))) // P
                hi[n] = (dims[gi] << 40) | (v << 32) | pos
                lo[n] = r
                wt[n] = float(1 << (v - 1))
                n += 1
            if bigrams and j >= w:
                hi[n] = BIGRAM_FLAG | words[gi, j - w]
                lo[n] = r
                wt[n] = 1.0
                n += 1
    return hi[:n], lo[:n], wt[:n]


@nb.njit(cache=True, nogil=True)
def _aggregate(hi, lo, wt):
    o1 = np.argsort(lo, kind="mergesort")
    o2 = np.argsort(hi[o1], kind="mergesort")
    order = o1[o2]
    h = hi[order]
    l = lo[order]
    ws = wt[order]
    n = h.shape[0]
    out_h = np.empty(n, dtype=np.int64)
    out_l = np.empty(n, dtype=np.int64)
    out_c = np.empty(n, dtype=np.int64)
    out_w = np.empty(n)
    k = -1
    for i in range(n):
        if k >= 0 and h[i] == out_h[k] and l[i] == out_l[k]:
            out_c[k] += 1
        else:
            k += 1
            out_h[k] = h[i]
            out_l[k] = l[i]
            out_c[k] = 1
            out_w[k] = ws[i]
    return out_h[: k + 1], out_l[: k + 1], out_c[: k + 1], out_w[: k + 1]


@dataclasses.dataclass(eq=False)
class WordHistogram:
    """Sorted sparse histogram: parallel arrays of key halves, counts and level weights."""

    hi: np.ndarray
    lo: np.ndarray
    counts: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return self.hi.shape[0]

    def as_dict(self) -> dict:
        return {(int(h), int(l)): int(c) for h, l, c in zip(self.hi, self.lo, self.counts)}

    def total(self, level: int | None = None, bigrams: bool = False) -> int:
        is_bi = (self.hi & BIGRAM_FLAG) != 0
        if bigrams:
            return int(self.counts[is_bi].sum())
        mask = ~is_bi
        if level is not None:
            mask &= ((self.hi >> 32) & 0xFF) == level
        return int(self.counts[mask].sum())


def case_histogram(words, series_length: int, window: int, levels: int, bigrams: bool,
                   dims=None) -> WordHistogram:
    """Histogram of one case from its per-dimension word sequences ``(g, m - w + 1)``.

    A word is counted only when it differs from the previous window's word.
    Each counted word adds one count at every pyramid level ``v``
    (position ``j * 2**(v-1) // (m - w + 1)``) and, when ``bigrams`` and ``j >= w``,
    one bigram with the word ``w`` windows earlier.
    """
    words = np.ascontiguousarray(np.atleast_2d(words), dtype=np.int64)
    if words.shape[1] != series_length - window + 1:
        raise ValueError("word sequence length does not match m - w + 1")
    dims = np.arange(words.shape[0], dtype=np.int64) if dims is None else np.asarray(dims, dtype=np.int64)
    hi, lo, wt = _raw_keys(words, dims, int(series_length), int(window), int(levels), bool(bigrams))
    return WordHistogram(*_aggregate(hi, lo, wt))


@nb.njit(cache=True, nogil=True)
def _sim(ah, al, ac, aw, bh, bl, bc):
    i = 0
    j = 0
    s = 0.0
    while i < ah.shape[0] and j < bh.shape[0]:
        if ah[i] < bh[j] or (ah[i] == bh[j] and al[i] < bl[j]):
            i += 1
        elif ah[i] == bh[j] and al[i] == bl[j]:
            s += aw[i] * min(ac[i], bc[j])
            i += 1
            j += 1
        else:
            j += 1
    return s


def histogram_similarity(a: WordHistogram, b: WordHistogram) -> float:
    """Level-weighted histogram intersection over shared keys."""
    return float(_sim(a.hi, a.lo, a.counts, a.weights, b.hi, b.lo, b.counts))


@dataclasses.dataclass(eq=False)
class BagSet:
    """Histograms packed row-wise (CSR style) for batched similarity."""

    offsets: np.ndarray
    hi: np.ndarray
    lo: np.ndarray
    counts: np.ndarray
    weights: np.ndarray

    @classmethod
    def pack(cls, bags) -> "BagSet":
        sizes = np.array([len(b) for b in bags], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        cat = lambda attr, dt: (np.concatenate([getattr(b, attr) for b in bags]).astype(dt)
                                if bags else np.empty(0, dt))
        return cls(offsets, cat("hi", np.int64), cat("lo", np.int64), cat("counts", np.int64),
                   cat("weights", np.float64))

    def __len__(self) -> int:
        return self.offsets.shape[0] - 1

    def __getitem__(self, i: int) -> WordHistogram:
        a, b = self.offsets[i], self.offsets[i + 1]
        return WordHistogram(self.hi[a:b], self.lo[a:b], self.counts[a:b], self.weights[a:b])


@nb.njit(cache=True, nogil=True)
def _sim_matrix(ao, ah, al, ac, aw, bo, bh, bl, bc, symmetric):
    na = ao.shape[0] - 1
    nb_ = bo.shape[0] - 1
    out = np.zeros((na, nb_))
    for i in range(na):
        start = i + 1 if symmetric else 0
        for j in range(start, nb_):
            s = _sim(ah[ao[i]:ao[i + 1]], al[ao[i]:ao[i + 1]], ac[ao[i]:ao[i + 1]], aw[ao[i]:ao[i + 1]],
                     bh[bo[j]:bo[j + 1]], bl[bo[j]:bo[j + 1]], bc[bo[j]:bo[j + 1]])
            out[i, j] = s
            if symmetric:
                out[j, i] = s
    return out


def similarity_matrix(a: BagSet, b: BagSet | None = None) -> np.ndarray:
    """Pairwise similarities; with ``b`` omitted, the symmetric train matrix (diagonal zero)."""
    if b is None:
        return _sim_matrix(a.offsets, a.hi, a.lo, a.counts, a.weights,
                           a.offsets, a.hi, a.lo, a.counts, True)
    return _sim_matrix(a.offsets, a.hi, a.lo, a.counts, a.weights,
                       b.offsets, b.hi, b.lo, b.counts, False)


def nearest_neighbours(sim: np.ndarray, exclude_self: bool = False) -> np.ndarray:
    """Index of the most similar train bag per row; ties go to the earlier train index."""
    sim = np.array(sim, dtype=np.float64)
    if exclude_self:
        np.fill_diagonal(sim, -np.inf)
    return np.argmax(sim, axis=1)


def loocv_accuracy(train_sim: np.ndarray, labels: np.ndarray) -> float:
    """Leave-one-out 1-NN accuracy from a square train similarity matrix."""
    labels = np.asarray(labels)
    if labels.shape[0] < 2:
        raise ValueError("leave-one-out needs at least two bags")
    nn = nearest_neighbours(train_sim, exclude_self=True)
    return float(np.mean(labels[nn] == labels))
