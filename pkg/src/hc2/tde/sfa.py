"""Symbolic Fourier Approximation: windowed DFT coefficients, breakpoints and packed words."""

from __future__ import annotations

import numba as nb
import numpy as np

from hc2.core import STD_EPS

__all__ = [
    "ALPHABET_SIZE",
    "sfa_coefficients",
    "window_coefficients",
    "fit_breakpoints",
    "mcb_breakpoints",
    "igb_breakpoints",
    "sfa_word",
    "words_from_coefficients",
    "unpack_word",
]

ALPHABET_SIZE = 4


@nb.njit(cache=True, nogil=True)
def _window_coefficients(x, w, l, normalise, stride):
    """Coefficients of every window start ``0, stride, 2*stride, ..`` as rows (re, im interleaved)."""
    m = x.shape[0]
    n_win = (m - w) // stride + 1
    half = l // 2
    first = 1 if normalise else 0
    cos_t = np.empty(w)
    sin_t = np.empty(w)
    for t in range(w):
        ang = 2.0 * np.pi * t / w
        cos_t[t] = np.cos(ang)
        sin_t[t] = np.sin(ang)
    out = np.zeros((n_win, l))
    buf = np.empty(w)
    for j in range(n_win):
        s0 = j * stride
        mu = 0.0
        for t in range(w):
            mu += x[s0 + t]
        mu /= w
        sd = 1.0
        if normalise:
            var = 0.0
            for t in range(w):
                var += (x[s0 + t] - mu) * (x[s0 + t] - mu)
            sd = np.sqrt(var / w)
            if sd <= STD_EPS:
                continue  # zero-variance window: all-zero coefficients
            for t in range(w):
                buf[t] = (x[s0 + t] - mu) / sd
        else:
            for t in range(w):
                buf[t] = x[s0 + t]
        for f in range(half):
            k = f + first
            re = 0.0
            im = 0.0
            for t in range(w):
                idx = (k * t) % w
                re += buf[t] * cos_t[idx]
                im -= buf[t] * sin_t[idx]
            out[j, 2 * f] = re
            out[j, 2 * f + 1] = im
    return out


def window_coefficients(series, window: int, word_length: int, normalise: bool, stride: int = 1) -> np.ndarray:
    """SFA coefficients for each window of ``series``; shape ``(n_windows, word_length)``."""
    series = np.ascontiguousarray(series, dtype=np.float64)
    if word_length % 2 or word_length < 2:
        raise ValueError("word length must be a positive even number")
    if not 1 <= window <= series.shape[0]:
        raise ValueError(f"window {window} does not fit a series of length {series.shape[0]}")
    return _window_coefficients(series, int(window), int(word_length), bool(normalise), int(stride))


def sfa_coefficients(window, word_length: int, normalise: bool) -> np.ndarray:
    """The first ``word_length / 2`` complex DFT coefficients of one window, as (re, im) pairs.

    With ``normalise`` the window is z-normalised (population std) and the
    zero-frequency term is skipped. Uses the ``exp(-2 pi i k t / w)`` convention.
    """
    window = np.ascontiguousarray(window, dtype=np.float64)
    return window_coefficients(window, window.shape[0], word_length, normalise)[0]


def mcb_breakpoints(values: np.ndarray, alphabet_size: int = ALPHABET_SIZE) -> np.ndarray:
    """Per column, thresholds at the ``1/a .. (a-1)/a`` linear-interpolation quantiles."""
    values = np.asarray(values, dtype=np.float64)
    qs = np.arange(1, alphabet_size) / alphabet_size
    return np.ascontiguousarray(np.quantile(values, qs, axis=0).T)


@nb.njit(cache=True, nogil=True)
def _entropy(counts, total):
    h = 0.0
    for k in range(counts.shape[0]):
        if counts[k] > 0:
            p = counts[k] / total
            h -= p * np.log2(p)
    return h


@nb.njit(cache=True, nogil=True)
def _best_split(v, y, n_classes):
    """Best information-gain midpoint of sorted ``v`` (labels ``y``): (gain, threshold, split index)."""
    n = v.shape[0]
    total = np.zeros(n_classes)
    for i in range(n):
        total[y[i]] += 1
    h = _entropy(total, n)
    left = np.zeros(n_classes)
    right = total.copy()
    best_gain = 0.0
    best_thr = 0.0
    best_k = -1
    best_margin = -1.0
    for k in range(n - 1):
        left[y[k]] += 1
        right[y[k]] -= 1
        if v[k + 1] <= v[k]:
            continue
        nl = k + 1.0
        nr = n - nl
        gain = h - nl / n * _entropy(left, nl) - nr / n * _entropy(right, nr)
        margin = 0.5 * (v[k + 1] - v[k])
        if gain > best_gain + 1e-12 or (best_k >= 0 and gain >= best_gain - 1e-12 and margin > best_margin):
            best_gain = gain
            best_thr = v[k] + margin
            best_k = k + 1
            best_margin = margin
    return best_gain, best_thr, best_k


@nb.njit(cache=True, nogil=True)
def _igb_column(v, y, n_classes, fallback):
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    sy = y[order]
    out = np.empty(3)
    g, thr, k = _best_split(sv, sy, n_classes)
    if k < 0 or g <= 1e-12:
        return fallback.copy()
    out[1] = thr
    g_l, thr_l, k_l = _best_split(sv[:k], sy[:k], n_classes)
    out[0] = thr_l if (k_l >= 0 and g_l > 1e-12) else thr
    g_r, thr_r, k_r = _best_split(sv[k:], sy[k:], n_classes)
    out[2] = thr_r if (k_r >= 0 and g_r > 1e-12) else thr
    return out


def igb_breakpoints(values: np.ndarray, labels: np.ndarray, n_classes: int) -> np.ndarray:
    """Per column, three thresholds from information-gain splits two levels deep.

    A column with no positive-gain split falls back to its quantile
    thresholds; a side that cannot be split repeats the parent threshold.
    """
    values = np.asarray(values, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    fallback = mcb_breakpoints(values, 4)
    out = np.empty((values.shape[1], 3))
    for c in range(values.shape[1]):
        out[c] = _igb_column(np.ascontiguousarray(values[:, c]), labels, int(n_classes), fallback[c])
    return out


def fit_breakpoints(method: str, values, labels=None, n_classes: int | None = None) -> np.ndarray:
    """Breakpoint matrix (one row of three ascending thresholds per coefficient)."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] < ALPHABET_SIZE:
        raise ValueError("need at least four training values per coefficient")
    if method == "MCB":
        return mcb_breakpoints(values)
    if method == "IGB":
        if labels is None:
            raise ValueError("IGB needs labels")
        n_classes = int(np.max(labels)) + 1 if n_classes is None else n_classes
        return igb_breakpoints(values, labels, n_classes)
    raise ValueError(f"unknown binning method {method!r}")


@nb.njit(cache=True, nogil=True)
def _words(coefs, bp):
    n, l = coefs.shape
    out = np.empty(n, dtype=np.int64)
    for j in range(n):
        word = 0
        for i in range(l):
            letter = 0
            for t in range(bp.shape[1]):
                if coefs[j, i] >= bp[i, t]:
                    letter += 1
            word = word * ALPHABET_SIZE + letter
        out[j] = word
    return out


def words_from_coefficients(coefs, breakpoints) -> np.ndarray:
    """Packed base-4 words, first coefficient most significant; equal-to-threshold goes up."""
    return _words(np.ascontiguousarray(coefs, dtype=np.float64), np.ascontiguousarray(breakpoints, dtype=np.float64))


def sfa_word(coefficients, breakpoints) -> int:
    return int(words_from_coefficients(np.atleast_2d(coefficients), breakpoints)[0])


def unpack_word(word: int, word_length: int) -> list[int]:
    letters = []
    for _ in range(word_length):
        letters.append(word % ALPHABET_SIZE)
        word //= ALPHABET_SIZE
    return letters[::-1]
