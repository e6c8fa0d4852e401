"""The 29-feature interval pool: seven summary statistics followed by catch22.

Feature ids 0..6 are mean, std, slope, median, iqr, min and max on the raw
slice; ids 7..28 are the catch22 features in canonical order, computed on
the z-normalised slice. Non-finite values are replaced by zero.
"""

from __future__ import annotations

import numba as nb
import numpy as np

from hc2.drcif.catch22 import CATCH22_NAMES, catch22_feature, zscore

__all__ = ["FEATURE_NAMES", "N_FEATURES", "summary_feature", "interval_features"]

FEATURE_NAMES = ("mean", "std", "slope", "median", "iqr", "min", "max") + CATCH22_NAMES
N_FEATURES = len(FEATURE_NAMES)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _lin_quantile(sorted_y, q):
    pos = q * (sorted_y.shape[0] - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, sorted_y.shape[0] - 1)
    frac = pos - lo
    return sorted_y[lo] + (sorted_y[hi] - sorted_y[lo]) * frac


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _feature(fid, s):
    n = s.shape[0]
    if fid == 0:
        return np.mean(s)
    if fid == 1:
        mu = np.mean(s)
        acc = 0.0
        for v in s:
            acc += (v - mu) * (v - mu)
        return np.sqrt(acc / (n - 1))
    if fid == 2:
        xm = (n - 1) / 2.0
        ym = np.mean(s)
        num = 0.0
        den = 0.0
        for i in range(n):
            num += (i - xm) * (s[i] - ym)
            den += (i - xm) * (i - xm)
        return num / den
    if fid == 3:
        return _lin_quantile(np.sort(s), 0.5)
    if fid == 4:
        ss = np.sort(s)
        return _lin_quantile(ss, 0.75) - _lin_quantile(ss, 0.25)
    if fid == 5:
        return np.min(s)
    if fid == 6:
        return np.max(s)
    z = zscore(s)
    constant = True
    for v in z:
        if v != 0.0:
            constant = False
            break
    if constant:
        return 0.0
    return catch22_feature(fid - 7, z)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _safe_feature(fid, s):
    v = _feature(fid, s)
    if not np.isfinite(v):
        return 0.0
    return v


def summary_feature(feature_id: int, values) -> float:
    """One pool feature of a slice (at least three values)."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] < 3:
        raise ValueError("a slice needs at least three values")
    if not 0 <= feature_id < N_FEATURES:
        raise ValueError(f"feature id must lie in [0, {N_FEATURES})")
    return float(_safe_feature(int(feature_id), values))


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _interval_features(X, dims, starts, lengths, fids):
    n = X.shape[0]
    k = starts.shape[0]
    a = fids.shape[0]
    out = np.empty((n, k * a))
    for i in range(n):
        for j in range(k):
            s = np.ascontiguousarray(X[i, dims[j], starts[j]:starts[j] + lengths[j]])
            for c in range(a):
                out[i, j * a + c] = _safe_feature(fids[c], s)
    return out


def interval_features(X, dims, starts, lengths, feature_ids) -> np.ndarray:
    """Feature block for one representation: intervals outer, features inner.

    ``X`` has shape ``(n, d, rm)``; the result has ``len(starts) * len(feature_ids)`` columns.
    """
    return _interval_features(
        np.ascontiguousarray(X, dtype=np.float64),
        np.asarray(dims, dtype=np.int64),
        np.asarray(starts, dtype=np.int64),
        np.asarray(lengths, dtype=np.int64),
        np.asarray(feature_ids, dtype=np.int64),
    )
