"""Random dilated convolution kernels (max and PPV features) and a ridge classifier with LOO alpha selection."""

from __future__ import annotations

import dataclasses
import math

import numba as nb
import numpy as np

__all__ = [
    "Kernel",
    "KernelSet",
    "sample_kernel",
    "sample_kernels",
    "apply_kernel",
    "transform",
    "ridge_solve",
    "RidgeModel",
    "fit_ridge_cv",
    "RIDGE_ALPHAS",
]

KERNEL_LENGTHS = (7, 9, 11)
RIDGE_ALPHAS = np.logspace(-3, 3, 10)


@dataclasses.dataclass(eq=False)
class Kernel:
    """One kernel; ``weights`` has one row of ``length`` taps per channel in ``channels``."""

    length: int
    weights: np.ndarray
    bias: float
    dilation: int
    padding: int
    channels: np.ndarray

    def n_positions(self, m: int) -> int:
        return m + 2 * self.padding - (self.length - 1) * self.dilation


def sample_kernel(m: int, d: int, rng: np.random.Generator) -> Kernel:
    """Draw one kernel for series of length ``m`` with ``d`` dimensions.

    Draw order is length, channel count and channels, weights, bias,
    dilation, padding. Kernels with no valid output position are redrawn.
    """
    while True:
        l = int(rng.choice(KERNEL_LENGTHS))
        if d > 1:
            n_ch = int(math.floor(2 ** rng.uniform(0, math.log2(d))))
            channels = np.sort(rng.choice(d, size=n_ch, replace=False)).astype(np.int64)
        else:
            channels = np.zeros(1, dtype=np.int64)
        w = rng.standard_normal((channels.shape[0], l))
        w -= w.mean(axis=1, keepdims=True)
        bias = float(rng.uniform(-1.0, 1.0))
        hi = max(0.0, math.log2((m - 1) / (l - 1)))
        dilation = int(math.floor(2 ** rng.uniform(0, hi)))
        padding = ((l - 1) * dilation) // 2 if rng.integers(2) == 1 else 0
        k = Kernel(l, w, bias, dilation, padding, channels)
        if k.n_positions(m) > 0:
            return k


@dataclasses.dataclass(eq=False)
class KernelSet:
    """Kernels packed into flat arrays for the compiled transform."""

    lengths: np.ndarray
    dilations: np.ndarray
    paddings: np.ndarray
    biases: np.ndarray
    weights: np.ndarray
    weight_offsets: np.ndarray
    channels: np.ndarray
    channel_offsets: np.ndarray

    @classmethod
    def pack(cls, kernels) -> "KernelSet":
        w_off = np.concatenate([[0], np.cumsum([k.weights.size for k in kernels])]).astype(np.int64)
        c_off = np.concatenate([[0], np.cumsum([k.channels.size for k in kernels])]).astype(np.int64)
        return cls(
            np.array([k.length for k in kernels], dtype=np.int64),
            np.array([k.dilation for k in kernels], dtype=np.int64),
            np.array([k.padding for k in kernels], dtype=np.int64),
            np.array([k.bias for k in kernels], dtype=np.float64),
            np.concatenate([k.weights.ravel() for k in kernels]).astype(np.float64),
            w_off,
            np.concatenate([k.channels for k in kernels]).astype(np.int64),
            c_off,
        )

    def __len__(self) -> int:
        return self.lengths.shape[0]


def sample_kernels(m: int, d: int, n_kernels: int, rng: np.random.Generator) -> KernelSet:
    return KernelSet.pack([sample_kernel(m, d, rng) for _ in range(n_kernels)])


@nb.njit(cache=True, nogil=True)
def _apply(x, length, weights, bias, dilation, padding, channels):
    m = x.shape[1]
    n_pos = m + 2 * padding - (length - 1) * dilation
    best = -np.inf
    ppv = 0
    for g in range(n_pos):
        v = bias
        start = g - padding
        for c in range(channels.shape[0]):
            row = x[channels[c]]
            for i in range(length):
                idx = start + i * dilation
                if 0 <= idx < m:
                    v += weights[c * length + i] * row[idx]
        if v > best:
            best = v
        if v > 0:
            ppv += 1
    return best, ppv / n_pos


@nb.njit(cache=True, nogil=True)
def _transform(X, lengths, dilations, paddings, biases, weights, w_off, channels, c_off):
    n = X.shape[0]
    k = lengths.shape[0]
    out = np.empty((n, 2 * k))
    for i in range(n):
        for j in range(k):
            mx, ppv = _apply(X[i], lengths[j], weights[w_off[j]:w_off[j + 1]], biases[j],
                             dilations[j], paddings[j], channels[c_off[j]:c_off[j + 1]])
            out[i, 2 * j] = mx
            out[i, 2 * j + 1] = ppv
    return out


def apply_kernel(kernel: Kernel, case) -> tuple[float, float]:
    """(max, ppv) of one kernel on one case ``(d, m)`` (or a 1D series)."""
    x = np.ascontiguousarray(np.atleast_2d(case), dtype=np.float64)
    if kernel.n_positions(x.shape[1]) <= 0:
        raise ValueError("kernel has no valid output position for this series length")
    mx, ppv = _apply(x, kernel.length, np.ascontiguousarray(kernel.weights.ravel()), kernel.bias,
                     kernel.dilation, kernel.padding, kernel.channels)
    return float(mx), float(ppv)


def transform(kernels: KernelSet, X) -> np.ndarray:
    """``(n, 2k)`` features: columns ``2j`` and ``2j+1`` are kernel ``j``'s max and PPV."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    return _transform(X, kernels.lengths, kernels.dilations, kernels.paddings, kernels.biases,
                      kernels.weights, kernels.weight_offsets, kernels.channels, kernels.channel_offsets)


def ridge_solve(X, Y, alpha: float) -> np.ndarray:
    """Coefficients of ``min ||Y - X b||^2 + alpha ||b||^2`` (no intercept), via the SVD."""
    U, s, Vt = np.linalg.svd(np.asarray(X, dtype=np.float64), full_matrices=False)
    Y = np.asarray(Y, dtype=np.float64)
    d = s / (s * s + alpha)
    UtY = U.T @ Y
    return Vt.T @ (d[:, None] * UtY if Y.ndim == 2 else d * UtY)


@dataclasses.dataclass(eq=False)
class RidgeModel:
    """One-vs-rest ridge scores over standardised features; argmax picks the class."""

    classes: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    coef: np.ndarray
    intercept: np.ndarray
    alpha: float

    def decision_function(self, F) -> np.ndarray:
        Z = (np.asarray(F, dtype=np.float64) - self.mean) / self.scale
        return Z @ self.coef + self.intercept

    def predict(self, F) -> np.ndarray:
        if self.classes.shape[0] == 1:
            return np.full(np.asarray(F).shape[0], self.classes[0], dtype=np.int64)
        return self.classes[np.argmax(self.decision_function(F), axis=1)]


def fit_ridge_cv(F, y, alphas=RIDGE_ALPHAS) -> RidgeModel:
    """Ridge classifier with alpha chosen by exact leave-one-out error.

    Features are standardised (zero-variance columns keep scale 1); targets
    are +-1 one-vs-rest columns for the classes present. The intercept is
    unpenalised, so the hat matrix is ``11'/n + U diag(s^2/(s^2+a)) U'`` and
    leave-one-out residuals are ``e_i / (1 - h_ii)``. Ties go to the smaller alpha.
    """
    F = np.asarray(F, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = F.shape[0]
    classes = np.unique(y)
    mean = F.mean(axis=0)
    sd = F.std(axis=0)
    scale = np.where(sd > 0, sd, 1.0)
    if classes.shape[0] == 1:
        return RidgeModel(classes, mean, scale, np.zeros((F.shape[1], 1)), np.ones(1), float(alphas[0]))
    Z = (F - mean) / scale
    Zc = Z - Z.mean(axis=0)
    Y = np.where(y[:, None] == classes[None, :], 1.0, -1.0)
    ybar = Y.mean(axis=0)
    Yc = Y - ybar
    U, s, Vt = np.linalg.svd(Zc, full_matrices=False)
    UtY = U.T @ Yc
    best, best_err = 0, np.inf
    for a_i, a in enumerate(alphas):
        shrink = s * s / (s * s + a)
        fitted = U @ (shrink[:, None] * UtY)
        h = 1.0 / n + (U * U) @ shrink
        resid = (Yc - fitted) / (1.0 - h)[:, None]
        err = float(np.sum(resid * resid))
        if err < best_err * (1 - 1e-12):
            best, best_err = a_i, err
    a = float(alphas[best])
    coef = Vt.T @ ((s / (s * s + a))[:, None] * UtY)
    intercept = ybar - Z.mean(axis=0) @ coef
    return RidgeModel(classes, mean, scale, coef, intercept, a)
