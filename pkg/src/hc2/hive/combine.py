"""Tilted (accuracy^alpha) weighting of component class distributions."""

from __future__ import annotations

import numpy as np

__all__ = ["tilted_weights", "combine"]


def tilted_weights(estimates, alpha: float = 4.0) -> np.ndarray:
    """``estimate ** alpha`` for estimates in ``[0, 1]``."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    e = np.asarray(estimates, dtype=np.float64)
    if np.any(e < 0) or np.any(e > 1) or np.any(~np.isfinite(e)):
        raise ValueError(f"estimates must lie in [0, 1], got {e}")
    return e ** alpha


def combine(distributions, estimates, alpha: float = 4.0) -> np.ndarray:
    """Weighted average of component distributions with weights ``estimate ** alpha``.

    Parameters
    ----------
    distributions : sequence of array_like
        One ``(c,)`` or ``(n, c)`` array per component, all the same shape.
    estimates : sequence of float
        Each component's estimated accuracy.
    alpha : float
        Tilt exponent.

    Returns
    -------
    np.ndarray
        Same shape as one input distribution. A single component passes
        through unchanged, whatever its estimate. Otherwise weights are
        normalised before mixing; when every weight is zero the result is
        uniform.
    """
    dists = [np.asarray(d, dtype=np.float64) for d in distributions]
    if not dists:
        raise ValueError("nothing to combine")
    if len(dists) != len(estimates):
        raise ValueError("one estimate per distribution is required")
    shape = dists[0].shape
    if any(d.shape != shape for d in dists):
        raise ValueError("component distributions disagree in shape")
    w = tilted_weights(estimates, alpha)
    if len(dists) == 1:
        return dists[0].copy()
    total = w.sum()
    if total <= 0:
        return np.full(shape, 1.0 / shape[-1])
    w = w / total
    out = np.zeros(shape)
    for wi, d in zip(w, dists):
        if wi > 0:
            out += wi * d
    return out
