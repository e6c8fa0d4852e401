"""The 22 catch22 time series features, ported to numba from the reference C definitions.

Every function takes a 1D float64 array and returns a float. The reference
implementation computes the features on z-normalised input; callers are
expected to normalise first (see :func:`catch22_all`).
"""

from __future__ import annotations

import numba as nb
import numpy as np

__all__ = ["CATCH22_NAMES", "catch22_feature", "catch22_all", "zscore"]

CATCH22_NAMES = (
    "DN_HistogramMode_5",
    "DN_HistogramMode_10",
    "CO_f1ecac",
    "CO_FirstMin_ac",
    "CO_HistogramAMI_even_2_5",
    "CO_trev_1_num",
    "MD_hrv_classic_pnn40",
    "SB_BinaryStats_mean_longstretch1",
    "SB_TransitionMatrix_3ac_sumdiagcov",
    "PD_PeriodicityWang_th0_01",
    "CO_Embed2_Dist_tau_d_expfit_meandiff",
    "IN_AutoMutualInfoStats_40_gaussian_fmmi",
    "FC_LocalSimple_mean1_tauresrat",
    "DN_OutlierInclude_p_001_mdrmd",
    "DN_OutlierInclude_n_001_mdrmd",
    "SP_Summaries_welch_rect_area_5_1",
    "SB_BinaryStats_diff_longstretch0",
    "SB_MotifThree_quantile_hh",
    "SC_FluctAnal_2_rsrangefit_50_1_logi_prop_r1",
    "SC_FluctAnal_2_dfa_50_1_2_logi_prop_r1",
    "SP_Summaries_welch_rect_centroid",
    "FC_LocalSimple_mean3_stderr",
)

_PI = 3.14159265359  # the reference code uses this truncated constant


# ---------------------------------------------------------------- helpers


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _mean(y):
    s = 0.0
    for v in y:
        s += v
    return s / y.shape[0]


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _stddev(y):
    n = y.shape[0]
    m = _mean(y)
    s = 0.0
    for v in y:
        s += (v - m) * (v - m)
    return np.sqrt(s / (n - 1))


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _median(y):
    t = np.sort(y)
    n = t.shape[0]
    if n % 2 == 1:
        return t[n // 2]
    return 0.5 * (t[n // 2 - 1] + t[n // 2])


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _quantile(y, q):
    t = np.sort(y)
    n = t.shape[0]
    lim = 0.5 / n
    if q < lim:
        return t[0]
    if q > 1.0 - lim:
        return t[n - 1]
    qi = n * q - 0.5
    lo = int(np.floor(qi))
    hi = int(np.ceil(qi))
    if hi == lo:
        return t[lo]
    return t[lo] + (qi - lo) * (t[hi] - t[lo]) / (hi - lo)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _autocorrs(y):
    """Biased autocorrelation at every lag, normalised by lag 0."""
    n = y.shape[0]
    m = _mean(y)
    c = y - m
    out = np.zeros(n)
    for k in range(n):
        s = 0.0
        for t in range(n - k):
            s += c[t] * c[t + k]
        out[k] = s
    if out[0] == 0.0:
        return np.full(n, np.nan)
    return out / out[0]


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _first_zero(ac, maxtau):
    i = 0
    while i < maxtau and ac[i] > 0:
        i += 1
    return i


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _corr(x, y):
    mx = _mean(x)
    my = _mean(y)
    num = 0.0
    dx = 0.0
    dy = 0.0
    for i in range(x.shape[0]):
        a = x[i] - mx
        b = y[i] - my
        num += a * b
        dx += a * a
        dy += b * b
    return num / np.sqrt(dx * dy)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _cov(x, y):
    mx = _mean(x)
    my = _mean(y)
    s = 0.0
    for i in range(x.shape[0]):
        s += (x[i] - mx) * (y[i] - my)
    return s / (x.shape[0] - 1)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _linreg(x, y):
    n = x.shape[0]
    sx = 0.0
    sx2 = 0.0
    sxy = 0.0
    sy = 0.0
    for i in range(n):
        sx += x[i]
        sx2 += x[i] * x[i]
        sxy += x[i] * y[i]
        sy += y[i]
    denom = n * sx2 - sx * sx
    if denom == 0.0:
        return 0.0, 0.0
    return (n * sxy - sx * sy) / denom, (sy * sx2 - sx * sxy) / denom


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _histcounts(y, n_bins):
    lo = y.min()
    hi = y.max()
    step = (hi - lo) / n_bins
    counts = np.zeros(n_bins, dtype=np.int64)
    for v in y:
        # C truncation toward zero of a non-negative ratio
        r = (v - lo) / step
        b = int(r) if r == r else 0
        if b < 0:
            b = 0
        if b >= n_bins:
            b = n_bins - 1
        counts[b] += 1
    edges = np.empty(n_bins + 1)
    for i in range(n_bins + 1):
        edges[i] = lo + step * i
    return counts, edges


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _coarsegrain_quantile(y, n_groups):
    n = y.shape[0]
    th = np.empty(n_groups + 1)
    for i in range(n_groups + 1):
        th[i] = _quantile(y, i / n_groups)
    th[0] -= 1.0
    labels = np.zeros(n, dtype=np.int64)
    for i in range(n_groups):
        for j in range(n):
            if y[j] > th[i] and y[j] <= th[i + 1]:
                labels[j] = i + 1
    return labels


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _nextpow2(n):
    p = 1
    while p < n:
        p *= 2
    return p


# ---------------------------------------------------------------- features


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _histogram_mode(y, n_bins):
    counts, edges = _histcounts(y, n_bins)
    best = 0
    n_max = 1
    out = 0.0
    for i in range(n_bins):
        if counts[i] > best:
            best = counts[i]
            n_max = 1
            out = 0.5 * (edges[i] + edges[i + 1])
        elif counts[i] == best:
            n_max += 1
            out += 0.5 * (edges[i] + edges[i + 1])
    return out / n_max


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _f1ecac(y):
    ac = _autocorrs(y)
    n = y.shape[0]
    thresh = 1.0 / np.exp(1.0)
    for i in range(n - 2):
        if ac[i + 1] < thresh:
            dy = thresh - ac[i]
            return i + dy / (ac[i + 1] - ac[i])
    return float(n)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _first_min_ac(y):
    ac = _autocorrs(y)
    n = y.shape[0]
    for i in range(1, n - 1):
        if ac[i] < ac[i - 1] and ac[i] < ac[i + 1]:
            return float(i)
    return float(n)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _histogram_ami_even_2_5(y):
    tau = 2
    n_bins = 5
    n = y.shape[0] - tau
    lo = y.min()
    hi = y.max()
    step = (hi - lo + 0.2) / n_bins
    edges = np.empty(n_bins + 1)
    for i in range(n_bins + 1):
        edges[i] = lo + step * i - 0.1
    joint = np.zeros((n_bins, n_bins))
    total = 0.0
    for t in range(n):
        b1 = 0
        b2 = 0
        for j in range(n_bins + 1):
            if y[t] < edges[j]:
                b1 = j
                break
        for j in range(n_bins + 1):
            if y[t + tau] < edges[j]:
                b2 = j
                break
        if 1 <= b1 <= n_bins and 1 <= b2 <= n_bins:
            joint[b1 - 1, b2 - 1] += 1.0
            total += 1.0
    joint /= total
    pi = joint.sum(axis=1)
    pj = joint.sum(axis=0)
    ami = 0.0
    for i in range(n_bins):
        for j in range(n_bins):
            if joint[i, j] > 0:
                ami += joint[i, j] * np.log(joint[i, j] / (pi[i] * pj[j]))
    return ami


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _trev_1_num(y):
    s = 0.0
    n = y.shape[0]
    for t in range(n - 1):
        d = y[t + 1] - y[t]
        s += d * d * d
    return s / (n - 1)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _hrv_pnn40(y):
    n = y.shape[0]
    c = 0.0
    for t in range(n - 1):
        if abs(y[t + 1] - y[t]) * 1000.0 > 40.0:
            c += 1.0
    return c / (n - 1)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _mean_longstretch1(y):
    n = y.shape[0]
    m = _mean(y)
    best = 0
    last = 0
    for i in range(n - 1):
        bit = 0 if y[i] - m <= 0 else 1
        if bit == 0 or i == n - 2:
            stretch = i - last
            if stretch > best:
                best = stretch
            last = i
    return float(best)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _diff_longstretch0(y):
    n = y.shape[0]
    best = 0
    last = 0
    for i in range(n - 1):
        bit = 0 if y[i + 1] - y[i] < 0 else 1
        if bit == 1 or i == n - 2:
            stretch = i - last
            if stretch > best:
                best = stretch
            last = i
    return float(best)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _transition_matrix_3ac_sumdiagcov(y):
    n = y.shape[0]
    ac = _autocorrs(y)
    tau = _first_zero(ac, n)
    if tau == 0:
        return np.nan
    n_down = (n - 1) // tau + 1
    down = np.empty(n_down)
    for i in range(n_down):
        down[i] = y[i * tau]
    cg = _coarsegrain_quantile(down, 3)
    T = np.zeros((3, 3))
    for j in range(n_down - 1):
        T[cg[j] - 1, cg[j + 1] - 1] += 1.0
    T /= n_down - 1
    s = 0.0
    for k in range(3):
        s += _cov(T[:, k].copy(), T[:, k].copy())
    return s


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _spline_detrend(y):
    """Residual of a least-squares cubic spline with one interior knot at the midpoint."""
    n = y.shape[0]
    knot = float(n // 2 - 1)
    scale = max(n - 1.0, 1.0)
    A = np.empty((n, 5))
    for i in range(n):
        x = i / scale
        k = (i - knot) / scale
        A[i, 0] = 1.0
        A[i, 1] = x
        A[i, 2] = x * x
        A[i, 3] = x * x * x
        A[i, 4] = k * k * k if k > 0 else 0.0
    coef = np.linalg.lstsq(A, y)[0]
    return y - A @ coef


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _periodicity_wang_th0_01(y):
    n = y.shape[0]
    th = 0.01
    sub = _spline_detrend(y)
    acmax = int(np.ceil(n / 3.0))
    acf = np.empty(acmax)
    for tau in range(1, acmax + 1):
        if n - tau < 2:
            acf[tau - 1] = np.nan
        else:
            acf[tau - 1] = _cov(sub[: n - tau], sub[tau:])
    troughs = np.empty(acmax, dtype=np.int64)
    peaks = np.empty(acmax, dtype=np.int64)
    nt = 0
    npk = 0
    for i in range(1, acmax - 1):
        s_in = acf[i] - acf[i - 1]
        s_out = acf[i + 1] - acf[i]
        if s_in < 0 and s_out > 0:
            troughs[nt] = i
            nt += 1
        elif s_in > 0 and s_out < 0:
            peaks[npk] = i
            npk += 1
    for p in range(npk):
        ipk = peaks[p]
        the_peak = acf[ipk]
        j = -1
        while j + 1 < nt and troughs[j + 1] < ipk:
            j += 1
        if j == -1:
            continue
        if the_peak - acf[troughs[j]] < th:
            continue
        if the_peak < 0:
            continue
        return float(ipk)
    return 0.0


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _embed2_dist_tau_d_expfit_meandiff(y):
    n = y.shape[0]
    ac = _autocorrs(y)
    tau = _first_zero(ac, n)
    if tau > n / 10.0:
        tau = int(np.floor(n / 10.0))
    nd = n - tau - 1
    if nd < 2:
        return np.nan
    d = np.empty(nd)
    for i in range(nd):
        a = y[i + 1] - y[i]
        b = y[i + tau] - y[i + tau + 1]
        d[i] = np.sqrt(a * a + b * b)
    lam = _mean(d)
    sd = _stddev(d)
    if sd < 0.001:
        return 0.0
    n_bins = int(np.ceil((d.max() - d.min()) / (3.5 * sd * nd ** (-1.0 / 3.0))))
    if n_bins == 0:
        return 0.0
    counts, edges = _histcounts(d, n_bins)
    s = 0.0
    for i in range(n_bins):
        expf = np.exp(-(edges[i] + edges[i + 1]) * 0.5 / lam) / lam
        if expf < 0:
            expf = 0.0
        s += abs(counts[i] / nd - expf)
    return s / n_bins


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _auto_mutual_info_40_gaussian_fmmi(y):
    n = y.shape[0]
    tau = 40
    half = int(np.ceil(n / 2.0))
    if tau > half:
        tau = half
    ami = np.empty(tau)
    for i in range(tau):
        lag = i + 1
        if n - lag < 2:
            ami[i] = np.nan
            continue
        ac = _corr(y[: n - lag], y[lag:])
        ami[i] = -0.5 * np.log(1.0 - ac * ac)
    for i in range(1, tau - 1):
        if ami[i] < ami[i - 1] and ami[i] < ami[i + 1]:
            return float(i)
    return float(tau)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _local_simple_residuals(y, train_length):
    n = y.shape[0]
    res = np.empty(n - train_length)
    for i in range(n - train_length):
        est = 0.0
        for j in range(train_length):
            est += y[i + j]
        res[i] = y[i + train_length] - est / train_length
    return res


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _local_simple_mean1_tauresrat(y):
    res = _local_simple_residuals(y, 1)
    res_z = _first_zero(_autocorrs(res), res.shape[0])
    y_z = _first_zero(_autocorrs(y), y.shape[0])
    return float(res_z) / float(y_z)


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _local_simple_mean3_stderr(y):
    if y.shape[0] < 5:
        return np.nan
    return _stddev(_local_simple_residuals(y, 3))


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _outlier_include_001_mdrmd(y, sign):
    n = y.shape[0]
    inc = 0.01
    constant = True
    tot = 0
    work = np.empty(n)
    for i in range(n):
        if y[i] != y[0]:
            constant = False
        work[i] = sign * y[i]
        if work[i] >= 0:
            tot += 1
    if constant:
        return 0.0
    top = work.max()
    if top < inc:
        return 0.0
    n_thresh = int(top / inc + 1)
    mean_gap = np.empty(n_thresh)
    prop = np.empty(n_thresh)
    med_pos = np.empty(n_thresh)
    r = np.empty(n)
    for j in range(n_thresh):
        hs = 0
        for i in range(n):
            if work[i] >= j * inc:
                r[hs] = i + 1
                hs += 1
        # r is ascending, so the gaps telescope and the median is the middle entry
        if hs - 1 > 0:
            mean_gap[j] = (r[hs - 1] - r[0]) / (hs - 1)
        else:
            mean_gap[j] = np.nan
        prop[j] = (hs - 1) * 100.0 / tot
        if hs > 0:
            med = r[(hs - 1) // 2] if hs % 2 == 1 else 0.5 * (r[hs // 2 - 1] + r[hs // 2])
            med_pos[j] = med / (n / 2.0) - 1.0
        else:
            med_pos[j] = np.nan
    mj = 0
    fbi = n_thresh - 1
    for i in range(n_thresh):
        if prop[i] > 2:
            mj = i
        if np.isnan(mean_gap[n_thresh - 1 - i]):
            fbi = n_thresh - 1 - i
    lim = mj if mj < fbi else fbi
    return _median(med_pos[: lim + 1])


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _welch_rect(y):
    """Angular frequencies and spectrum of a single rectangular-window Welch segment."""
    n = y.shape[0]
    nfft = _nextpow2(n)
    m = _mean(y)
    buf = np.zeros(nfft, dtype=np.complex128)
    for i in range(n):
        buf[i] = y[i] - m
    # direct DFT against a twiddle table: pure numba and fast enough at interval sizes
    n_out = nfft // 2 + 1
    cos_t = np.empty(nfft)
    sin_t = np.empty(nfft)
    for t in range(nfft):
        ang = 2.0 * np.pi * t / nfft
        cos_t[t] = np.cos(ang)
        sin_t[t] = np.sin(ang)
    S = np.empty(n_out)
    w = np.empty(n_out)
    for k in range(n_out):
        re = 0.0
        im = 0.0
        for t in range(n):
            idx = (k * t) % nfft
            re += buf[t].real * cos_t[idx]
            im -= buf[t].real * sin_t[idx]
        p = (re * re + im * im) / n
        if 0 < k < n_out - 1:
            p *= 2.0
        w[k] = 2.0 * _PI * k / nfft
        S[k] = p / (2.0 * _PI)
    return w, S


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _welch_rect_area_5_1(y):
    w, S = _welch_rect(y)
    n_out = w.shape[0]
    dw = w[1] - w[0]
    a = 0.0
    for i in range(n_out // 5):
        a += S[i]
    return a * dw


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _welch_rect_centroid(y):
    w, S = _welch_rect(y)
    cs = np.cumsum(S)
    thr = cs[-1] * 0.5
    for i in range(cs.shape[0]):
        if cs[i] > thr:
            return w[i]
    return 0.0


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _motif_three_quantile_hh(y):
    n = y.shape[0]
    yt = _coarsegrain_quantile(y, 3)
    counts = np.zeros((3, 3))
    for t in range(n - 1):
        if yt[t] >= 1 and yt[t + 1] >= 1:
            counts[yt[t] - 1, yt[t + 1] - 1] += 1.0
    hh = 0.0
    for i in range(3):
        for j in range(3):
            p = counts[i, j] / (n - 1.0)
            if p > 0:
                hh -= p * np.log(p)
    return hh


@nb.njit(cache=True, nogil=True, error_model="numpy")
def _fluct_anal_2_50_1_logi_prop_r1(y, lag, dfa):
    n = y.shape[0]
    lin_lo = np.log(5.0)
    lin_hi = np.log(float(n // 2))
    steps = 50
    step = (lin_hi - lin_lo) / (steps - 1)
    tau = np.empty(steps, dtype=np.int64)
    for i in range(steps):
        tau[i] = int(np.round(np.exp(lin_lo + i * step)))
    # drop consecutive duplicates exactly as the reference shifting loop does
    n_tau = steps
    for i in range(steps - 1):
        while tau[i] == tau[i + 1] and i < n_tau - 1:
            for j in range(i + 1, steps - 1):
                tau[j] = tau[j + 1]
            n_tau -= 1
    if n_tau < 12:
        return 0.0
    size_cs = n // lag
    ycs = np.empty(size_cs)
    ycs[0] = y[0]
    for i in range(size_cs - 1):
        ycs[i + 1] = ycs[i] + y[(i + 1) * lag]
    x_reg = np.arange(1, tau[n_tau - 1] + 1).astype(np.float64)
    F = np.zeros(n_tau)
    for i in range(n_tau):
        t = tau[i]
        n_buf = size_cs // t
        for j in range(n_buf):
            buf = ycs[j * t : (j + 1) * t].copy()
            m, b = _linreg(x_reg[:t], buf)
            for k in range(t):
                buf[k] -= (k + 1) * m + b
            if dfa:
                for k in range(t):
                    F[i] += buf[k] * buf[k]
            else:
                d = buf.max() - buf.min()
                F[i] += d * d
        if dfa:
            F[i] = np.sqrt(F[i] / (n_buf * t))
        else:
            F[i] = np.sqrt(F[i] / n_buf)
    logtt = np.log(tau[:n_tau].astype(np.float64))
    logff = np.log(F)
    min_points = 6
    n_sserr = n_tau - 2 * min_points + 1
    sserr = np.zeros(n_sserr)
    for i in range(min_points, n_tau - min_points + 1):
        m1, b1 = _linreg(logtt[:i], logff[:i])
        m2, b2 = _linreg(logtt[i - 1 :], logff[i - 1 :])
        e1 = 0.0
        for j in range(i):
            r = logtt[j] * m1 + b1 - logff[j]
            e1 += r * r
        e2 = 0.0
        for j in range(i - 1, n_tau):
            r = logtt[j] * m2 + b2 - logff[j]
            e2 += r * r
        sserr[i - min_points] = np.sqrt(e1) + np.sqrt(e2)
    lowest = sserr.min()
    first = 0.0
    for i in range(n_sserr):
        if sserr[i] == lowest:
            first = float(i + min_points - 1)
            break
    return (first + 1.0) / n_tau


# ---------------------------------------------------------------- dispatch


@nb.njit(cache=True, nogil=True, error_model="numpy")
def catch22_feature(fid, y):
    """Feature ``fid`` (index into ``CATCH22_NAMES``) of series ``y``.

    Non-finite results are returned as-is; DrCIF maps them to 0.
    """
    if fid == 0:
        return _histogram_mode(y, 5)
    if fid == 1:
        return _histogram_mode(y, 10)
    if fid == 2:
        return _f1ecac(y)
    if fid == 3:
        return _first_min_ac(y)
    if fid == 4:
        return _histogram_ami_even_2_5(y)
    if fid == 5:
        return _trev_1_num(y)
    if fid == 6:
        return _hrv_pnn40(y)
    if fid == 7:
        return _mean_longstretch1(y)
    if fid == 8:
        return _transition_matrix_3ac_sumdiagcov(y)
    if fid == 9:
        return _periodicity_wang_th0_01(y)
    if fid == 10:
        return _embed2_dist_tau_d_expfit_meandiff(y)
    if fid == 11:
        return _auto_mutual_info_40_gaussian_fmmi(y)
    if fid == 12:
        return _local_simple_mean1_tauresrat(y)
    if fid == 13:
        return _outlier_include_001_mdrmd(y, 1.0)
    if fid == 14:
        return _outlier_include_001_mdrmd(y, -1.0)
    if fid == 15:
        return _welch_rect_area_5_1(y)
    if fid == 16:
        return _diff_longstretch0(y)
    if fid == 17:
        return _motif_three_quantile_hh(y)
    if fid == 18:
        return _fluct_anal_2_50_1_logi_prop_r1(y, 1, False)
    if fid == 19:
        return _fluct_anal_2_50_1_logi_prop_r1(y, 2, True)
    if fid == 20:
        return _welch_rect_centroid(y)
    if fid == 21:
        return _local_simple_mean3_stderr(y)
    return np.nan


@nb.njit(cache=True, nogil=True, error_model="numpy")
def zscore(y):
    """Z-normalise with sequential sums and the sample standard deviation.

    Matches the reference arithmetic bit for bit, which matters for the
    histogram features on discrete-valued series. Constant input maps to zeros.
    """
    n = y.shape[0]
    out = np.zeros(n)
    if n < 2:
        return out
    m = _mean(y)
    sd = _stddev(y)
    if not sd > 0:
        return out
    for i in range(n):
        out[i] = (y[i] - m) / sd
    return out


def catch22_all(y, normalise: bool = True) -> np.ndarray:
    """All 22 features of ``y``; z-normalises first unless told otherwise."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    if normalise:
        y = zscore(y)
    return np.array([catch22_feature(i, y) for i in range(22)])
