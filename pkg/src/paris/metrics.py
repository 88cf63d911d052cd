"""Distance metrics over equal-length real vectors, plus FFT feature
extraction for frequency-domain clustering.

Six metrics are supported: l1, l2, dtw, corr (1 - Pearson correlation),
kl (symmetrized Kullback-Leibler) and js (Jensen-Shannon). The divergence
metrics operate on count series after additive-epsilon normalization to a
probability vector, since raw series contain zeros.

Scalar and batch entry points share the same elementwise expressions, so a
pairwise matrix entry equals the corresponding single-pair call bit-for-bit.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import (
    BadComponentCount,
    BandInfeasible,
    EmptyInput,
    LengthMismatch,
    NotADistribution,
)

# Smoothing added before normalizing a count series to a distribution.
EPSILON = 1e-9


class MetricId(str, Enum):
    """Wire names for the supported metrics (config/CLI spelling).

    Enum definition order is the canonical tie-break order for model
    selection.
    """

    L1 = "l1"
    L2 = "l2"
    DTW = "dtw"
    CORRELATION = "corr"
    SYMMETRIZED_KL = "kl"
    JS = "js"


DIVERGENCE_METRICS = (MetricId.SYMMETRIZED_KL, MetricId.JS)
ELEMENTWISE_METRICS = (MetricId.L1, MetricId.L2, MetricId.CORRELATION)


def metric_order(metric: MetricId) -> int:
    """Position in the canonical tie-break order."""
    return list(MetricId).index(metric)


def _elementwise_formula(metric: MetricId, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """L1 / L2 / correlation distance along the last axis (broadcastable)."""
    if metric is MetricId.L1:
        return np.sum(np.abs(a - b), axis=-1)
    if metric is MetricId.L2:
        return np.sqrt(np.sum((a - b) ** 2, axis=-1))
    if metric is MetricId.CORRELATION:
        ac = a - np.mean(a, axis=-1, keepdims=True)
        bc = b - np.mean(b, axis=-1, keepdims=True)
        na = np.sqrt(np.sum(ac * ac, axis=-1))
        nb = np.sqrt(np.sum(bc * bc, axis=-1))
        dot = np.sum(ac * bc, axis=-1)
        denom = na * nb
        r = dot / np.where(denom == 0, 1.0, denom)
        dist = 1.0 - r
        # Degenerate (zero-variance) series: identical degeneracy is distance
        # 0, one-sided degeneracy is distance 1.
        both_flat = (na == 0) & (nb == 0)
        one_flat = (na == 0) ^ (nb == 0)
        dist = np.where(both_flat, 0.0, dist)
        dist = np.where(one_flat, 1.0, dist)
        return dist
    raise ValueError(f"not an elementwise metric: {metric}")


def dist_elementwise(metric: MetricId, x, y) -> float:
    """L1, L2 or correlation distance between two equal-length vectors."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths {a.shape} vs {b.shape}")
    return float(_elementwise_formula(metric, a, b))


def dist_dtw(x, y, band: int | None = None) -> float:
    """Dynamic time warping distance with |a-b| ground cost.

    Monotone warping paths with steps (1,0), (0,1), (1,1), anchored at both
    ends. `band` restricts alignment to |i-j| <= band (Sakoe-Chiba).

    The DP accumulates cell by cell, so on small instances the result is
    bit-identical to explicit enumeration of all warping paths.
    """
    a = np.asarray(x, dtype=float).ravel()
    b = np.asarray(y, dtype=float).ravel()
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise EmptyInput("dtw requires nonempty inputs")
    if band is not None:
        if band < abs(n - m):
            raise BandInfeasible(f"band {band} < length difference {abs(n - m)}")
    cost = np.abs(a[:, None] - b[None, :])
    dp = np.full((n + 1, m + 1), np.inf)
    dp[0, 0] = 0.0
    # Anti-diagonal sweep: cells on diagonal d depend only on d-1 and d-2.
    for d in range(2, n + m + 1):
        i_lo = max(1, d - m)
        i_hi = min(n, d - 1)
        if band is not None:
            # |(i-1)-(j-1)| <= band with j = d - i
            i_lo = max(i_lo, -((band - d) // 2))  # ceil((d - band) / 2)
            i_hi = min(i_hi, (d + band) // 2)
        if i_lo > i_hi:
            continue
        rows = np.arange(i_lo, i_hi + 1)
        cols = d - rows
        best = np.minimum(
            dp[rows - 1, cols], np.minimum(dp[rows, cols - 1], dp[rows - 1, cols - 1])
        )
        dp[rows, cols] = cost[rows - 1, cols - 1] + best
    return float(dp[n, m])


def normalize_to_distribution(x, epsilon: float = EPSILON) -> np.ndarray:
    """Shift by epsilon and normalize to sum 1.

    An all-zero input with epsilon 0 falls back to the uniform vector.
    """
    a = np.asarray(x, dtype=float)
    shifted = a + epsilon
    total = np.sum(shifted, axis=-1, keepdims=True)
    uniform = np.full_like(shifted, 1.0 / shifted.shape[-1])
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(total > 0, shifted / np.where(total > 0, total, 1.0), uniform)
    return out


def _kl_sum(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.sum(p * np.log(p / q), axis=-1)


def _divergence_formula(
    metric: MetricId, p: np.ndarray, q: np.ndarray, js_literal: bool = False
) -> np.ndarray:
    if metric is MetricId.SYMMETRIZED_KL:
        return 0.5 * (_kl_sum(p, q) + _kl_sum(q, p))
    if metric is MetricId.JS:
        mid = 0.5 * (p + q)
        if js_literal:
            # Non-symmetric variant 0.5*KL(p,M) + 0.5*KL(M,q); off by default.
            return 0.5 * _kl_sum(p, mid) + 0.5 * _kl_sum(mid, q)
        return 0.5 * _kl_sum(p, mid) + 0.5 * _kl_sum(q, mid)
    raise ValueError(f"not a divergence metric: {metric}")


def _check_distribution(name: str, p: np.ndarray) -> None:
    if abs(float(np.sum(p)) - 1.0) > 1e-6:
        raise NotADistribution(f"{name} does not sum to 1")
    if np.any(p <= 0):
        raise NotADistribution(f"{name} has a component <= 0")


def dist_divergence(metric: MetricId, p, q, js_literal: bool = False) -> float:
    """Symmetrized KL or Jensen-Shannon divergence between two strictly
    positive probability vectors (natural log)."""
    a = np.asarray(p, dtype=float)
    b = np.asarray(q, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"lengths {a.shape} vs {b.shape}")
    _check_distribution("p", a)
    _check_distribution("q", b)
    return float(_divergence_formula(metric, a, b, js_literal))


def distance(
    metric: MetricId,
    x,
    y,
    *,
    dtw_band: int | None = None,
    epsilon: float = EPSILON,
    js_literal: bool = False,
) -> float:
    """Distance between two raw series under any supported metric.

    Divergence metrics normalize both series to distributions first.
    """
    if metric is MetricId.DTW:
        return dist_dtw(x, y, band=dtw_band)
    if metric in DIVERGENCE_METRICS:
        a = np.asarray(x, dtype=float)
        b = np.asarray(y, dtype=float)
        if a.shape != b.shape:
            raise LengthMismatch(f"lengths {a.shape} vs {b.shape}")
        return float(
            _divergence_formula(
                metric,
                normalize_to_distribution(a, epsilon),
                normalize_to_distribution(b, epsilon),
                js_literal,
            )
        )
    return dist_elementwise(metric, x, y)


# Cap on broadcast temporaries in pairwise_distances (floats).
_BLOCK_ELEMENTS = 4_000_000


def pairwise_distances(
    metric: MetricId,
    xs,
    ys=None,
    *,
    dtw_band: int | None = None,
    epsilon: float = EPSILON,
    js_literal: bool = False,
) -> np.ndarray:
    """Distance matrix between the rows of `xs` and `ys` (or `xs` with itself).

    Entry [i, j] equals distance(metric, xs[i], ys[j]) exactly; the batch path
    evaluates the same elementwise expressions, just blocked for memory.
    """
    a = np.asarray(xs, dtype=float)
    b = a if ys is None else np.asarray(ys, dtype=float)
    if a.ndim != 2 or b.ndim != 2:
        raise LengthMismatch("pairwise_distances expects 2-D inputs")
    if a.shape[1] != b.shape[1]:
        raise LengthMismatch(f"row lengths {a.shape[1]} vs {b.shape[1]}")
    n, m = a.shape[0], b.shape[0]
    if metric is MetricId.DTW:
        out = np.empty((n, m))
        for i in range(n):
            for j in range(m):
                out[i, j] = dist_dtw(a[i], b[j], band=dtw_band)
        return out
    if metric in DIVERGENCE_METRICS:
        a_norm = normalize_to_distribution(a, epsilon)
        b_norm = a_norm if ys is None else normalize_to_distribution(b, epsilon)
        a, b = a_norm, b_norm

        def formula(lhs, rhs):
            return _divergence_formula(metric, lhs, rhs, js_literal)

    else:

        def formula(lhs, rhs):
            return _elementwise_formula(metric, lhs, rhs)

    out = np.empty((n, m))
    block = max(1, _BLOCK_ELEMENTS // max(1, m * a.shape[1]))
    for start in range(0, n, block):
        stop = min(n, start + block)
        out[start:stop] = formula(a[start:stop, None, :], b[None, :, :])
    return out


def fft_features(x, n_components: int) -> np.ndarray:
    """Discrete Fourier transform features: the first `n_components`
    coefficients (DC included) laid out as interleaved [Re, Im] pairs."""
    a = np.asarray(x, dtype=float).ravel()
    if not 1 <= n_components <= len(a) // 2:
        raise BadComponentCount(
            f"n_components must be in 1..{len(a) // 2}, got {n_components}"
        )
    spectrum = np.fft.fft(a)[:n_components]
    out = np.empty(2 * n_components)
    out[0::2] = spectrum.real
    out[1::2] = spectrum.imag
    return out
