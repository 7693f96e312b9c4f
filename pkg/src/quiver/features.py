"""Timeseries features used by the three inference pipelines.

Co-location compares a candidate point's trend against the perturbed
reference signal with range/mean/std, a dynamic-time-warping distance and a
low-frequency FFT distance ("LFT": Euclidean distance between the magnitude
spectra of the z-normalized signals with everything above 0.0005 Hz zeroed,
i.e. only periods slower than ~30 minutes are compared).

Type identification summarizes one slice of a trend with six statistics:
mean, population variance, dominant (non-DC) frequency, noise (variance of
the residual against a piecewise-constant 1-hour approximation), skewness
m3/m2^1.5 and non-excess kurtosis m4/m2^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySeries, LengthMismatch, SeriesTooShort

LFT_CUTOFF_HZ = 5e-4
NOISE_SEGMENT_S = 3600.0

COLOCATION_FEATURES = ("range", "mean", "std", "dtw", "lft")
WEEKLY_FEATURES = ("mean", "variance", "dominant_frequency", "noise", "skewness", "kurtosis")

WEEK_S = 7 * 86400.0
WEEKS_PER_YEAR = 53


@dataclass(frozen=True)
class FeatureVector:
    """Named feature values for one point over one analysis window."""

    values: dict[str, float]
    point_id: str
    window: tuple[float, float]
    feature_set: str  # "colocation" | "weekly"


def znormalize(x: np.ndarray) -> np.ndarray:
    """Subtract mean, divide by population std; a constant series maps to zeros."""
    x = np.asarray(x, dtype=float)
    std = x.std()
    if std == 0.0:
        return np.zeros_like(x)
    return (x - x.mean()) / std


def basic_stats(x) -> tuple[float, float, float]:
    """(max - min, mean, population std)."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise EmptySeries("basic_stats needs at least one sample")
    return float(x.max() - x.min()), float(x.mean()), float(x.std())


def dtw_distance(a, b) -> float:
    """Classic DTW with local cost |a_i - b_j| and steps {diag, up, left}.

    Full dynamic program, no warping window. The table is evaluated along
    anti-diagonals so the O(n*m) recurrence runs as vector operations.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptySeries("dtw_distance needs non-empty sequences")
    n, m = a.size, b.size
    cost = np.abs(a[:, None] - b[None, :])

    prev2 = np.full(n, np.inf)  # diagonal k-2, indexed by row i
    prev = np.full(n, np.inf)   # diagonal k-1
    prev[0] = cost[0, 0]
    for k in range(1, n + m - 1):
        cur = np.full(n, np.inf)
        i0 = max(0, k - (m - 1))
        i1 = min(n - 1, k)
        idx = np.arange(i0, i1 + 1)
        c = cost[idx, k - idx]
        up = np.where(idx > 0, prev[np.maximum(idx - 1, 0)], np.inf)
        left = np.where(k - idx > 0, prev[idx], np.inf)
        diag = np.where((idx > 0) & (k - idx > 0), prev2[np.maximum(idx - 1, 0)], np.inf)
        cur[idx] = c + np.minimum(np.minimum(up, left), diag)
        prev2, prev = prev, cur
    return float(prev[n - 1])


def _lowfreq_magnitude(x: np.ndarray, sample_period: float) -> np.ndarray:
    """Magnitude spectrum of the z-normalized signal, bins above cutoff zeroed."""
    spec = np.abs(np.fft.fft(znormalize(x)))
    freqs = np.fft.fftfreq(x.size, d=sample_period)
    spec[np.abs(freqs) > LFT_CUTOFF_HZ] = 0.0
    return spec


def lft_distance(x, ref, sample_period: float) -> float:
    """Euclidean distance between low-frequency magnitude spectra."""
    x = np.asarray(x, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if x.size == 0 or ref.size == 0:
        raise EmptySeries("lft_distance needs non-empty sequences")
    if x.size != ref.size:
        raise LengthMismatch(f"lft_distance: {x.size} vs {ref.size} samples")
    return float(np.linalg.norm(_lowfreq_magnitude(x, sample_period) - _lowfreq_magnitude(ref, sample_period)))


def lft_distances(matrix: np.ndarray, ref, sample_period: float) -> np.ndarray:
    """Row-wise lft_distance of a (n_points, n_samples) matrix against ref."""
    matrix = np.asarray(matrix, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != ref.size:
        raise LengthMismatch("matrix columns must match reference length")
    std = matrix.std(axis=1, keepdims=True)
    normed = np.where(std == 0.0, 0.0, (matrix - matrix.mean(axis=1, keepdims=True)) / np.where(std == 0.0, 1.0, std))
    spec = np.abs(np.fft.fft(normed, axis=1))
    freqs = np.fft.fftfreq(ref.size, d=sample_period)
    spec[:, np.abs(freqs) > LFT_CUTOFF_HZ] = 0.0
    return np.linalg.norm(spec - _lowfreq_magnitude(ref, sample_period), axis=1)


def dominant_frequency(x: np.ndarray, sample_period: float) -> float:
    """Frequency of the largest non-DC magnitude bin; 0 for a constant series."""
    x = np.asarray(x, dtype=float)
    if x.std() == 0.0:
        return 0.0
    spec = np.abs(np.fft.rfft(x))
    if spec.size < 2:
        return 0.0
    freqs = np.fft.rfftfreq(x.size, d=sample_period)
    return float(freqs[1 + int(np.argmax(spec[1:]))])


def piecewise_constant(x: np.ndarray, sample_period: float, segment_s: float = NOISE_SEGMENT_S) -> np.ndarray:
    """Segment-mean approximation over fixed windows (last segment may be short)."""
    x = np.asarray(x, dtype=float)
    seg = max(1, int(round(segment_s / sample_period)))
    out = np.empty_like(x)
    for start in range(0, x.size, seg):
        chunk = x[start:start + seg]
        out[start:start + seg] = chunk.mean()
    return out


def weekly_features(x, sample_period: float, *, point_id: str = "", window: tuple[float, float] = (0.0, 0.0)) -> FeatureVector:
    """The six per-slice statistics used for type identification."""
    x = np.asarray(x, dtype=float)
    if x.size < 4:
        raise SeriesTooShort(f"weekly_features needs >= 4 samples, got {x.size}")
    mean = float(x.mean())
    centered = x - mean
    m2 = float(np.mean(centered ** 2))
    if m2 == 0.0:
        skew = kurt = 0.0
    else:
        skew = float(np.mean(centered ** 3) / m2 ** 1.5)
        kurt = float(np.mean(centered ** 4) / m2 ** 2)
    resid = x - piecewise_constant(x, sample_period)
    values = {
        "mean": mean,
        "variance": m2,
        "dominant_frequency": dominant_frequency(x, sample_period),
        "noise": float(resid.var()),
        "skewness": skew,
        "kurtosis": kurt,
    }
    return FeatureVector(values=values, point_id=point_id, window=window, feature_set="weekly")


@dataclass(frozen=True)
class WeekSlice:
    index: int
    t0: float
    t1: float
    times: np.ndarray
    values: np.ndarray


def slice_weeks(times, values, year_start: float) -> tuple[list[WeekSlice], list[int]]:
    """Split one year of samples into 53 week slices anchored at year_start.

    Boundaries sit at 7-day multiples from year_start; the first and last
    slices may be partial. Empty slices are dropped and their indices
    returned.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    slices: list[WeekSlice] = []
    dropped: list[int] = []
    for k in range(WEEKS_PER_YEAR):
        t0 = year_start + k * WEEK_S
        t1 = year_start + (k + 1) * WEEK_S
        if k == WEEKS_PER_YEAR - 1:
            t1 = year_start + 365.0 * 86400.0  # partial closing week
        lo, hi = np.searchsorted(times, [t0, t1])
        if hi > lo:
            slices.append(WeekSlice(k, t0, t1, times[lo:hi], values[lo:hi]))
        else:
            dropped.append(k)
    return slices, dropped


def resample_locf(times, values, t0: float, t1: float, period: float) -> np.ndarray:
    """Uniform grid over [t0, t1) carrying the last observation forward."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.size == 0:
        raise EmptySeries("cannot resample an empty trend")
    grid = np.arange(t0, t1, period)
    idx = np.searchsorted(times, grid, side="right") - 1
    idx = np.clip(idx, 0, times.size - 1)
    return values[idx]


def mad_zscores(x) -> np.ndarray:
    """Robust z-scores: (x - median) / (1.4826 * MAD); zeros when MAD is 0."""
    x = np.asarray(x, dtype=float)
    med = np.median(x)
    mad = np.median(np.abs(x - med))
    if mad == 0.0:
        return np.zeros_like(x)
    return (x - med) / (1.4826 * mad)
