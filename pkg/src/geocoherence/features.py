"""Feature extraction: base timestamp/GPS features and distance coherence.

For a sample s, the z-th coherence feature is the Euclidean distance in
raw degrees between s and the centroid of the same user's other samples
whose hour of day lies within +/- z hours of s (daily mode). Weekly mode
additionally requires the same day of week. Distances are in degree
units, not meters, by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats as sstats

from .data import Dataset, GpsSample
from .errors import ConfigError

BASE_COLUMNS = ("lat", "lon", "month", "day", "hour", "minute", "weekday")


@dataclass
class ExtractionConfig:
    alpha: int = 3
    mode: str = "daily"
    scale: float = 10000.0
    fill_value: float = 0.0
    wrap_hours: bool = False

    def validate(self) -> None:
        if self.alpha < 0:
            raise ConfigError("alpha must be >= 0")
        if self.scale <= 0:
            raise ConfigError("scale must be > 0")
        if self.mode not in ("daily", "weekly"):
            raise ConfigError(f"mode must be 'daily' or 'weekly', got {self.mode!r}")

    def column_names(self) -> list[str]:
        return list(BASE_COLUMNS) + [f"dc_{z}" for z in range(1, self.alpha + 1)]


@dataclass
class CoherenceSet:
    """Same-user samples inside the hour window of one sample."""

    members: np.ndarray  # positions into the dataset, ascending, self excluded
    centroid_lat: float
    centroid_lon: float
    empty: bool


@dataclass
class FeatureMatrix:
    values: np.ndarray  # n x (7 + alpha), float64
    labels: list[str]
    columns: list[str]
    fill_count: int = 0

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]


def extract_base_features(s: GpsSample) -> tuple[float, float, int, int, int, int, int]:
    """(lat, lon, month, day, hour, minute, weekday); the year is dropped."""
    t = s.timestamp
    return (s.latitude, s.longitude, t.month, t.day, t.hour, t.minute, s.weekday)


def _window_hours(h: int, z: int, wrap_hours: bool) -> list[int]:
    if wrap_hours:
        return sorted({(h + off) % 24 for off in range(-z, z + 1)})
    return list(range(max(0, h - z), min(23, h + z) + 1))


class _CoherenceIndex:
    """Per-user samples bucketed by hour (daily) or (weekday, hour) (weekly).

    Window lookups return merged ascending position arrays; merging is
    cached per (user, bucket, z) so repeated samples in one bucket share
    the work.
    """

    def __init__(self, d: Dataset, mode: str, wrap_hours: bool):
        self.mode = mode
        self.wrap_hours = wrap_hours
        self.buckets: dict[str, dict[tuple, np.ndarray]] = {}
        per_user: dict[str, dict[tuple, list[int]]] = {}
        for pos, s in enumerate(d):
            key = (s.weekday, s.hour) if mode == "weekly" else (s.hour,)
            per_user.setdefault(s.user_id, {}).setdefault(key, []).append(pos)
        for user, groups in per_user.items():
            self.buckets[user] = {
                key: np.asarray(positions, dtype=np.int64) for key, positions in groups.items()
            }
        self._merged: dict[tuple, np.ndarray] = {}

    def window_positions(self, user: str, key: tuple, z: int) -> np.ndarray:
        """All of user's sample positions in the +/- z window of `key`."""
        cache_key = (user, key, z)
        hit = self._merged.get(cache_key)
        if hit is not None:
            return hit
        groups = self.buckets.get(user, {})
        hour = key[-1]
        parts = []
        for h in _window_hours(hour, z, self.wrap_hours):
            k = key[:-1] + (h,)
            arr = groups.get(k)
            if arr is not None:
                parts.append(arr)
        merged = np.sort(np.concatenate(parts)) if parts else np.empty(0, dtype=np.int64)
        self._merged[cache_key] = merged
        return merged


def _centroid(lat: np.ndarray, lon: np.ndarray, members: np.ndarray) -> tuple[float, float]:
    return float(np.mean(lat[members])), float(np.mean(lon[members]))


def coherence_set(
    d: Dataset,
    i: int,
    z: int,
    mode: str = "daily",
    wrap_hours: bool = False,
    _index: Optional[_CoherenceIndex] = None,
) -> CoherenceSet:
    """Select the same-user samples within +/- z hours of sample i."""
    if z < 1:
        raise ConfigError("window radius z must be >= 1")
    s = d[i]
    index = _index if _index is not None else _CoherenceIndex(d, mode, wrap_hours)
    key = (s.weekday, s.hour) if mode == "weekly" else (s.hour,)
    window = index.window_positions(s.user_id, key, z)
    members = window[window != i]
    if members.size == 0:
        return CoherenceSet(members, math.nan, math.nan, True)
    clat, clon = _centroid(d.latitudes(), d.longitudes(), members)
    return CoherenceSet(members, clat, clon, False)


def distance_coherence(s: GpsSample, c: CoherenceSet, fill_value: float = 0.0) -> float:
    """Degree-space Euclidean distance from s to its coherence centroid."""
    if c.empty:
        return fill_value
    return math.sqrt((s.latitude - c.centroid_lat) ** 2 + (s.longitude - c.centroid_lon) ** 2)


def extract_feature_matrix(d: Dataset, cfg: ExtractionConfig) -> FeatureMatrix:
    """Base features plus scaled coherence columns dc_1..dc_alpha."""
    cfg.validate()
    n = len(d)
    values = np.zeros((n, 7 + cfg.alpha), dtype=np.float64)
    labels = [s.user_id for s in d]
    for i, s in enumerate(d):
        values[i, :7] = extract_base_features(s)

    fill_count = 0
    if cfg.alpha > 0 and n > 0:
        lat = d.latitudes()
        lon = d.longitudes()
        index = _CoherenceIndex(d, cfg.mode, cfg.wrap_hours)
        for i, s in enumerate(d):
            key = (s.weekday, s.hour) if cfg.mode == "weekly" else (s.hour,)
            for z in range(1, cfg.alpha + 1):
                window = index.window_positions(s.user_id, key, z)
                members = window[window != i]
                if members.size == 0:
                    dc = cfg.fill_value
                    fill_count += 1
                else:
                    clat, clon = _centroid(lat, lon, members)
                    dc = math.sqrt((s.latitude - clat) ** 2 + (s.longitude - clon) ** 2)
                values[i, 7 + z - 1] = cfg.scale * dc

    return FeatureMatrix(values, labels, cfg.column_names(), fill_count)


@dataclass
class ColumnStats:
    count: int
    mean: float
    se: float
    median: float
    sd: float
    kurtosis: float
    skewness: float
    minimum: float
    maximum: float


@dataclass
class DistributionStats:
    columns: dict[str, ColumnStats] = field(default_factory=dict)


def _column_stats(x: np.ndarray) -> ColumnStats:
    n = x.size
    mean = float(np.mean(x)) if n else math.nan
    median = float(np.median(x)) if n else math.nan
    mn = float(np.min(x)) if n else math.nan
    mx = float(np.max(x)) if n else math.nan
    sd = float(np.std(x, ddof=1)) if n >= 2 else math.nan
    se = sd / math.sqrt(n) if n >= 2 else math.nan
    # Bias-corrected (spreadsheet-convention) shape statistics.
    if n >= 3 and sd > 0:
        skew = float(sstats.skew(x, bias=False))
    else:
        skew = math.nan
    if n >= 4 and sd > 0:
        kurt = float(sstats.kurtosis(x, fisher=True, bias=False))
    else:
        kurt = math.nan
    return ColumnStats(n, mean, se, median, sd, kurt, skew, mn, mx)


def feature_distribution(m: FeatureMatrix) -> DistributionStats:
    """Per-column distribution statistics in the style of a summary table."""
    out = DistributionStats()
    for j, name in enumerate(m.columns):
        out.columns[name] = _column_stats(m.values[:, j])
    return out
