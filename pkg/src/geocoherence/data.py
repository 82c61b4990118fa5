"""GPS trace datasets: parsing, summarizing, synthesizing, serializing.

A trace is a flat list of (user_id, timestamp, latitude, longitude)
records. Timestamps are naive local times kept at minute precision;
coordinates are degrees rounded to 6 decimal places on output.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Iterable, Optional, TextIO

import numpy as np

from .errors import ConfigError, TraceParseError

CSV_HEADER = ("user_id", "timestamp", "latitude", "longitude")

_TS_FORMATS = (
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y/%m/%d %H:%M:%S",
    "%Y/%m/%d %H:%M",
)


@dataclass(frozen=True)
class GpsSample:
    """One timestamped GPS observation bound to a user label."""

    user_id: str
    timestamp: datetime
    latitude: float
    longitude: float

    @property
    def hour(self) -> int:
        return self.timestamp.hour

    @property
    def weekday(self) -> int:
        """Day of week, 1 = Monday .. 7 = Sunday."""
        return self.timestamp.isoweekday()


class Dataset:
    """An immutable ordered collection of samples with a per-user index."""

    def __init__(self, samples: Iterable[GpsSample]):
        self.samples: tuple[GpsSample, ...] = tuple(samples)
        index: dict[str, list[int]] = {}
        for pos, s in enumerate(self.samples):
            index.setdefault(s.user_id, []).append(pos)
        self.user_index: dict[str, np.ndarray] = {
            u: np.asarray(positions, dtype=np.int64) for u, positions in index.items()
        }

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, pos: int) -> GpsSample:
        return self.samples[pos]

    @property
    def users(self) -> list[str]:
        return sorted(self.user_index)

    def latitudes(self) -> np.ndarray:
        return np.array([s.latitude for s in self.samples], dtype=np.float64)

    def longitudes(self) -> np.ndarray:
        return np.array([s.longitude for s in self.samples], dtype=np.float64)


@dataclass
class DatasetSummary:
    n_samples: int
    per_user: dict[str, int]
    date_span: Optional[tuple[datetime, datetime]]
    bbox: Optional[tuple[float, float, float, float]]  # lat_min, lat_max, lon_min, lon_max


def parse_timestamp(text: str) -> datetime:
    """Parse either ISO 8601 or the slash-separated spelling.

    Seconds are accepted but truncated; the data model is minute-precision.
    """
    for fmt in _TS_FORMATS:
        try:
            return datetime.strptime(text.strip(), fmt).replace(second=0, microsecond=0)
        except ValueError:
            continue
    raise ValueError(f"unrecognized timestamp {text!r}")


def _make_sample(line_no: int, user_id: str, ts: str, lat: str, lon: str) -> GpsSample:
    if not user_id:
        raise TraceParseError(line_no, "user_id", "empty user id")
    try:
        timestamp = parse_timestamp(ts)
    except ValueError as exc:
        raise TraceParseError(line_no, "timestamp", str(exc)) from None
    try:
        latitude = float(lat)
    except ValueError:
        raise TraceParseError(line_no, "latitude", f"not a number: {lat!r}") from None
    try:
        longitude = float(lon)
    except ValueError:
        raise TraceParseError(line_no, "longitude", f"not a number: {lon!r}") from None
    if not (-90.0 <= latitude <= 90.0):
        raise TraceParseError(line_no, "latitude", f"{latitude} outside [-90, 90]")
    if not (-180.0 <= longitude <= 180.0):
        raise TraceParseError(line_no, "longitude", f"{longitude} outside [-180, 180]")
    return GpsSample(user_id, timestamp, latitude, longitude)


def parse_trace_file(
    source: TextIO | io.RawIOBase | str,
    fmt: str = "csv",
    strict: bool = True,
) -> tuple[Dataset, list[TraceParseError]]:
    """Parse a CSV or JSONL trace stream into a Dataset.

    Row order is preserved. In strict mode the first bad row raises;
    in lenient mode bad rows are skipped and returned for reporting.
    """
    if isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    if fmt not in ("csv", "jsonl"):
        raise ConfigError(f"unknown trace format {fmt!r}")

    samples: list[GpsSample] = []
    rejects: list[TraceParseError] = []

    def handle(err: TraceParseError) -> None:
        if strict:
            raise err
        rejects.append(err)

    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        for line_no, row in enumerate(reader, start=1):
            if line_no == 1:
                if [c.strip() for c in row] != list(CSV_HEADER):
                    raise TraceParseError(1, "header", f"expected {','.join(CSV_HEADER)}")
                continue
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                handle(TraceParseError(line_no, "row", f"expected 4 fields, got {len(row)}"))
                continue
            try:
                samples.append(_make_sample(line_no, row[0].strip(), row[1], row[2], row[3]))
            except TraceParseError as err:
                handle(err)
    else:
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                handle(TraceParseError(line_no, "row", f"invalid JSON: {exc.msg}"))
                continue
            if not isinstance(obj, dict) or set(CSV_HEADER) - set(obj):
                handle(TraceParseError(line_no, "row", f"missing keys, need {CSV_HEADER}"))
                continue
            try:
                samples.append(
                    _make_sample(
                        line_no,
                        str(obj["user_id"]),
                        str(obj["timestamp"]),
                        str(obj["latitude"]),
                        str(obj["longitude"]),
                    )
                )
            except TraceParseError as err:
                handle(err)

    return Dataset(samples), rejects


def format_sample_csv(s: GpsSample) -> str:
    return "%s,%s,%.6f,%.6f" % (
        s.user_id,
        s.timestamp.strftime("%Y-%m-%dT%H:%M"),
        s.latitude,
        s.longitude,
    )


def write_csv(d: Dataset, out: TextIO) -> None:
    out.write(",".join(CSV_HEADER) + "\n")
    for s in d:
        out.write(format_sample_csv(s) + "\n")


def write_jsonl(d: Dataset, out: TextIO) -> None:
    for s in d:
        out.write(
            json.dumps(
                {
                    "user_id": s.user_id,
                    "timestamp": s.timestamp.strftime("%Y-%m-%dT%H:%M"),
                    "latitude": round(s.latitude, 6),
                    "longitude": round(s.longitude, 6),
                },
                sort_keys=True,
            )
            + "\n"
        )


def dataset_summary(d: Dataset) -> DatasetSummary:
    per_user = {u: len(idx) for u, idx in sorted(d.user_index.items())}
    if len(d) == 0:
        return DatasetSummary(0, per_user, None, None)
    stamps = [s.timestamp for s in d]
    lats = d.latitudes()
    lons = d.longitudes()
    return DatasetSummary(
        n_samples=len(d),
        per_user=per_user,
        date_span=(min(stamps), max(stamps)),
        bbox=(float(lats.min()), float(lats.max()), float(lons.min()), float(lons.max())),
    )


# Synthetic traces. Users orbit a handful of anchor points on a fixed
# hour-of-day schedule, which gives each user a habit signature without
# needing any real data.

_CITY_CENTER = (35.68, 139.76)


@dataclass
class SynthConfig:
    n_users: int = 30
    samples_per_user: int = 500
    anchors_per_user: int = 3
    anchor_spread_deg: float = 0.05
    noise_sigma_deg: float = 0.002
    date_start: date = date(2017, 1, 11)
    date_end: date = date(2017, 4, 26)
    seed: int = 0

    def validate(self) -> None:
        if self.n_users < 1 or self.samples_per_user < 1 or self.anchors_per_user < 1:
            raise ConfigError("n_users, samples_per_user, anchors_per_user must all be >= 1")
        if not self.noise_sigma_deg >= 0.0:
            raise ConfigError("noise_sigma_deg must be >= 0")
        if self.date_start > self.date_end:
            raise ConfigError("date_start must not be after date_end")


def _hour_schedule(rng: np.random.Generator, n_anchors: int) -> np.ndarray:
    """Map each hour of day to an anchor index via contiguous random bands."""
    if n_anchors == 1:
        return np.zeros(24, dtype=np.int64)
    k = min(n_anchors, 23)
    bounds = np.sort(rng.choice(np.arange(1, 24), size=k - 1, replace=False))
    bands = np.searchsorted(bounds, np.arange(24), side="right")
    perm = rng.permutation(n_anchors)[:k]
    return perm[bands]


def generate_dataset(cfg: SynthConfig) -> Dataset:
    """Draw a deterministic synthetic trace dataset from the config seed."""
    cfg.validate()
    start_dt = datetime.combine(cfg.date_start, datetime.min.time())
    end_dt = datetime.combine(cfg.date_end, datetime.min.time()) + timedelta(hours=23, minutes=59)
    span_min = int((end_dt - start_dt).total_seconds() // 60)

    n = cfg.samples_per_user
    minutes = (np.arange(n, dtype=np.int64) * span_min) // max(n, 1)
    stamps = [start_dt + timedelta(minutes=int(m)) for m in minutes]
    hours = np.array([t.hour for t in stamps], dtype=np.int64)

    width = len(str(max(cfg.n_users - 1, 1)))
    samples: list[GpsSample] = []
    for t in range(cfg.n_users):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, t]))
        anchors = np.asarray(_CITY_CENTER) + rng.normal(
            0.0, cfg.anchor_spread_deg, size=(cfg.anchors_per_user, 2)
        )
        schedule = _hour_schedule(rng, cfg.anchors_per_user)
        noise = rng.normal(0.0, cfg.noise_sigma_deg, size=(n, 2)) if cfg.noise_sigma_deg > 0 else np.zeros((n, 2))
        coords = anchors[schedule[hours]] + noise
        lat = np.clip(np.round(coords[:, 0], 6), -90.0, 90.0)
        lon = np.clip(np.round(coords[:, 1], 6), -180.0, 180.0)
        user = f"user{t:0{width}d}"
        for i in range(n):
            samples.append(GpsSample(user, stamps[i], float(lat[i]), float(lon[i])))
    return Dataset(samples)
