"""File-based ingestion of message timelines.

Replays the empirical pipeline on snapshot files instead of a live service:
read timestamped cumulative like/retweet counts per message, difference them
into per-interval increments, fit a Weibull to the increment histogram, and
append the results to a JSON Lines store keyed for idempotent re-runs.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .histogram import Histogram
from .weibull import WeibullParams, fit_least_squares

__all__ = [
    "METRICS",
    "TimelineError",
    "TimelineRecord",
    "IncrementInterval",
    "IncrementSeries",
    "StoredResult",
    "load_timeline",
    "load_timeline_lenient",
    "compute_increments",
    "fit_message",
    "store_results",
]

METRICS = ("likes", "retweets")

_HEADER = ["message_id", "timestamp", "likes", "retweets"]


class TimelineError(ValueError):
    """Malformed or non-monotone timeline input; message names the spot."""


@dataclass(frozen=True)
class TimelineRecord:
    """One snapshot of a message's cumulative counters."""

    message_id: str
    timestamp: float  # seconds since epoch, UTC
    cumulative_likes: int
    cumulative_retweets: int
    text: str | None = None


@dataclass(frozen=True)
class IncrementInterval:
    index: int
    delta_likes: int
    delta_retweets: int
    seconds: float


@dataclass(frozen=True)
class IncrementSeries:
    """Per-interval count increases for one message."""

    message_id: str
    intervals: tuple[IncrementInterval, ...]

    @property
    def sufficient(self) -> bool:
        """False when the timeline had fewer than two snapshots."""
        return len(self.intervals) >= 1

    def deltas(self, metric: str) -> np.ndarray:
        if metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
        field = "delta_likes" if metric == "likes" else "delta_retweets"
        return np.asarray([getattr(iv, field) for iv in self.intervals], dtype=np.int64)


@dataclass(frozen=True)
class StoredResult:
    """One fitted message/metric pair, ready for the JSONL store."""

    message_id: str
    metric: str
    params: WeibullParams | None
    ks: float | None
    growth_rate_per_hour: float
    n_intervals: int
    input_digest: str
    fitted_at: str
    skip_reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.skip_reason is None

    def dedup_key(self) -> tuple[str, str, str]:
        return (self.message_id, self.metric, self.input_digest)

    def to_json_line(self) -> str:
        if not self.ok:
            raise ValueError("skip results are not stored")
        return json.dumps(
            {
                "message_id": self.message_id,
                "metric": self.metric,
                "k": self.params.shape,
                "lambda": self.params.scale,
                "ks": self.ks,
                "growth_rate_per_hour": self.growth_rate_per_hour,
                "n_intervals": self.n_intervals,
                "input_digest": self.input_digest,
                "fitted_at": self.fitted_at,
            }
        )


def _parse_row(row: list[str], lineno: int, has_text: bool) -> TimelineRecord:
    expected = 5 if has_text else 4
    if len(row) != expected:
        raise TimelineError(f"row {lineno}: expected {expected} fields, got {len(row)}")
    message_id = row[0].strip()
    if not message_id:
        raise TimelineError(f"row {lineno}: empty message_id")
    try:
        timestamp = float(row[1])
        likes = int(row[2])
        retweets = int(row[3])
    except ValueError as exc:
        raise TimelineError(f"row {lineno}: unparseable numeric field") from exc
    if likes < 0 or retweets < 0:
        raise TimelineError(f"row {lineno}: negative counts")
    text = row[4] if has_text else None
    return TimelineRecord(message_id, timestamp, likes, retweets, text)


def _check_monotone(message_id: str, records: list[tuple[int, TimelineRecord]]) -> None:
    for (_, prev), (lineno, cur) in zip(records, records[1:]):
        if cur.timestamp <= prev.timestamp:
            raise TimelineError(
                f"message {message_id!r}, row {lineno}: timestamps must strictly increase"
            )
        if (
            cur.cumulative_likes < prev.cumulative_likes
            or cur.cumulative_retweets < prev.cumulative_retweets
        ):
            raise TimelineError(
                f"message {message_id!r}, row {lineno}: cumulative counts decreased"
            )


def _load_grouped(path) -> dict[str, list[tuple[int, TimelineRecord]]]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TimelineError(f"{path}: empty file")
        names = [h.strip() for h in header]
        if names[:4] != _HEADER or len(names) > 5 or (
            len(names) == 5 and names[4] != "text"
        ):
            raise TimelineError(
                f"{path}: expected header message_id,timestamp,likes,retweets[,text]"
            )
        has_text = len(names) == 5
        grouped: dict[str, list[tuple[int, TimelineRecord]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            record = _parse_row(row, lineno, has_text)
            grouped.setdefault(record.message_id, []).append((lineno, record))
    return grouped


def load_timeline(path) -> dict[str, list[TimelineRecord]]:
    """Load and validate a snapshot CSV, grouped by message id.

    Raises TimelineError naming the offending row on any malformed row, and
    naming message and row when timestamps or cumulative counts are not
    monotone within a message.
    """
    grouped = _load_grouped(path)
    for message_id, rows in grouped.items():
        _check_monotone(message_id, rows)
    return {mid: [rec for _, rec in rows] for mid, rows in grouped.items()}


def load_timeline_lenient(path) -> tuple[dict[str, list[TimelineRecord]], list[str]]:
    """Like ``load_timeline`` but drops invalid messages instead of raising.

    File-level problems (unreadable header, rows with no usable message id)
    still raise. Returns the valid timelines plus one error string per
    dropped message, so a pipeline can skip bad messages and keep going.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TimelineError(f"{path}: empty file")
        names = [h.strip() for h in header]
        if names[:4] != _HEADER or len(names) > 5 or (
            len(names) == 5 and names[4] != "text"
        ):
            raise TimelineError(
                f"{path}: expected header message_id,timestamp,likes,retweets[,text]"
            )
        has_text = len(names) == 5
        grouped: dict[str, list[tuple[int, TimelineRecord]]] = {}
        bad: dict[str, str] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            message_id = row[0].strip() if row else ""
            if not message_id:
                raise TimelineError(f"row {lineno}: empty message_id")
            try:
                record = _parse_row(row, lineno, has_text)
            except TimelineError as exc:
                bad.setdefault(message_id, str(exc))
                continue
            grouped.setdefault(message_id, []).append((lineno, record))
    for message_id, rows in grouped.items():
        if message_id in bad:
            continue
        try:
            _check_monotone(message_id, rows)
        except TimelineError as exc:
            bad[message_id] = str(exc)
    good = {
        mid: [rec for _, rec in rows]
        for mid, rows in grouped.items()
        if mid not in bad
    }
    errors = [f"message {mid!r} skipped: {reason}" for mid, reason in bad.items()]
    return good, errors


def compute_increments(records: list[TimelineRecord]) -> IncrementSeries:
    """Difference one message's cumulative counts into per-interval deltas.

    A single snapshot yields an empty series (flagged via ``sufficient``).
    """
    if not records:
        raise ValueError("no records for message")
    message_id = records[0].message_id
    if any(r.message_id != message_id for r in records):
        raise ValueError("records must all belong to one message")
    intervals = []
    for i, (prev, cur) in enumerate(zip(records, records[1:])):
        intervals.append(
            IncrementInterval(
                index=i,
                delta_likes=cur.cumulative_likes - prev.cumulative_likes,
                delta_retweets=cur.cumulative_retweets - prev.cumulative_retweets,
                seconds=cur.timestamp - prev.timestamp,
            )
        )
    return IncrementSeries(message_id, tuple(intervals))


def _series_digest(series: IncrementSeries, metric: str) -> str:
    payload = json.dumps(
        {
            "message_id": series.message_id,
            "metric": metric,
            "deltas": [int(d) for d in series.deltas(metric)],
            "seconds": [iv.seconds for iv in series.intervals],
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _growth_rate_per_hour(series: IncrementSeries, metric: str) -> float:
    """Least-squares slope of the reconstructed cumulative counts, per hour."""
    deltas = series.deltas(metric)
    times = np.concatenate(([0.0], np.cumsum([iv.seconds for iv in series.intervals])))
    counts = np.concatenate(([0.0], np.cumsum(deltas)))
    slope = np.polyfit(times, counts, 1)[0]
    return float(slope * 3600.0)


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def fit_message(series: IncrementSeries, metric: str) -> StoredResult:
    """Fit the per-interval increment histogram of one message.

    Needs at least 3 intervals with a nonzero increment; anything less comes
    back as a skip result with the reason recorded, as does a degenerate
    least-squares fit.
    """
    digest = _series_digest(series, metric)
    deltas = series.deltas(metric)
    n_intervals = len(deltas)
    growth = _growth_rate_per_hour(series, metric) if n_intervals >= 2 else 0.0

    def skip(reason: str) -> StoredResult:
        return StoredResult(
            series.message_id, metric, None, None, growth, n_intervals,
            digest, _utc_now(), skip_reason=reason,
        )

    if not series.sufficient:
        return skip("fewer than 2 snapshots")
    if int((deltas > 0).sum()) < 3:
        return skip("fewer than 3 nonzero increments")
    report = fit_least_squares(Histogram.from_values(deltas))
    if not report.ok:
        return skip(f"fit failed: {report.failure}")
    return StoredResult(
        series.message_id, metric, report.params, report.ks, growth,
        n_intervals, digest, _utc_now(),
    )


def store_results(results, store_path) -> int:
    """Append fitted results to a JSONL store; returns lines written.

    Deduplicates on (message_id, metric, input_digest), so re-running the
    same inputs appends nothing. Skip results are never persisted. Each line
    is written whole, so a crash cannot leave a torn line behind.
    """
    store_path = Path(store_path)
    seen: set[tuple[str, str, str]] = set()
    if store_path.exists():
        with open(store_path) as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    entry = json.loads(line)
                    seen.add((entry["message_id"], entry["metric"], entry["input_digest"]))
                except (json.JSONDecodeError, KeyError) as exc:
                    raise ValueError(f"{store_path}: corrupt store line {lineno}") from exc
    written = 0
    with open(store_path, "a") as fh:
        for result in results:
            if not result.ok:
                continue
            key = result.dedup_key()
            if key in seen:
                continue
            seen.add(key)
            fh.write(result.to_json_line() + "\n")
            written += 1
    return written
