"""Binned count data and small helpers for comparing discrete distributions."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Histogram",
    "total_variation",
    "cdf_sup_distance",
]


@dataclass(frozen=True)
class Histogram:
    """Equal-width binned counts: (lower edge, count) pairs plus the width.

    Counts may be fractional (e.g. synthetic densities scaled to a mass);
    edges must be strictly increasing.
    """

    lower_edges: tuple[float, ...]
    counts: tuple[float, ...]
    bin_width: float = 1.0

    def __post_init__(self) -> None:
        if len(self.lower_edges) != len(self.counts):
            raise ValueError("edges and counts must have equal length")
        if not self.lower_edges:
            raise ValueError("histogram must have at least one bin")
        if self.bin_width <= 0:
            raise ValueError("bin width must be positive")
        edges = self.lower_edges
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("lower edges must be strictly increasing")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")

    @classmethod
    def from_values(cls, values, bin_width: float = 1.0) -> "Histogram":
        """Bin nonnegative values into [0, w), [w, 2w), ... up to the max."""
        arr = np.asarray(values, dtype=float)
        if arr.size == 0:
            raise ValueError("cannot build a histogram from no values")
        if np.any(arr < 0):
            raise ValueError("values must be nonnegative")
        idx = np.floor(arr / bin_width).astype(np.int64)
        counts = np.bincount(idx)
        edges = tuple(i * bin_width for i in range(len(counts)))
        return cls(edges, tuple(float(c) for c in counts), bin_width)

    @property
    def total(self) -> float:
        return float(sum(self.counts))

    @property
    def centers(self) -> np.ndarray:
        return np.asarray(self.lower_edges) + 0.5 * self.bin_width

    @property
    def upper_edges(self) -> np.ndarray:
        return np.asarray(self.lower_edges) + self.bin_width

    @property
    def frequencies(self) -> np.ndarray:
        return np.asarray(self.counts) / self.total

    def nonzero_bins(self) -> int:
        return sum(1 for c in self.counts if c > 0)

    def write_csv(self, path) -> None:
        """Write bin,count,frequency rows (frequency = count / total)."""
        total = self.total
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin", "count", "frequency"])
            for edge, count in zip(self.lower_edges, self.counts):
                edge_out = int(edge) if float(edge).is_integer() else edge
                count_out = int(count) if float(count).is_integer() else count
                writer.writerow([edge_out, count_out, count / total if total else 0.0])

    @classmethod
    def read_csv(cls, path) -> "Histogram":
        path = Path(path)
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["bin", "count"]:
                raise ValueError(f"{path}: expected a bin,count[,frequency] header")
            edges: list[float] = []
            counts: list[float] = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    edges.append(float(row[0]))
                    counts.append(float(row[1]))
                except (IndexError, ValueError) as exc:
                    raise ValueError(f"{path}: bad histogram row {lineno}") from exc
        if not edges:
            raise ValueError(f"{path}: histogram file has no bins")
        if len(edges) > 1:
            widths = np.diff(edges)
            if np.any(np.abs(widths - widths[0]) > 1e-9):
                raise ValueError(f"{path}: bins are not equal-width")
            width = float(widths[0])
        else:
            width = 1.0
        return cls(tuple(edges), tuple(counts), width)


def _pad_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = max(len(p), len(q))
    return (
        np.pad(p, (0, n - len(p))),
        np.pad(q, (0, n - len(q))),
    )


def total_variation(p, q) -> float:
    """Total-variation distance between two pmfs on 0..n (zero-padded)."""
    p, q = _pad_pair(p, q)
    return float(0.5 * np.abs(p - q).sum())


def cdf_sup_distance(p, q) -> float:
    """Sup distance between the CDFs of two pmfs on 0..n (zero-padded)."""
    p, q = _pad_pair(p, q)
    return float(np.max(np.abs(np.cumsum(p) - np.cumsum(q))))
