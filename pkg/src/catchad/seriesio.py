"""Dataset ingestion, per-window instance normalization, sliding-window extraction."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

LABEL_COLUMN = "label"

# Population stddev below this is treated as a constant channel.
_CONSTANT_STD_FLOOR = 1e-12


class SeriesFormatError(ValueError):
    """Raised when a CSV file or series violates the dataset format."""


@dataclass
class LabeledSeries:
    """A channels-by-time matrix with optional point labels.

    values: (n_channels, length) float64
    labels: (length,) uint8 in {0, 1}, or None
    """

    values: np.ndarray
    labels: Optional[np.ndarray] = None
    channel_names: Sequence[str] = ()

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise SeriesFormatError("series values must be 2-D (channels x time)")
        if self.n_channels < 1 or self.length < 2:
            raise SeriesFormatError(
                f"series needs >=1 channel and length >=2, got {self.values.shape}"
            )
        if not self.channel_names:
            self.channel_names = [f"ch{i}" for i in range(self.n_channels)]
        if len(self.channel_names) != self.n_channels:
            raise SeriesFormatError("channel_names length does not match channel count")
        if self.labels is not None:
            self.labels = np.asarray(self.labels)
            if self.labels.shape != (self.length,):
                raise SeriesFormatError(
                    f"labels length {self.labels.shape} does not match series length {self.length}"
                )
            if not np.isin(self.labels, (0, 1)).all():
                raise SeriesFormatError("labels must be 0 or 1")
            self.labels = self.labels.astype(np.uint8)

    @property
    def n_channels(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]


@dataclass
class TimeWindow:
    """One (n_channels, window_size) slice of a series.

    norm_stats is None for raw windows; instance_normalize fills it with the
    per-channel (mean, stddev) actually used, shape (n_channels, 2).
    """

    values: np.ndarray
    norm_stats: Optional[np.ndarray] = None
    origin_index: int = 0


def load_csv(path, label_column: Optional[str] = None) -> LabeledSeries:
    """Read a header+columns CSV into a LabeledSeries.

    Every non-label column becomes a channel, in file order. Cells must parse
    as finite reals; the label column, when named, must contain only 0/1.
    Errors name the offending row and column.
    """
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SeriesFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column is not None:
            if label_column not in header:
                raise SeriesFormatError(f"{path}: no column named {label_column!r}")
            label_idx = header.index(label_column)
        else:
            label_idx = -1
        channel_names = [h for i, h in enumerate(header) if i != label_idx]

        columns: list[list[float]] = [[] for _ in header]
        for row_no, row in enumerate(reader, start=2):  # 1-based, header is row 1
            if len(row) != len(header):
                raise SeriesFormatError(
                    f"{path}: row {row_no} has {len(row)} cells, expected {len(header)}"
                )
            for i, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise SeriesFormatError(
                        f"{path}: row {row_no}, column {header[i]!r}: "
                        f"cannot parse {cell!r} as a number"
                    ) from None
                if not math.isfinite(value):
                    raise SeriesFormatError(
                        f"{path}: row {row_no}, column {header[i]!r}: "
                        f"non-finite value {cell!r}"
                    )
                if i == label_idx and value not in (0.0, 1.0):
                    raise SeriesFormatError(
                        f"{path}: row {row_no}, column {header[i]!r}: "
                        f"label must be 0 or 1, got {cell!r}"
                    )
                columns[i].append(value)

    values = np.array(
        [columns[i] for i in range(len(header)) if i != label_idx], dtype=np.float64
    )
    labels = np.array(columns[label_idx], dtype=np.uint8) if label_idx >= 0 else None
    return LabeledSeries(values=values, labels=labels, channel_names=channel_names)


def write_csv(path, series: LabeledSeries, include_labels: bool = True) -> None:
    """Write a LabeledSeries at full precision (repr round-trips bit-for-bit)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = list(series.channel_names)
        with_labels = include_labels and series.labels is not None
        if with_labels:
            header.append(LABEL_COLUMN)
        writer.writerow(header)
        for t in range(series.length):
            row = [repr(float(v)) for v in series.values[:, t]]
            if with_labels:
                row.append(str(int(series.labels[t])))
            writer.writerow(row)


def instance_normalize(window: TimeWindow) -> TimeWindow:
    """Shift/scale each channel to zero mean, unit population stddev.

    Constant channels keep their stddev floored to 1, so they come out all
    zero instead of dividing by zero.
    """
    values = np.asarray(window.values, dtype=np.float64)
    if values.shape[1] < 2:
        raise ValueError("window must have at least 2 timestamps")
    mean = values.mean(axis=1)
    std = values.std(axis=1)  # population (1/T) stddev
    std = np.where(std <= _CONSTANT_STD_FLOOR, 1.0, std)
    normalized = (values - mean[:, None]) / std[:, None]
    stats = np.stack([mean, std], axis=1)
    return TimeWindow(values=normalized, norm_stats=stats, origin_index=window.origin_index)


def make_windows(series: LabeledSeries, window_size: int, stride: int) -> list[TimeWindow]:
    """Cut raw windows at 0, stride, 2*stride, ...

    If the final stride window would overrun, one extra window anchored at
    (length - window_size) is appended so every timestamp is covered.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if window_size > series.length:
        raise ValueError(
            f"window size {window_size} exceeds series length {series.length}"
        )
    starts = list(range(0, series.length - window_size + 1, stride))
    if starts[-1] + window_size < series.length:
        starts.append(series.length - window_size)
    return [
        TimeWindow(values=series.values[:, s : s + window_size].copy(), origin_index=s)
        for s in starts
    ]
