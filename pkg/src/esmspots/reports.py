"""Ingestion and enrichment of experience-sampling reports.

One report is a geo-timestamped questionnaire: eight 1-5 slider items, a set
of event flags, and participant/trip identity. The travel-experience score of
a report is the plain mean of its eight items.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

import numpy as np

from .errors import EmptyDataset, InsufficientPoints, SchemaError
from .geo import GeoPoint, PlanarPoint, SpatialIndex, nn_outlier_mask

N_ITEMS = 8


class EventCategory(str, Enum):
    """Closed vocabulary of journey events a report can flag."""

    DELAY = "delay"
    MISSED_CONNECTION = "missed_connection"
    HAD_TO_HURRY = "had_to_hurry"
    DISRUPTIVE_PEOPLE = "disruptive_people"
    OVERCROWDED = "overcrowded"
    DRIVING_BEHAVIOR = "driving_behavior"
    INFRASTRUCTURE_ISSUES = "infrastructure_issues"
    MISSING_INFORMATION = "missing_information"
    POSITIVE_INTERACTION = "positive_interaction"
    TIME_WELL_SPENT = "time_well_spent"
    ARRIVED_ON_SCHEDULE = "arrived_on_schedule"
    FEELING_UNWELL = "feeling_unwell"
    COMFORT = "comfort"
    NICE_ENVIRONMENT = "nice_environment"
    OTHER = "other"


CSV_HEADER = (
    ["report_id", "participant_id", "trip_id", "timestamp_utc", "lat", "lon"]
    + [f"item{k}" for k in range(1, N_ITEMS + 1)]
    + ["events", "free_text_category"]
)


@dataclass(frozen=True)
class EsmReport:
    """One answered questionnaire with its GNSS fix and timestamp."""

    report_id: str
    participant_id: str
    trip_id: str
    timestamp: datetime
    location: GeoPoint
    items: tuple[float, ...]
    events: frozenset[EventCategory]
    free_text_category: str | None = None

    def __post_init__(self) -> None:
        if len(self.items) != N_ITEMS:
            raise ValueError(f"expected {N_ITEMS} items, got {len(self.items)}")
        for v in self.items:
            if not (math.isfinite(v) and 1.0 <= v <= 5.0):
                raise ValueError("item out of [1,5]")


@dataclass(frozen=True)
class Rejection:
    """A malformed input row: physical row number (header = row 1) and why."""

    row_number: int
    reason: str


@dataclass(frozen=True)
class ParseResult:
    reports: tuple[EsmReport, ...]
    rejections: tuple[Rejection, ...]


def _parse_timestamp(raw: str) -> datetime:
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValueError("timestamp lacks a UTC offset")
    return ts.astimezone(timezone.utc)


def _parse_row(row: dict[str, str]) -> EsmReport:
    report_id = row["report_id"].strip()
    participant_id = row["participant_id"].strip()
    trip_id = row["trip_id"].strip()
    if not (report_id and participant_id and trip_id):
        raise ValueError("missing identifier")

    try:
        ts = _parse_timestamp(row["timestamp_utc"])
    except ValueError:
        raise ValueError("bad timestamp")

    try:
        lat = float(row["lat"])
        lon = float(row["lon"])
    except ValueError:
        raise ValueError("non-numeric lat/lon")
    location = GeoPoint(lat, lon)  # raises ValueError when out of bounds

    items = []
    for k in range(1, N_ITEMS + 1):
        try:
            items.append(float(row[f"item{k}"]))
        except ValueError:
            raise ValueError("non-numeric item")

    events = set()
    raw_events = row["events"].strip()
    if raw_events:
        for token in raw_events.split("|"):
            try:
                events.add(EventCategory(token.strip()))
            except ValueError:
                raise ValueError(f"unknown event '{token.strip()}'")

    free_text = row["free_text_category"].strip() or None
    return EsmReport(
        report_id=report_id,
        participant_id=participant_id,
        trip_id=trip_id,
        timestamp=ts,
        location=location,
        items=tuple(items),
        events=frozenset(events),
        free_text_category=free_text,
    )


Source = Union[str, Path, IO[str], IO[bytes]]


def _open_text(source: Source):
    """Return (text stream, needs_close)."""
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def parse_reports(source: Source) -> ParseResult:
    """Parse the report CSV; well-formed rows become reports, the rest are
    collected as rejections with row number and reason.

    Raises SchemaError when header columns are missing and EmptyDataset when
    no row survives validation.
    """
    stream, needs_close = _open_text(source)
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset("input file is empty")
        missing = [c for c in CSV_HEADER if c not in header]
        if missing:
            raise SchemaError(f"missing columns: {', '.join(missing)}")
        col = {name: header.index(name) for name in CSV_HEADER}

        reports: list[EsmReport] = []
        rejections: list[Rejection] = []
        seen_ids: set[str] = set()
        for row_number, raw in enumerate(reader, start=2):
            if not raw or all(not field.strip() for field in raw):
                continue
            if len(raw) < len(header):
                rejections.append(Rejection(row_number, "wrong field count"))
                continue
            row = {name: raw[idx] for name, idx in col.items()}
            try:
                report = _parse_row(row)
            except ValueError as exc:
                rejections.append(Rejection(row_number, str(exc)))
                continue
            if report.report_id in seen_ids:
                rejections.append(Rejection(row_number, "duplicate report_id"))
                continue
            seen_ids.add(report.report_id)
            reports.append(report)
    finally:
        if needs_close:
            stream.close()

    if not reports:
        raise EmptyDataset("no valid rows", rejections=tuple(rejections))
    return ParseResult(tuple(reports), tuple(rejections))


def _format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def write_reports(reports: Iterable[EsmReport], dest: Source) -> None:
    """Write reports in the same CSV layout that :func:`parse_reports` reads.

    Floats are written with shortest round-trip precision, so a write/read
    cycle reproduces the reports exactly.
    """
    stream, needs_close = _open_text_write(dest)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in reports:
            events = "|".join(c.value for c in EventCategory if c in r.events)
            writer.writerow(
                [
                    r.report_id,
                    r.participant_id,
                    r.trip_id,
                    _format_timestamp(r.timestamp),
                    repr(r.location.lat),
                    repr(r.location.lon),
                    *[repr(v) for v in r.items],
                    events,
                    r.free_text_category or "",
                ]
            )
    finally:
        if needs_close:
            stream.close()


def _open_text_write(dest: Source):
    if isinstance(dest, (str, Path)):
        return open(dest, "w", encoding="utf-8", newline=""), True
    return dest, False


def write_rejections(rejections: Iterable[Rejection], dest: Source) -> None:
    stream, needs_close = _open_text_write(dest)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["row_number", "reason"])
        for r in rejections:
            writer.writerow([r.row_number, r.reason])
    finally:
        if needs_close:
            stream.close()


def experience_score(report: EsmReport) -> float:
    """Travel-experience construct of one report: the mean of its 8 items."""
    return sum(report.items) / N_ITEMS


def experience_scores(reports: Sequence[EsmReport]) -> np.ndarray:
    return np.array([experience_score(r) for r in reports], dtype=float)


def locational_outliers(
    points: Sequence[PlanarPoint] | np.ndarray | SpatialIndex,
    z_thresh: float = 3.0,
) -> set[int]:
    """Ids of points whose nearest-neighbor distance exceeds
    mean + ``z_thresh``·SD of all nearest-neighbor distances.

    These points are excluded only from distance-band calibration, never
    from the hot spot analysis itself.
    """
    index = points if isinstance(points, SpatialIndex) else SpatialIndex(points)
    if index.n < 4:
        raise InsufficientPoints("outlier detection needs n >= 4")
    nn = index.nearest_neighbor_distances()
    return set(int(i) for i in np.nonzero(nn_outlier_mask(nn, z_thresh))[0])
