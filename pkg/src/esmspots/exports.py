"""Serialization of analysis results: GeoJSON feature collections and the
spot summary CSV. Output is deterministic (sorted keys, fixed float
formatting where rounding is wanted) so identical inputs produce identical
bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import IO, Union

import numpy as np

from .geo import GeoPoint, PlanarPoint, unproject
from .reports import EventCategory
from .spots import Spot, spot_report
from .stats import GiResult

Dest = Union[str, Path, IO[str]]


def _lonlat(points, origin: GeoPoint) -> list[list[float]]:
    return [[g.lon, g.lat] for g in unproject(points, origin)]


def points_geojson(
    gi: list[GiResult],
    coords: np.ndarray,
    origin: GeoPoint,
    spot_of: dict[int, int] | None = None,
) -> dict:
    """One Point feature per analyzed report with its z, p, bin, and (when
    the point belongs to a spot) the spot id. Coordinates are WGS84."""
    spot_of = spot_of or {}
    planar = [PlanarPoint(float(x), float(y)) for x, y in np.asarray(coords, dtype=float)]
    positions = _lonlat(planar, origin)
    features = []
    for r in gi:
        props = {
            "point_id": r.point_id,
            "z": r.z,
            "p": r.p_two_sided,
            "bin": r.bin,
            "neighbor_count": r.neighbor_count,
        }
        if r.point_id in spot_of:
            props["spot_id"] = spot_of[r.point_id]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": positions[r.point_id]},
                "properties": props,
            }
        )
    return {"type": "FeatureCollection", "features": features}


def spots_geojson(spots: list[Spot], origin: GeoPoint) -> dict:
    """One Polygon feature per spot carrying the full spot profile."""
    features = []
    for s in spots:
        ring = _lonlat(s.hull, origin)
        ring.append(ring[0])  # closed per GeoJSON
        props = {
            "spot_id": s.spot_id,
            "polarity": s.polarity,
            "n_reports": s.n_reports,
            "n_participants": s.n_participants,
            "mean_experience": s.mean_experience,
            **{cat.value: s.event_profile[cat] for cat in EventCategory},
        }
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": props,
            }
        )
    return {"type": "FeatureCollection", "features": features}


def write_geojson(collection: dict, dest: Dest) -> None:
    _write_text(json.dumps(collection, sort_keys=True, indent=2) + "\n", dest)


def write_spot_csv(spots: list[Spot], dest: Dest) -> None:
    """Spot summary table; event percentages carry one decimal."""
    rows = spot_report(spots)
    header = ["spot_id", "polarity", "n_reports", "n_participants", "mean_experience"]
    header += [cat.value for cat in EventCategory]
    stream, needs_close = _open(dest)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    row["spot_id"],
                    row["polarity"],
                    row["n_reports"],
                    row["n_participants"],
                    f"{row['mean_experience']:.3f}",
                ]
                + [f"{row[cat.value]:.1f}" for cat in EventCategory]
            )
    finally:
        if needs_close:
            stream.close()


def _open(dest: Dest):
    if isinstance(dest, (str, Path)):
        return open(dest, "w", encoding="utf-8", newline=""), True
    return dest, False


def _write_text(text: str, dest: Dest) -> None:
    stream, needs_close = _open(dest)
    try:
        stream.write(text)
    finally:
        if needs_close:
            stream.close()
