import io
import json

import pytest

from esmspots import EventCategory, GeoPoint, PlanarPoint, group_spots, unproject
from esmspots.exports import points_geojson, spots_geojson, write_geojson, write_spot_csv

from test_spots import _line, _manual_setup

from conftest import haversine_m


def _spots_setup():
    coords = _line(6, x0=0.0) + _line(6, x0=1000.0)
    bins = [3] * 6 + [-2] * 6
    events = [(EventCategory.COMFORT,)] * 6 + [(EventCategory.DELAY,)] * 6
    gi, graph, c, reports = _manual_setup(coords, bins, events=events)
    spots = group_spots(gi, graph, c, reports)
    origin = GeoPoint(53.5, 10.0)
    return gi, c, spots, origin


class TestPointsGeojson:
    def test_schema_and_properties(self):
        gi, coords, spots, origin = _spots_setup()
        spot_of = {i: s.spot_id for s in spots for i in s.member_ids}
        fc = points_geojson(gi, coords, origin, spot_of)
        assert fc["type"] == "FeatureCollection"
        assert len(fc["features"]) == 12
        first = fc["features"][0]
        assert first["geometry"]["type"] == "Point"
        assert set(first["properties"]) == {
            "point_id", "z", "p", "bin", "neighbor_count", "spot_id",
        }

    def test_coordinates_are_wgs84(self):
        gi, coords, spots, origin = _spots_setup()
        fc = points_geojson(gi, coords, origin)
        lon, lat = fc["features"][0]["geometry"]["coordinates"]
        # Inverse projection of planar (0, 0) is the origin itself.
        assert lat == pytest.approx(origin.lat, abs=1e-9)
        assert lon == pytest.approx(origin.lon, abs=1e-9)

    def test_valid_json(self):
        gi, coords, spots, origin = _spots_setup()
        buf = io.StringIO()
        write_geojson(points_geojson(gi, coords, origin), buf)
        parsed = json.loads(buf.getvalue())
        assert parsed["type"] == "FeatureCollection"


class TestSpotsGeojson:
    def test_polygons_closed_and_profiled(self):
        gi, coords, spots, origin = _spots_setup()
        fc = spots_geojson(spots, origin)
        assert len(fc["features"]) == 2
        for feature in fc["features"]:
            ring = feature["geometry"]["coordinates"][0]
            assert ring[0] == ring[-1]
            assert len(ring) >= 4
            props = feature["properties"]
            for cat in EventCategory:
                assert cat.value in props
            assert props["polarity"] in ("hot", "cold")

    def test_polygon_vertices_near_members(self):
        gi, coords, spots, origin = _spots_setup()
        fc = spots_geojson(spots, origin)
        hot = next(f for f in fc["features"] if f["properties"]["polarity"] == "hot")
        ring = hot["geometry"]["coordinates"][0]
        # All vertices should sit within ~100 m of the hot cluster line.
        member_geo = unproject([PlanarPoint(x, y) for x, y in coords[:6]], origin)
        for lon, lat in ring:
            d = min(haversine_m(GeoPoint(lat, lon), g) for g in member_geo)
            assert d < 100.0


class TestSpotCsv:
    def test_header_and_formatting(self):
        gi, coords, spots, origin = _spots_setup()
        buf = io.StringIO()
        write_spot_csv(spots, buf)
        lines = buf.getvalue().splitlines()
        header = lines[0].split(",")
        assert header[:5] == [
            "spot_id", "polarity", "n_reports", "n_participants", "mean_experience",
        ]
        assert header[5:] == [cat.value for cat in EventCategory]
        # 2 spots + 2 aggregate rows
        assert len(lines) == 5
        first = lines[1].split(",")
        assert first[0] == "1"
        # percentages carry exactly one decimal
        assert all("." in v and len(v.split(".")[1]) == 1 for v in first[5:])

    def test_empty_spot_list_gives_header_only(self):
        buf = io.StringIO()
        write_spot_csv([], buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == 1
