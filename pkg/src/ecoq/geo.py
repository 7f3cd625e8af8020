"""Great-circle distances and location/time event discovery.

Distances use the haversine formula on a spherical Earth (R = 6371.0 km),
which is accurate to well under a percent at city scale. Searches are
linear scans: event and collection-point counts stay small enough that a
spatial index would buy nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

from ecoq.errors import InvalidK, InvalidRadius, InvalidSchedule
from ecoq.model import EventRecord, GeoPoint

#: Mean Earth radius in kilometers.
EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class TimeWindow:
    """A closed UTC interval; events touching either bound are included."""

    start: datetime
    end: datetime

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise InvalidSchedule(f"window start {self.start} is after end {self.end}")

    def overlaps(self, other_start: datetime, other_end: datetime) -> bool:
        return self.start <= other_end and other_start <= self.end


def haversine_distance(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points in kilometers."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlon / 2) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(min(1.0, h)))


def find_events(
    events: list[EventRecord],
    center: GeoPoint,
    radius_km: float,
    window: TimeWindow,
) -> list[EventRecord]:
    """Events near a point whose schedule overlaps the window.

    Keeps events whose center lies within ``radius_km`` of ``center`` and
    whose ``[start_time, end_time]`` overlaps the window (closed intervals).
    Sorted by distance ascending, then start time, then event id.
    """
    if radius_km <= 0:
        raise InvalidRadius(f"radius_km must be positive, got {radius_km}")
    hits = [
        (haversine_distance(center, ev.area_center), ev)
        for ev in events
        if window.overlaps(ev.start_time, ev.end_time)
    ]
    hits = [(dist, ev) for dist, ev in hits if dist <= radius_km]
    hits.sort(key=lambda pair: (pair[0], pair[1].start_time, pair[1].event_id))
    return [ev for _, ev in hits]


def nearest_collection_points(
    points: list[GeoPoint], origin: GeoPoint, k: int
) -> list[GeoPoint]:
    """The ``k`` collection points closest to ``origin``, nearest first.

    Returns fewer than ``k`` when fewer points exist. Ties keep input order.
    """
    if k < 1:
        raise InvalidK(f"k must be at least 1, got {k}")
    ranked = sorted(points, key=lambda p: haversine_distance(origin, p))
    return ranked[:k]
