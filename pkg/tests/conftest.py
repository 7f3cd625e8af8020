from __future__ import annotations

from datetime import datetime, timezone

import pytest

from ecoq import domain
from ecoq.model import EventAggregate, GeoPoint, Mode, Phase, WasteType


def at(hour: int, minute: int = 0, second: int = 0, day: int = 10) -> datetime:
    """A UTC instant on the standard test day (2021-05-10)."""
    return datetime(2021, 5, day, hour, minute, second, tzinfo=timezone.utc)


CENTER = GeoPoint(61.065, 28.095)


def new_event(event_id: str = "e1", radius_m: float = 2000.0) -> EventAggregate:
    return domain.create_event(
        event_id=event_id,
        name="Campus cleanup",
        icon="leaf",
        start_time=at(10),
        end_time=at(14),
        area_center=CENTER,
        area_radius_m=radius_m,
    )


def active_event(participants: int = 2) -> EventAggregate:
    """Event in the active phase with a plastic quest and N solo runners."""
    agg = new_event()
    agg = domain.advance_phase(agg, Phase.PREPARATION)
    agg, _ = domain.create_quest(
        agg, "Plastic sweep", WasteType.PLASTIC, target_count=5, bonus_points=50
    )
    for index in range(participants):
        agg, _ = domain.register_participant(agg, f"runner{index + 1}", Mode.SOLO)
    return domain.advance_phase(agg, Phase.ACTIVE)


@pytest.fixture
def defined_event() -> EventAggregate:
    return new_event()


@pytest.fixture
def live_event() -> EventAggregate:
    return active_event()
