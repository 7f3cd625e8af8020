"""Wire representations: timestamps and JSON views of domain values.

Field names match the domain types exactly, so API bodies, log payloads,
and seed files all read the same way. Timestamps travel as ISO-8601 UTC
with a ``Z`` suffix.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Any

from ecoq.errors import MalformedBody
from ecoq.model import (
    BagRecord,
    EventAggregate,
    EventRecord,
    EventSummary,
    GeoPoint,
    Mode,
    Participation,
    ParticipantInfo,
    PollutedArea,
    Quest,
    Source,
    Team,
    WasteType,
)
from ecoq.scoring import LeaderboardEntry


def format_instant(value: datetime) -> str:
    """``2021-05-10T10:30:00Z``; fractional seconds kept when present."""
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_instant(text: str) -> datetime:
    """Inverse of :func:`format_instant`; accepts any ISO-8601 UTC form."""
    if not isinstance(text, str):
        raise MalformedBody(f"expected an ISO-8601 timestamp, got {text!r}")
    try:
        parsed = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise MalformedBody(f"unparseable timestamp {text!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def parse_waste_type(label: Any) -> WasteType:
    try:
        return WasteType(str(label).upper())
    except ValueError:
        raise MalformedBody(f"unknown waste_type {label!r}") from None


def parse_mode(label: Any) -> Mode:
    try:
        return Mode(str(label).lower())
    except ValueError:
        raise MalformedBody(f"unknown mode {label!r}") from None


def parse_source(label: Any) -> Source:
    try:
        return Source(str(label).lower())
    except ValueError:
        raise MalformedBody(f"unknown source {label!r}") from None


def geo_point_dict(point: GeoPoint) -> dict[str, float]:
    return {"lat": point.lat, "lon": point.lon}


def parse_geo_point(value: Any) -> GeoPoint:
    if not isinstance(value, dict) or "lat" not in value or "lon" not in value:
        raise MalformedBody(f"expected {{lat, lon}}, got {value!r}")
    try:
        return GeoPoint(float(value["lat"]), float(value["lon"]))
    except (TypeError, ValueError):
        raise MalformedBody(f"non-numeric coordinates in {value!r}") from None


def polluted_area_dict(area: PollutedArea) -> dict[str, Any]:
    return {
        "area_id": area.area_id,
        "center": geo_point_dict(area.center),
        "radius_m": area.radius_m,
        "note": area.note,
    }


def event_record_dict(record: EventRecord) -> dict[str, Any]:
    return {
        "event_id": record.event_id,
        "name": record.name,
        "icon": record.icon,
        "start_time": format_instant(record.start_time),
        "end_time": format_instant(record.end_time),
        "area_center": geo_point_dict(record.area_center),
        "area_radius_m": record.area_radius_m,
        "phase": record.phase.value,
        "polluted_areas": [polluted_area_dict(a) for a in record.polluted_areas],
        "collection_points": [geo_point_dict(p) for p in record.collection_points],
    }


def quest_dict(quest: Quest) -> dict[str, Any]:
    return {
        "quest_id": quest.quest_id,
        "event_id": quest.event_id,
        "title": quest.title,
        "target_type": quest.target_type.value if quest.target_type else None,
        "target_count": quest.target_count,
        "area": quest.area,
        "bonus_points": quest.bonus_points,
    }


def team_dict(team: Team) -> dict[str, Any]:
    return {
        "team_id": team.team_id,
        "event_id": team.event_id,
        "name": team.name,
        "member_ids": sorted(team.member_ids),
    }


def participant_dict(info: ParticipantInfo) -> dict[str, Any]:
    return {
        "participant_id": info.participant_id,
        "display_name": info.display_name,
        "mode": info.mode.value,
    }


def participation_dict(part: Participation) -> dict[str, Any]:
    return {
        "participant_id": part.participant_id,
        "quest_id": part.quest_id,
        "started_at": format_instant(part.started_at),
        "completed_at": format_instant(part.completed_at) if part.completed_at else None,
    }


def bag_dict(bag: BagRecord) -> dict[str, Any]:
    return {
        "bag_id": bag.bag_id,
        "event_id": bag.event_id,
        "participant_id": bag.participant_id,
        "quest_id": bag.quest_id,
        "team_id": bag.team_id,
        "waste_type": bag.waste_type.value,
        "weight_kg": bag.weight_kg,
        "points": bag.points,
        "recorded_at": format_instant(bag.recorded_at),
        "source": bag.source.value,
    }


def summary_dict(summary: EventSummary) -> dict[str, Any]:
    return {
        "counts": {wt.value: summary.counts[wt] for wt in WasteType},
        "weights": {wt.value: summary.weights[wt] for wt in WasteType},
        "participant_count": summary.participant_count,
        "quest_completions": summary.quest_completions,
        "total_bags": summary.total_bags,
    }


def leaderboard_entry_dict(entry: LeaderboardEntry) -> dict[str, Any]:
    return {
        "subject_id": entry.subject_id,
        "total_points": entry.total_points,
        "bag_count": entry.bag_count,
        "last_scored_at": (
            format_instant(entry.last_scored_at) if entry.last_scored_at else None
        ),
    }


def aggregate_view(aggregate: EventAggregate) -> dict[str, Any]:
    """Everything the event page needs in one response."""
    return {
        "event": event_record_dict(aggregate.record),
        "quests": [quest_dict(q) for q in aggregate.quests],
        "teams": [team_dict(t) for t in aggregate.teams],
        "participants": [participant_dict(p) for p in aggregate.participants.values()],
        "participations": [participation_dict(p) for p in aggregate.participations],
        "bag_count": len(aggregate.bags),
    }
