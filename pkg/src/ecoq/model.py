"""Domain types for cleanup events.

Everything in this module is an immutable value: operations in
:mod:`ecoq.domain` take an aggregate and return a new one, so aggregates can
be shared between threads and compared field-by-field after a log replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

from ecoq.errors import InvalidGeo

#: Longest accepted event name.
MAX_NAME_LEN = 120

#: Markers (polluted areas, collection points) may sit up to this factor
#: times the event radius away from the event center.
AREA_TOLERANCE = 1.5

#: Fixed icon set offered by the event-creation form.
ICONS = frozenset({
    "leaf", "tree", "recycle", "droplet", "globe", "sun", "sprout", "bin",
})


class WasteType(str, Enum):
    """Closed set of waste fractions a bag can carry."""

    MIXED = "MIXED"
    PAPER = "PAPER"
    PLASTIC = "PLASTIC"
    GLASS = "GLASS"
    METAL = "METAL"
    HAZARDOUS = "HAZARDOUS"


class Phase(str, Enum):
    """Event lifecycle phases, in order; transitions move forward one step."""

    DEFINED = "defined"
    PREPARATION = "preparation"
    ACTIVE = "active"
    COMPLETED = "completed"


#: Lifecycle order used to validate transitions.
PHASE_ORDER: tuple[Phase, ...] = (
    Phase.DEFINED, Phase.PREPARATION, Phase.ACTIVE, Phase.COMPLETED,
)


class Source(str, Enum):
    """Where a bag record came from."""

    APP = "app"
    BIN = "bin"


class Mode(str, Enum):
    """How a participant intends to take part."""

    SOLO = "solo"
    TEAM = "team"


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84-style latitude/longitude pair in degrees."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat <= 90.0) or not (-180.0 <= self.lon <= 180.0):
            raise InvalidGeo(f"coordinates out of range: ({self.lat}, {self.lon})")


@dataclass(frozen=True)
class PollutedArea:
    """Organizer-marked hotspot inside the event area."""

    area_id: str
    center: GeoPoint
    radius_m: float
    note: str


@dataclass(frozen=True)
class EventRecord:
    """Identity, schedule, geography, and lifecycle phase of one event."""

    event_id: str
    name: str
    icon: str
    start_time: datetime
    end_time: datetime
    area_center: GeoPoint
    area_radius_m: float
    phase: Phase = Phase.DEFINED
    polluted_areas: tuple[PollutedArea, ...] = ()
    collection_points: tuple[GeoPoint, ...] = ()


@dataclass(frozen=True)
class Quest:
    """A task inside an event, optionally targeting one waste type.

    ``target_count`` requires ``target_type``; the bonus is paid once per
    participation, on the bag that reaches the target exactly.
    """

    quest_id: str
    event_id: str
    title: str
    target_type: WasteType | None = None
    target_count: int | None = None
    area: str | None = None
    bonus_points: int = 0


@dataclass(frozen=True)
class Participation:
    """A participant's timed engagement with one quest."""

    participant_id: str
    quest_id: str
    started_at: datetime
    completed_at: datetime | None = None


@dataclass(frozen=True)
class Team:
    """A named group of participants; a participant joins at most one."""

    team_id: str
    event_id: str
    name: str
    member_ids: frozenset[str]


@dataclass(frozen=True)
class ParticipantInfo:
    """Registration entry for one participant of one event."""

    participant_id: str
    display_name: str
    mode: Mode


@dataclass(frozen=True)
class BagRecord:
    """One registered garbage bag.

    ``points`` already includes the quest bonus when this was the bag that
    completed the quest, so summing the field over any set of records gives
    the full score for that set.
    """

    bag_id: str
    event_id: str
    participant_id: str
    waste_type: WasteType
    points: int
    recorded_at: datetime
    source: Source
    quest_id: str | None = None
    team_id: str | None = None
    weight_kg: float | None = None


@dataclass(frozen=True)
class PendingClaim:
    """A bag id issued for a bin drop-off, waiting to be scanned."""

    bag_id: str
    participant_id: str
    waste_type: WasteType
    quest_id: str | None = None


@dataclass(frozen=True)
class EventSummary:
    """Per-type bag totals plus headline counts for one event."""

    counts: dict[WasteType, int]
    weights: dict[WasteType, float]
    participant_count: int
    quest_completions: int
    total_bags: int


@dataclass(frozen=True)
class EventAggregate:
    """The full state of one event.

    ``bag_seq`` counts every bag id ever issued (recorded bags plus pending
    claims), so ids stay unique even after claims are redeemed.
    """

    record: EventRecord
    participants: dict[str, ParticipantInfo] = field(default_factory=dict)
    quests: tuple[Quest, ...] = ()
    teams: tuple[Team, ...] = ()
    participations: tuple[Participation, ...] = ()
    bags: tuple[BagRecord, ...] = ()
    pending_claims: dict[str, PendingClaim] = field(default_factory=dict)
    bag_seq: int = 0

    @property
    def event_id(self) -> str:
        return self.record.event_id

    @property
    def phase(self) -> Phase:
        return self.record.phase

    def quest(self, quest_id: str) -> Quest | None:
        for quest in self.quests:
            if quest.quest_id == quest_id:
                return quest
        return None

    def team_by_id(self, team_id: str) -> Team | None:
        for team in self.teams:
            if team.team_id == team_id:
                return team
        return None

    def team_of(self, participant_id: str) -> Team | None:
        """The team the participant belongs to, if any."""
        for team in self.teams:
            if participant_id in team.member_ids:
                return team
        return None

    def active_participation(
        self, participant_id: str, quest_id: str
    ) -> Participation | None:
        """The open (uncompleted) participation for this pair, if any."""
        for part in self.participations:
            if (
                part.participant_id == participant_id
                and part.quest_id == quest_id
                and part.completed_at is None
            ):
                return part
        return None

    def has_started(self, participant_id: str, quest_id: str) -> bool:
        """Whether this participant ever started this quest."""
        return any(
            part.participant_id == participant_id and part.quest_id == quest_id
            for part in self.participations
        )
