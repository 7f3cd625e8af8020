"""Event lifecycle and every state transition of a cleanup event.

All operations are pure: they take an :class:`~ecoq.model.EventAggregate`
(plus a command's inputs) and return a new aggregate together with the
fact they produced. Hosting code must linearize mutations per event;
reads of a snapshot are always safe.

Identifiers are allocated sequentially inside the aggregate (``p1``,
``q1``, ``t1``, ``a1``, ``b1``, ...), so replaying the same commands against
an empty aggregate reproduces it exactly.
"""

from __future__ import annotations

from dataclasses import replace
from datetime import datetime

from ecoq import scoring
from ecoq.errors import (
    AlreadyInTeam,
    AlreadyStarted,
    BadClaim,
    DuplicateName,
    DuplicateTeamName,
    EventNotActive,
    IllegalTransition,
    InvalidGeo,
    InvalidIcon,
    InvalidName,
    InvalidSchedule,
    InvalidTarget,
    MissingWeight,
    NonPositiveWeight,
    OutOfEventArea,
    OutsideEventWindow,
    QuestNotStarted,
    RangeViolation,
    UnknownArea,
    UnknownParticipant,
    UnknownQuest,
    UnknownTeam,
    WrongPhase,
)
from ecoq.geo import haversine_distance
from ecoq.model import (
    AREA_TOLERANCE,
    ICONS,
    MAX_NAME_LEN,
    PHASE_ORDER,
    BagRecord,
    EventAggregate,
    EventRecord,
    EventSummary,
    GeoPoint,
    Mode,
    Participation,
    PendingClaim,
    ParticipantInfo,
    Phase,
    PollutedArea,
    Quest,
    Source,
    Team,
    WasteType,
)

#: Seconds of tolerance for bag records after the scheduled end (none).
LATE_RECORD_GRACE_S = 0.0


def _require_phase(aggregate: EventAggregate, allowed: tuple[Phase, ...], what: str) -> None:
    if aggregate.phase not in allowed:
        names = ", ".join(p.value for p in allowed)
        raise WrongPhase(
            f"cannot {what} in phase {aggregate.phase.value} (requires {names})"
        )


def _require_marker_in_area(aggregate: EventAggregate, point: GeoPoint) -> None:
    limit_km = AREA_TOLERANCE * aggregate.record.area_radius_m / 1000.0
    dist_km = haversine_distance(aggregate.record.area_center, point)
    if dist_km > limit_km:
        raise OutOfEventArea(
            f"marker {dist_km:.3f} km from event center exceeds the "
            f"{limit_km:.3f} km tolerance"
        )


def create_event(
    event_id: str,
    name: str,
    icon: str,
    start_time: datetime,
    end_time: datetime,
    area_center: GeoPoint,
    area_radius_m: float,
) -> EventAggregate:
    """Define a new event; it starts in the ``defined`` phase, empty."""
    if not name or len(name) > MAX_NAME_LEN:
        raise InvalidName(f"event name must be 1..{MAX_NAME_LEN} chars")
    if icon not in ICONS:
        raise InvalidIcon(f"unknown icon {icon!r}; pick one of {sorted(ICONS)}")
    if start_time >= end_time:
        raise InvalidSchedule("start_time must be strictly before end_time")
    if area_radius_m <= 0:
        raise InvalidGeo(f"area_radius_m must be positive, got {area_radius_m}")
    record = EventRecord(
        event_id=event_id,
        name=name,
        icon=icon,
        start_time=start_time,
        end_time=end_time,
        area_center=area_center,
        area_radius_m=area_radius_m,
    )
    return EventAggregate(record=record)


def advance_phase(aggregate: EventAggregate, target: Phase) -> EventAggregate:
    """Move the event forward exactly one lifecycle step."""
    current_idx = PHASE_ORDER.index(aggregate.phase)
    if current_idx + 1 >= len(PHASE_ORDER) or PHASE_ORDER[current_idx + 1] is not target:
        raise IllegalTransition(
            f"cannot advance from {aggregate.phase.value} to {target.value}"
        )
    return replace(aggregate, record=replace(aggregate.record, phase=target))


def add_polluted_area(
    aggregate: EventAggregate, center: GeoPoint, radius_m: float, note: str
) -> tuple[EventAggregate, PollutedArea]:
    """Mark a hotspot for participants to concentrate on."""
    _require_phase(aggregate, (Phase.PREPARATION, Phase.ACTIVE), "mark a polluted area")
    if radius_m <= 0:
        raise InvalidGeo(f"area radius_m must be positive, got {radius_m}")
    _require_marker_in_area(aggregate, center)
    area = PollutedArea(
        area_id=f"a{len(aggregate.record.polluted_areas) + 1}",
        center=center,
        radius_m=radius_m,
        note=note,
    )
    record = replace(
        aggregate.record, polluted_areas=aggregate.record.polluted_areas + (area,)
    )
    return replace(aggregate, record=record), area


def add_collection_point(
    aggregate: EventAggregate, point: GeoPoint
) -> EventAggregate:
    """Register a separate-waste hand-over location on the event map."""
    _require_phase(aggregate, (Phase.PREPARATION, Phase.ACTIVE), "add a collection point")
    _require_marker_in_area(aggregate, point)
    record = replace(
        aggregate.record,
        collection_points=aggregate.record.collection_points + (point,),
    )
    return replace(aggregate, record=record)


def create_quest(
    aggregate: EventAggregate,
    title: str,
    target_type: WasteType | None = None,
    target_count: int | None = None,
    area: str | None = None,
    bonus_points: int | None = None,
) -> tuple[EventAggregate, Quest]:
    """Attach a task to the event.

    A counted target needs a target type. ``bonus_points`` defaults to the
    scoring module's standard bonus when the organizer leaves it out.
    """
    _require_phase(aggregate, (Phase.PREPARATION, Phase.ACTIVE), "create a quest")
    if not title:
        raise InvalidName("quest title must be non-empty")
    if target_count is not None and target_type is None:
        raise InvalidTarget("target_count requires a target_type")
    if target_count is not None and target_count < 1:
        raise InvalidTarget(f"target_count must be >= 1, got {target_count}")
    if area is not None and all(a.area_id != area for a in aggregate.record.polluted_areas):
        raise UnknownArea(f"event has no polluted area {area!r}")
    if bonus_points is None:
        bonus_points = scoring.DEFAULT_QUEST_BONUS
    if bonus_points < 0:
        raise InvalidTarget(f"bonus_points must be >= 0, got {bonus_points}")
    quest = Quest(
        quest_id=f"q{len(aggregate.quests) + 1}",
        event_id=aggregate.event_id,
        title=title,
        target_type=target_type,
        target_count=target_count,
        area=area,
        bonus_points=bonus_points,
    )
    return replace(aggregate, quests=aggregate.quests + (quest,)), quest


def register_participant(
    aggregate: EventAggregate, display_name: str, mode: Mode
) -> tuple[EventAggregate, ParticipantInfo]:
    """Register a runner; display names are unique within the event."""
    _require_phase(aggregate, (Phase.PREPARATION, Phase.ACTIVE), "register a participant")
    if not display_name:
        raise InvalidName("display_name must be non-empty")
    for existing in aggregate.participants.values():
        if existing.display_name == display_name:
            raise DuplicateName(f"display name {display_name!r} already registered")
    info = ParticipantInfo(
        participant_id=f"p{len(aggregate.participants) + 1}",
        display_name=display_name,
        mode=mode,
    )
    participants = dict(aggregate.participants)
    participants[info.participant_id] = info
    return replace(aggregate, participants=participants), info


def _require_participant(aggregate: EventAggregate, participant_id: str) -> None:
    if participant_id not in aggregate.participants:
        raise UnknownParticipant(f"participant {participant_id!r} is not registered")


def create_team(
    aggregate: EventAggregate, participant_id: str, name: str
) -> tuple[EventAggregate, Team]:
    """Found a team with the participant as its only member."""
    _require_participant(aggregate, participant_id)
    if aggregate.team_of(participant_id) is not None:
        raise AlreadyInTeam(f"{participant_id} already belongs to a team")
    if not name:
        raise InvalidName("team name must be non-empty")
    if any(team.name == name for team in aggregate.teams):
        raise DuplicateTeamName(f"team name {name!r} already taken")
    team = Team(
        team_id=f"t{len(aggregate.teams) + 1}",
        event_id=aggregate.event_id,
        name=name,
        member_ids=frozenset({participant_id}),
    )
    return replace(aggregate, teams=aggregate.teams + (team,)), team


def join_team(
    aggregate: EventAggregate, participant_id: str, team_id: str
) -> tuple[EventAggregate, Team]:
    """Add the participant to an existing team."""
    _require_participant(aggregate, participant_id)
    if aggregate.team_of(participant_id) is not None:
        raise AlreadyInTeam(f"{participant_id} already belongs to a team")
    target = aggregate.team_by_id(team_id)
    if target is None:
        raise UnknownTeam(f"no team {team_id!r} in this event")
    joined = replace(target, member_ids=target.member_ids | {participant_id})
    teams = tuple(joined if t.team_id == team_id else t for t in aggregate.teams)
    return replace(aggregate, teams=teams), joined


def start_quest(
    aggregate: EventAggregate, participant_id: str, quest_id: str, now: datetime
) -> tuple[EventAggregate, Participation]:
    """Open a timed participation; one open participation per pair."""
    _require_phase(aggregate, (Phase.ACTIVE,), "start a quest")
    _require_participant(aggregate, participant_id)
    if aggregate.quest(quest_id) is None:
        raise UnknownQuest(f"no quest {quest_id!r} in this event")
    if aggregate.active_participation(participant_id, quest_id) is not None:
        raise AlreadyStarted(f"{participant_id} already started {quest_id}")
    part = Participation(
        participant_id=participant_id, quest_id=quest_id, started_at=now
    )
    return replace(aggregate, participations=aggregate.participations + (part,)), part


def _quest_progress(
    aggregate: EventAggregate,
    quest: Quest,
    participant_id: str,
    waste_type: WasteType,
) -> tuple[int, bool]:
    """Bonus for the bag being recorded now and whether it completes the quest.

    Counts every earlier matching bag of this participant against this
    quest, plus the one being recorded. The bonus is paid exactly when the
    count reaches the target; later matches pay nothing, so a bonus is
    earned at most once per (participant, quest).
    """
    if quest.target_count is None or quest.target_type is not waste_type:
        return 0, False
    matching = 1 + sum(
        1
        for bag in aggregate.bags
        if bag.participant_id == participant_id
        and bag.quest_id == quest.quest_id
        and bag.waste_type is quest.target_type
    )
    bonus = scoring.apply_quest_bonus(quest, matching)
    return bonus, matching == quest.target_count


def _complete_participation(
    participations: tuple[Participation, ...],
    participant_id: str,
    quest_id: str,
    now: datetime,
) -> tuple[Participation, ...]:
    out = []
    for part in participations:
        if (
            part.participant_id == participant_id
            and part.quest_id == quest_id
            and part.completed_at is None
        ):
            out.append(replace(part, completed_at=now))
        else:
            out.append(part)
    return tuple(out)


def _materialize_bag(
    aggregate: EventAggregate,
    bag_id: str,
    participant_id: str,
    waste_type: WasteType,
    source: Source,
    quest_id: str | None,
    weight_kg: float | None,
    now: datetime,
) -> tuple[EventAggregate, BagRecord]:
    """Shared tail of the app and bin recording paths."""
    end_limit = aggregate.record.end_time
    if now < aggregate.record.start_time or (now - end_limit).total_seconds() > LATE_RECORD_GRACE_S:
        raise OutsideEventWindow(
            f"bags can only be recorded between {aggregate.record.start_time} "
            f"and {end_limit}"
        )
    points = scoring.score_bag(waste_type)
    participations = aggregate.participations
    if quest_id is not None:
        quest = aggregate.quest(quest_id)
        if quest is None:
            raise UnknownQuest(f"no quest {quest_id!r} in this event")
        if not aggregate.has_started(participant_id, quest_id):
            raise QuestNotStarted(f"{participant_id} has not started {quest_id}")
        open_part = aggregate.active_participation(participant_id, quest_id)
        if open_part is not None and now < open_part.started_at:
            # completion must not predate the start it would close
            raise QuestNotStarted(
                f"{quest_id} was started only at {open_part.started_at}"
            )
        bonus, completes = _quest_progress(aggregate, quest, participant_id, waste_type)
        points += bonus
        if completes:
            participations = _complete_participation(
                participations, participant_id, quest_id, now
            )
    team = aggregate.team_of(participant_id)
    bag = BagRecord(
        bag_id=bag_id,
        event_id=aggregate.event_id,
        participant_id=participant_id,
        waste_type=waste_type,
        points=points,
        recorded_at=now,
        source=source,
        quest_id=quest_id,
        team_id=team.team_id if team else None,
        weight_kg=weight_kg,
    )
    updated = replace(
        aggregate,
        bags=aggregate.bags + (bag,),
        participations=participations,
    )
    return updated, bag


def record_bag(
    aggregate: EventAggregate,
    participant_id: str,
    waste_type: WasteType,
    source: Source,
    now: datetime,
    quest_id: str | None = None,
    weight_kg: float | None = None,
) -> tuple[EventAggregate, BagRecord]:
    """Register one collected bag and score it.

    Points come from the scoring table; when the bag makes its quest reach
    the target count, the quest bonus lands on this record and the
    participation is completed. The participant's team, if any, is stamped
    onto the record.
    """
    _require_phase(aggregate, (Phase.ACTIVE,), "record a bag")
    _require_participant(aggregate, participant_id)
    if source is Source.BIN and weight_kg is None:
        raise MissingWeight("bin-sourced bags must carry a measured weight")
    if weight_kg is not None and weight_kg < 0:
        raise RangeViolation(f"weight_kg must be >= 0, got {weight_kg}")
    aggregate = replace(aggregate, bag_seq=aggregate.bag_seq + 1)
    bag_id = f"b{aggregate.bag_seq}"
    return _materialize_bag(
        aggregate, bag_id, participant_id, waste_type, source, quest_id, weight_kg, now
    )


def issue_bag_claim(
    aggregate: EventAggregate,
    participant_id: str,
    waste_type: WasteType,
    quest_id: str | None = None,
) -> tuple[EventAggregate, PendingClaim]:
    """Reserve a bag id for a bin drop-off.

    The app encodes the returned claim into a QR payload; the bin scan
    later redeems it into a weighed bag record. Issuing requires the same
    standing as recording: active event, registered participant, started
    quest when one is referenced.
    """
    _require_phase(aggregate, (Phase.ACTIVE,), "issue a bag claim")
    _require_participant(aggregate, participant_id)
    if quest_id is not None:
        if aggregate.quest(quest_id) is None:
            raise UnknownQuest(f"no quest {quest_id!r} in this event")
        if not aggregate.has_started(participant_id, quest_id):
            raise QuestNotStarted(f"{participant_id} has not started {quest_id}")
    claim = PendingClaim(
        bag_id=f"b{aggregate.bag_seq + 1}",
        participant_id=participant_id,
        waste_type=waste_type,
        quest_id=quest_id,
    )
    pending = dict(aggregate.pending_claims)
    pending[claim.bag_id] = claim
    updated = replace(
        aggregate, pending_claims=pending, bag_seq=aggregate.bag_seq + 1
    )
    return updated, claim


def redeem_bag_claim(
    aggregate: EventAggregate,
    bag_id: str,
    weight_kg: float,
    now: datetime,
    expected_type: WasteType | None = None,
) -> tuple[EventAggregate, BagRecord]:
    """Turn a scanned claim into a weighed, bin-sourced bag record.

    Claims are single-use: a second scan of the same payload is rejected.
    ``expected_type`` lets the scanner assert the waste type printed in the
    QR against the claim as issued.
    """
    if aggregate.phase is not Phase.ACTIVE:
        raise EventNotActive(
            f"event {aggregate.event_id} is {aggregate.phase.value}, not active"
        )
    claim = aggregate.pending_claims.get(bag_id)
    if claim is None:
        raise BadClaim(f"bag id {bag_id!r} was never issued or is already redeemed")
    if expected_type is not None and expected_type is not claim.waste_type:
        raise BadClaim(
            f"claim {bag_id!r} was issued for {claim.waste_type.value}, "
            f"not {expected_type.value}"
        )
    if weight_kg <= 0:
        raise NonPositiveWeight(f"measured weight must be positive, got {weight_kg}")
    pending = dict(aggregate.pending_claims)
    del pending[bag_id]
    aggregate = replace(aggregate, pending_claims=pending)
    return _materialize_bag(
        aggregate,
        bag_id,
        claim.participant_id,
        claim.waste_type,
        Source.BIN,
        claim.quest_id,
        weight_kg,
        now,
    )


def event_summary(aggregate: EventAggregate) -> EventSummary:
    """Totals for the results screen; zeros everywhere on an empty event."""
    counts = {wt: 0 for wt in WasteType}
    weights = {wt: 0.0 for wt in WasteType}
    for bag in aggregate.bags:
        counts[bag.waste_type] += 1
        if bag.weight_kg is not None:
            weights[bag.waste_type] += bag.weight_kg
    completions = sum(1 for p in aggregate.participations if p.completed_at is not None)
    return EventSummary(
        counts=counts,
        weights=weights,
        participant_count=len(aggregate.participants),
        quest_completions=completions,
        total_bags=len(aggregate.bags),
    )
