"""Points, quest bonuses, and leaderboards.

Scoring is count-based: each bag is worth a fixed number of points per
waste type, rarer fractions scoring more. A quest bonus is paid exactly
once per participation, on the bag that hits the target count.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

from ecoq.errors import NoTarget
from ecoq.model import EventAggregate, Quest, WasteType

#: Points earned per registered bag, by waste type.
POINTS_TABLE: dict[WasteType, int] = {
    WasteType.MIXED: 10,
    WasteType.PAPER: 10,
    WasteType.PLASTIC: 15,
    WasteType.GLASS: 15,
    WasteType.METAL: 20,
    WasteType.HAZARDOUS: 30,
}

#: Bonus applied when a quest is created without an explicit one.
DEFAULT_QUEST_BONUS = 50

# Sort sentinel: subjects that never scored sort after any real timestamp
# at the same point total (cannot happen in practice, every bag scores > 0).
_NEVER = datetime.max.replace(tzinfo=timezone.utc)


class Scope(str, Enum):
    """Whether a leaderboard ranks individuals or teams."""

    INDIVIDUAL = "individual"
    TEAM = "team"


@dataclass(frozen=True)
class LeaderboardEntry:
    """One ranked row: a participant or team with its running totals."""

    subject_id: str
    total_points: int
    bag_count: int
    last_scored_at: datetime | None = None


def score_bag(waste_type: WasteType) -> int:
    """Base points for one bag of the given type."""
    return POINTS_TABLE[waste_type]


def apply_quest_bonus(quest: Quest, bags_matching: int) -> int:
    """Bonus earned when ``bags_matching`` bags of the target type exist.

    Pays ``quest.bonus_points`` only on exact attainment of the target
    count; below-target and past-target counts earn nothing, which makes
    the bonus a once-per-participation payment.
    """
    if quest.target_count is None:
        raise NoTarget(f"quest {quest.quest_id} has no target count")
    return quest.bonus_points if bags_matching == quest.target_count else 0


def leaderboard(aggregate: EventAggregate, scope: Scope) -> list[LeaderboardEntry]:
    """Rank participants or teams of one event.

    Order: total points descending, ties broken by the earlier last-scored
    timestamp, then by ascending subject id. Individual scope lists every
    registered participant (zero rows included); team scope sums bag records
    under their ``team_id`` and lists every team.
    """
    totals: dict[str, int] = {}
    counts: dict[str, int] = {}
    last: dict[str, datetime] = {}

    if scope is Scope.INDIVIDUAL:
        for pid in aggregate.participants:
            totals[pid] = 0
            counts[pid] = 0
    else:
        for team in aggregate.teams:
            totals[team.team_id] = 0
            counts[team.team_id] = 0

    for bag in aggregate.bags:
        subject = bag.participant_id if scope is Scope.INDIVIDUAL else bag.team_id
        if subject is None or subject not in totals:
            continue
        totals[subject] += bag.points
        counts[subject] += 1
        if subject not in last or bag.recorded_at > last[subject]:
            last[subject] = bag.recorded_at

    entries = [
        LeaderboardEntry(
            subject_id=subject,
            total_points=totals[subject],
            bag_count=counts[subject],
            last_scored_at=last.get(subject),
        )
        for subject in totals
    ]
    entries.sort(
        key=lambda e: (-e.total_points, e.last_scored_at or _NEVER, e.subject_id)
    )
    return entries
