"""EcoQ: organize and run public waste-collection events.

Organizers define events, mark polluted areas, and create quests;
participants join solo or in teams, register collected garbage bags from
the app or at simulated smart bins, and climb live leaderboards. Event
data exports as deterministic CSV.

The package splits along clear seams: :mod:`ecoq.model` and
:mod:`ecoq.domain` hold the pure event state machine, :mod:`ecoq.scoring`
the points and leaderboards, :mod:`ecoq.geo` distance search,
:mod:`ecoq.verification` QR payloads, :mod:`ecoq.bins` the smart-bin
simulation, :mod:`ecoq.storage` the command log and CSV export,
:mod:`ecoq.api` the HTTP facade, and :mod:`ecoq.cli` the operator tool.
"""

from ecoq.model import (
    BagRecord,
    EventAggregate,
    EventRecord,
    EventSummary,
    GeoPoint,
    Mode,
    Participation,
    ParticipantInfo,
    PendingClaim,
    Phase,
    PollutedArea,
    Quest,
    Source,
    Team,
    WasteType,
)

__all__ = [
    "BagRecord",
    "EventAggregate",
    "EventRecord",
    "EventSummary",
    "GeoPoint",
    "Mode",
    "Participation",
    "ParticipantInfo",
    "PendingClaim",
    "Phase",
    "PollutedArea",
    "Quest",
    "Source",
    "Team",
    "WasteType",
]

__version__ = "0.1.0"
