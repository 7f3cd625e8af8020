"""Error hierarchy shared by every EcoQ module.

Errors are grouped by the way callers react to them: bad input, a state
conflict, a missing entity, an authorization failure, or a storage fault.
The HTTP layer maps each concrete class to exactly one status code (see
``ecoq.api.ERROR_STATUS``), so new errors must extend one of the family
bases below.
"""

from __future__ import annotations


class EcoQError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(EcoQError):
    """The input itself is unacceptable regardless of current state."""


class ConflictError(EcoQError):
    """The input is well-formed but clashes with the current state."""


class NotFoundError(EcoQError):
    """A referenced entity does not exist."""


class AuthError(EcoQError):
    """The caller is not allowed to perform the request."""


class StorageError(EcoQError):
    """The persistence layer failed or its contents are unusable."""


# -- validation ---------------------------------------------------------------

class InvalidName(ValidationError):
    """Empty or over-long name/title."""


class InvalidIcon(ValidationError):
    """Icon identifier outside the fixed icon set."""


class InvalidSchedule(ValidationError):
    """Event start is not strictly before its end."""


class InvalidGeo(ValidationError):
    """Latitude/longitude out of range or non-positive radius."""


class InvalidTarget(ValidationError):
    """Quest target count given without a target waste type."""


class OutOfEventArea(ValidationError):
    """Marker placed beyond the tolerated distance from the event center."""


class InvalidRadius(ValidationError):
    """Non-positive search radius."""


class InvalidK(ValidationError):
    """Nearest-neighbour count below 1."""


class MissingWeight(ValidationError):
    """Bin-sourced bag record without a measured weight."""


class NonPositiveWeight(ValidationError):
    """Bin drop with a weight of zero or less."""


class RangeViolation(ValidationError):
    """Telemetry value outside the bin's physical ranges."""


class InvalidId(ValidationError):
    """Identifier empty or containing the payload delimiter."""


class MalformedPayload(ValidationError):
    """QR payload with wrong field count, version, or field shape."""


class UnknownWasteType(ValidationError):
    """Waste-type label outside the closed enumeration."""


class ChecksumMismatch(ValidationError):
    """QR payload checksum does not match its content."""


class BadClaim(ValidationError):
    """QR claim undecodable or not redeemable against its event."""


class NoTarget(ValidationError):
    """Quest bonus requested for a quest without a target count."""


class MalformedBody(ValidationError):
    """HTTP request body missing fields or carrying wrong types."""


# -- conflicts ----------------------------------------------------------------

class IllegalTransition(ConflictError):
    """Phase change that skips, reverses, or leaves the terminal phase."""


class WrongPhase(ConflictError):
    """Command not permitted in the event's current phase."""


class OutsideEventWindow(WrongPhase):
    """Bag recorded outside the event's scheduled time window."""


class DuplicateName(ConflictError):
    """Display name already registered in this event."""


class DuplicateTeamName(ConflictError):
    """Team name already taken in this event."""


class AlreadyInTeam(ConflictError):
    """Participant already belongs to a team in this event."""


class AlreadyStarted(ConflictError):
    """Active participation already exists for this participant/quest."""


class QuestNotStarted(ConflictError):
    """Bag references a quest the participant has not started."""


class EventNotActive(ConflictError):
    """Bin drop against an event that is not in its active phase."""


class StaleReading(ConflictError):
    """Telemetry timestamp earlier than the bin's last reading."""


class SequenceConflict(ConflictError):
    """Concurrent writer appended to the command log first."""


# -- missing entities ---------------------------------------------------------

class UnknownEvent(NotFoundError):
    """No event with this id."""


class UnknownQuest(NotFoundError):
    """No quest with this id in the event."""


class UnknownParticipant(NotFoundError):
    """Participant id not registered in the event."""


class UnknownTeam(NotFoundError):
    """No team with this id in the event."""


class UnknownArea(NotFoundError):
    """Quest references a polluted area the event does not have."""


class UnknownBin(NotFoundError):
    """No bin with this id."""


# -- auth ---------------------------------------------------------------------

class Unauthorized(AuthError):
    """Token missing or not recognized."""


class Forbidden(AuthError):
    """Token recognized but its role does not cover the request."""


# -- storage ------------------------------------------------------------------

class StorageFailure(StorageError):
    """I/O failure while appending to or reading the command log."""


class CorruptLog(StorageError):
    """Sequence gap or unparseable record in a command log."""
