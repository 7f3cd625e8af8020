"""Simulated smart garbage bins and their telemetry.

A bin carries a GPS location, an ultrasonic fill-level reading, a scale
total, a QR scanner, and a lid actuator. Hardware is simulated: telemetry
arrives as text lines, and a drop-off is a QR scan plus a weight. The fill
level rises by a fixed factor per kilogram dropped; real bins would report
the measured level through telemetry instead.

All state transitions are pure; :class:`BinRegistry` adds the per-bin
locking the concurrency contract requires.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Callable

from ecoq.domain import redeem_bag_claim
from ecoq.errors import (
    BadClaim,
    EcoQError,
    MalformedBody,
    NonPositiveWeight,
    RangeViolation,
    StaleReading,
    UnknownBin,
    UnknownEvent,
)
from ecoq.model import BagRecord, EventAggregate, GeoPoint
from ecoq.verification import BagClaim, decode_bag_qr
from ecoq.wire import format_instant, parse_instant

#: Percentage points of fill added per kilogram dropped, capped at 100.
FILL_PER_KG = 2.0

#: Fill percentage at which a bin is reported for emptying.
DEFAULT_ALERT_THRESHOLD = 80.0


class Lid(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class BinState:
    """One simulated bin; the scale total only ever grows."""

    bin_id: str
    location: GeoPoint
    fill_percent: float = 0.0
    cumulative_weight_kg: float = 0.0
    lid: Lid = Lid.CLOSED
    last_seen: datetime | None = None


@dataclass(frozen=True)
class TelemetryReading:
    """One sensor report from a bin."""

    bin_id: str
    fill_percent: float
    weight_kg: float
    timestamp: datetime


@dataclass(frozen=True)
class DropResult:
    """Outcome of a successful QR drop at a bin."""

    bin: BinState
    aggregate: EventAggregate
    bag: BagRecord


def new_bin(bin_id: str, location: GeoPoint) -> BinState:
    return BinState(bin_id=bin_id, location=location)


def parse_telemetry_line(line: str) -> TelemetryReading:
    """Parse ``bin_id fill_percent weight_kg timestamp_iso8601``.

    Fields are separated by single spaces; this is both the file format
    and the HTTP body of the telemetry endpoint.
    """
    parts = line.strip().split(" ")
    if len(parts) != 4:
        raise MalformedBody(f"expected 4 space-separated fields, got {len(parts)}")
    bin_id, fill_text, weight_text, stamp_text = parts
    try:
        fill = float(fill_text)
        weight = float(weight_text)
    except ValueError:
        raise MalformedBody(f"non-numeric telemetry values in {line!r}") from None
    return TelemetryReading(bin_id, fill, weight, parse_instant(stamp_text))


def format_telemetry_line(reading: TelemetryReading) -> str:
    return (
        f"{reading.bin_id} {reading.fill_percent} {reading.weight_kg} "
        f"{format_instant(reading.timestamp)}"
    )


def ingest_telemetry(state: BinState, reading: TelemetryReading) -> BinState:
    """Apply one sensor report.

    Rejects readings for other bins, timestamp regressions, values outside
    physical ranges, and scale totals lower than already seen. Ingesting
    the same reading twice is a no-op the second time.
    """
    if reading.bin_id != state.bin_id:
        raise UnknownBin(
            f"reading for {reading.bin_id!r} applied to bin {state.bin_id!r}"
        )
    if state.last_seen is not None and reading.timestamp < state.last_seen:
        raise StaleReading(
            f"reading at {format_instant(reading.timestamp)} precedes "
            f"last seen {format_instant(state.last_seen)}"
        )
    if not (0.0 <= reading.fill_percent <= 100.0):
        raise RangeViolation(f"fill_percent out of [0, 100]: {reading.fill_percent}")
    if reading.weight_kg < 0:
        raise RangeViolation(f"weight_kg must be >= 0, got {reading.weight_kg}")
    if reading.weight_kg < state.cumulative_weight_kg:
        raise RangeViolation(
            f"scale total cannot shrink: {reading.weight_kg} < "
            f"{state.cumulative_weight_kg}"
        )
    return replace(
        state,
        fill_percent=reading.fill_percent,
        cumulative_weight_kg=reading.weight_kg,
        last_seen=reading.timestamp,
    )


def apply_drop(state: BinState, weight_kg: float, now: datetime) -> BinState:
    """Bin-side effect of an accepted drop: lid cycles, scale and fill rise."""
    last_seen = now if state.last_seen is None else max(state.last_seen, now)
    return replace(
        state,
        fill_percent=min(100.0, state.fill_percent + weight_kg * FILL_PER_KG),
        cumulative_weight_kg=state.cumulative_weight_kg + weight_kg,
        lid=Lid.CLOSED,
        last_seen=last_seen,
    )


def decode_claim(qr_payload: str) -> BagClaim:
    """Decode a scanned payload, folding every decode failure into BadClaim."""
    try:
        return decode_bag_qr(qr_payload)
    except EcoQError as exc:
        raise BadClaim(f"unreadable claim: {exc}") from exc


def bin_scan_drop(
    state: BinState,
    qr_payload: str,
    measured_weight_kg: float,
    now: datetime,
    resolve_event: Callable[[str], EventAggregate | None],
) -> DropResult:
    """Scan a bag's QR at the bin and accept the drop.

    The claim must decode, reference an active event, and still be pending
    there; the scale must read a positive weight. On success the lid has
    cycled back to closed, the scale total includes the drop, and the
    emitted bag record is bin-sourced and weighed. On any failure the bin
    state is unchanged (lid stays closed).
    """
    claim = decode_claim(qr_payload)
    if measured_weight_kg <= 0:
        raise NonPositiveWeight(
            f"scale read {measured_weight_kg} kg; drops must weigh > 0"
        )
    aggregate = resolve_event(claim.event_id)
    if aggregate is None:
        raise UnknownEvent(f"claim references unknown event {claim.event_id!r}")
    updated, bag = redeem_bag_claim(
        aggregate,
        claim.bag_id,
        measured_weight_kg,
        now,
        expected_type=claim.waste_type,
    )
    return DropResult(bin=apply_drop(state, measured_weight_kg, now), aggregate=updated, bag=bag)


def fill_alerts(bins: list[BinState], threshold_percent: float) -> list[str]:
    """Bins at or above the threshold, fullest first (ties by bin id)."""
    if not (0.0 <= threshold_percent <= 100.0):
        raise RangeViolation(f"threshold out of [0, 100]: {threshold_percent}")
    hot = [b for b in bins if b.fill_percent >= threshold_percent]
    hot.sort(key=lambda b: (-b.fill_percent, b.bin_id))
    return [b.bin_id for b in hot]


class BinRegistry:
    """In-memory bin fleet with per-bin linearization.

    Different bins update concurrently; telemetry and drops on the same
    bin are serialized through its lock. Bins are simulation state and are
    not persisted.
    """

    def __init__(self) -> None:
        self._states: dict[str, BinState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def register(self, bin_id: str, location: GeoPoint) -> BinState:
        """Create a bin; registering an existing id returns it unchanged."""
        with self._registry_lock:
            if bin_id not in self._states:
                self._states[bin_id] = new_bin(bin_id, location)
                self._locks[bin_id] = threading.Lock()
            return self._states[bin_id]

    def get(self, bin_id: str) -> BinState:
        with self._registry_lock:
            state = self._states.get(bin_id)
        if state is None:
            raise UnknownBin(f"no bin {bin_id!r}")
        return state

    def all_bins(self) -> list[BinState]:
        with self._registry_lock:
            return list(self._states.values())

    def _lock_for(self, bin_id: str) -> threading.Lock:
        with self._registry_lock:
            lock = self._locks.get(bin_id)
        if lock is None:
            raise UnknownBin(f"no bin {bin_id!r}")
        return lock

    def ingest(self, bin_id: str, reading: TelemetryReading) -> BinState:
        with self._lock_for(bin_id):
            updated = ingest_telemetry(self.get(bin_id), reading)
            with self._registry_lock:
                self._states[bin_id] = updated
            return updated

    def record_drop(self, bin_id: str, weight_kg: float, now: datetime) -> BinState:
        """Apply the bin-side effect of a drop already accepted by the event."""
        with self._lock_for(bin_id):
            updated = apply_drop(self.get(bin_id), weight_kg, now)
            with self._registry_lock:
                self._states[bin_id] = updated
            return updated
