"""Durable event aggregates and the event-data CSV export.

Persistence is an append-only command log, one JSON line per command, one
file per event. Loading an aggregate replays its log through the same
fold that executed the commands live, so a reload reproduces the aggregate
field-for-field. There are no snapshots; event volumes are small and the
log doubles as a full audit trail.

The CSV export is the event's results artifact and is byte-deterministic:
fixed column order, RFC-4180 quoting, LF line endings, UTF-8.
"""

from __future__ import annotations

import csv
import io
import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Sequence

from ecoq import domain
from ecoq.errors import (
    CorruptLog,
    EcoQError,
    MalformedBody,
    SequenceConflict,
    StorageFailure,
    UnknownEvent,
)
from ecoq.model import BagRecord, EventAggregate, Participation, Phase, Source
from ecoq.wire import (
    format_instant,
    parse_geo_point,
    parse_instant,
    parse_mode,
    parse_source,
    parse_waste_type,
)

CSV_BAG_HEADER = (
    "event_id,participant_id,team_id,quest_id,bag_id,waste_type,"
    "weight_kg,points,recorded_at,source"
)
CSV_PARTICIPATION_HEADER = "quest_id,participant_id,started_at,completed_at"


@dataclass(frozen=True)
class LoggedCommand:
    """One durable log entry; ``seq`` increases by one per event."""

    seq: int
    event_id: str
    kind: str
    payload: dict[str, Any]
    applied_at: datetime


def _need(payload: dict[str, Any], key: str) -> Any:
    if key not in payload or payload[key] is None:
        raise MalformedBody(f"missing field {key!r}")
    return payload[key]


def apply_command(
    aggregate: EventAggregate | None, kind: str, payload: dict[str, Any]
) -> tuple[EventAggregate, Any]:
    """Apply one wire-form command to an aggregate.

    This is the single transition used both when executing commands live
    and when replaying a log, which is what makes replay exact. Returns
    the new aggregate and the fact the command produced.
    """
    if kind == "create_event":
        if aggregate is not None:
            raise MalformedBody("create_event on an existing aggregate")
        created = domain.create_event(
            event_id=_need(payload, "event_id"),
            name=_need(payload, "name"),
            icon=_need(payload, "icon"),
            start_time=parse_instant(_need(payload, "start_time")),
            end_time=parse_instant(_need(payload, "end_time")),
            area_center=parse_geo_point(_need(payload, "area_center")),
            area_radius_m=float(_need(payload, "area_radius_m")),
        )
        return created, created.record
    if aggregate is None:
        raise MalformedBody(f"command {kind!r} needs an existing event")

    if kind == "advance_phase":
        try:
            target = Phase(str(_need(payload, "target")).lower())
        except ValueError:
            raise MalformedBody(f"unknown phase {payload.get('target')!r}") from None
        updated = domain.advance_phase(aggregate, target)
        return updated, updated.record
    if kind == "add_polluted_area":
        return domain.add_polluted_area(
            aggregate,
            center=parse_geo_point(_need(payload, "center")),
            radius_m=float(_need(payload, "radius_m")),
            note=str(payload.get("note", "")),
        )
    if kind == "add_collection_point":
        updated = domain.add_collection_point(
            aggregate, parse_geo_point(_need(payload, "point"))
        )
        return updated, updated.record
    if kind == "create_quest":
        target_type = payload.get("target_type")
        return domain.create_quest(
            aggregate,
            title=_need(payload, "title"),
            target_type=parse_waste_type(target_type) if target_type else None,
            target_count=(
                int(payload["target_count"])
                if payload.get("target_count") is not None
                else None
            ),
            area=payload.get("area"),
            bonus_points=(
                int(payload["bonus_points"])
                if payload.get("bonus_points") is not None
                else None
            ),
        )
    if kind == "register_participant":
        return domain.register_participant(
            aggregate,
            display_name=_need(payload, "display_name"),
            mode=parse_mode(_need(payload, "mode")),
        )
    if kind == "team_action":
        action = str(_need(payload, "action")).lower()
        participant_id = _need(payload, "participant_id")
        if action == "create":
            return domain.create_team(aggregate, participant_id, _need(payload, "name"))
        if action == "join":
            return domain.join_team(aggregate, participant_id, _need(payload, "team_id"))
        raise MalformedBody(f"unknown team action {action!r}")
    if kind == "start_quest":
        return domain.start_quest(
            aggregate,
            participant_id=_need(payload, "participant_id"),
            quest_id=_need(payload, "quest_id"),
            now=parse_instant(_need(payload, "started_at")),
        )
    if kind == "record_bag":
        weight = payload.get("weight_kg")
        return domain.record_bag(
            aggregate,
            participant_id=_need(payload, "participant_id"),
            waste_type=parse_waste_type(_need(payload, "waste_type")),
            source=parse_source(_need(payload, "source")),
            now=parse_instant(_need(payload, "recorded_at")),
            quest_id=payload.get("quest_id"),
            weight_kg=float(weight) if weight is not None else None,
        )
    if kind == "issue_bag_claim":
        return domain.issue_bag_claim(
            aggregate,
            participant_id=_need(payload, "participant_id"),
            waste_type=parse_waste_type(_need(payload, "waste_type")),
            quest_id=payload.get("quest_id"),
        )
    if kind == "bin_drop":
        return domain.redeem_bag_claim(
            aggregate,
            bag_id=_need(payload, "bag_id"),
            weight_kg=float(_need(payload, "weight_kg")),
            now=parse_instant(_need(payload, "recorded_at")),
            expected_type=(
                parse_waste_type(payload["waste_type"])
                if payload.get("waste_type")
                else None
            ),
        )
    raise MalformedBody(f"unknown command kind {kind!r}")


class EventStore:
    """Command-log-backed store of event aggregates.

    One writer per event at a time: appends take the event's lock, and an
    on-disk size check turns a lost race with an external writer into a
    SequenceConflict instead of a corrupted file.
    """

    def __init__(self, data_dir: str | Path) -> None:
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._aggregates: dict[str, EventAggregate] = {}
        self._seqs: dict[str, int] = {}
        self._sizes: dict[str, int] = {}

    # -- paths and locks -------------------------------------------------

    def _path(self, event_id: str) -> Path:
        return self.data_dir / f"{event_id}.log"

    def _lock_for(self, event_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(event_id, threading.Lock())

    def event_ids(self) -> list[str]:
        """Ids of every persisted event, stable order."""
        ids = {p.stem for p in self.data_dir.glob("*.log")}
        ids.update(self._aggregates)
        return sorted(ids)

    def next_event_id(self) -> str:
        """Allocate the next free sequential id (``e1``, ``e2``, ...)."""
        taken = set(self.event_ids())
        n = len(taken) + 1
        while f"e{n}" in taken:
            n += 1
        return f"e{n}"

    # -- reads -------------------------------------------------------------

    def get(self, event_id: str) -> EventAggregate:
        """Current aggregate, replaying the log on first access."""
        with self._lock_for(event_id):
            return self._load_locked(event_id)

    def all_aggregates(self) -> list[EventAggregate]:
        return [self.get(event_id) for event_id in self.event_ids()]

    def _load_locked(self, event_id: str) -> EventAggregate:
        cached = self._aggregates.get(event_id)
        if cached is not None:
            return cached
        aggregate, seq, size = self.replay(event_id)
        self._aggregates[event_id] = aggregate
        self._seqs[event_id] = seq
        self._sizes[event_id] = size
        return aggregate

    def replay(self, event_id: str) -> tuple[EventAggregate, int, int]:
        """Fold the log from scratch; returns (aggregate, last seq, bytes)."""
        path = self._path(event_id)
        if not path.exists():
            raise UnknownEvent(f"no event {event_id!r}")
        aggregate: EventAggregate | None = None
        expected_seq = 0
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise StorageFailure(f"cannot read {path}: {exc}") from exc
        for line_no, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
            try:
                entry = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptLog(f"{path}:{line_no}: unparseable entry") from exc
            expected_seq += 1
            if entry.get("seq") != expected_seq or entry.get("event_id") != event_id:
                raise CorruptLog(
                    f"{path}:{line_no}: expected seq {expected_seq} for {event_id}"
                )
            try:
                aggregate, _ = apply_command(
                    aggregate, entry["kind"], entry["payload"]
                )
            except (EcoQError, KeyError) as exc:
                raise CorruptLog(f"{path}:{line_no}: replay failed: {exc}") from exc
        if aggregate is None:
            raise CorruptLog(f"{path}: log holds no commands")
        return aggregate, expected_seq, len(raw)

    # -- writes ------------------------------------------------------------

    def create(self, payload: dict[str, Any], applied_at: datetime) -> tuple[EventAggregate, Any]:
        """Create a new event, allocating its id unless the payload has one."""
        with self._registry_lock:
            event_id = payload.get("event_id") or self.next_event_id()
        payload = dict(payload, event_id=event_id)
        return self.execute(event_id, "create_event", payload, applied_at)

    def execute(
        self,
        event_id: str,
        kind: str,
        payload: dict[str, Any],
        applied_at: datetime,
    ) -> tuple[EventAggregate, Any]:
        """Validate, apply, and durably append one command.

        The command is applied to the in-memory aggregate first; only a
        command the domain accepts reaches the log, so every logged line
        replays cleanly.
        """
        with self._lock_for(event_id):
            if kind == "create_event":
                if self._path(event_id).exists():
                    raise SequenceConflict(f"event {event_id!r} already exists")
                aggregate = None
            else:
                aggregate = self._load_locked(event_id)
            updated, result = apply_command(aggregate, kind, payload)
            seq = self._seqs.get(event_id, 0) + 1
            self._append(event_id, seq, kind, payload, applied_at)
            self._aggregates[event_id] = updated
            self._seqs[event_id] = seq
            return updated, result

    def _append(
        self,
        event_id: str,
        seq: int,
        kind: str,
        payload: dict[str, Any],
        applied_at: datetime,
    ) -> None:
        path = self._path(event_id)
        expected_size = self._sizes.get(event_id, 0)
        actual_size = path.stat().st_size if path.exists() else 0
        if actual_size != expected_size:
            raise SequenceConflict(
                f"{path} changed on disk (saw {actual_size} bytes, "
                f"expected {expected_size}); another writer won"
            )
        line = json.dumps(
            {
                "seq": seq,
                "event_id": event_id,
                "kind": kind,
                "payload": payload,
                "applied_at": format_instant(applied_at),
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        data = line.encode("utf-8") + b"\n"
        try:
            with open(path, "ab") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageFailure(f"append to {path} failed: {exc}") from exc
        self._sizes[event_id] = expected_size + len(data)

    def read_log(self, event_id: str) -> list[LoggedCommand]:
        """The raw command history, for audits and replay tests."""
        path = self._path(event_id)
        if not path.exists():
            raise UnknownEvent(f"no event {event_id!r}")
        entries = []
        for line in path.read_text("utf-8").splitlines():
            raw = json.loads(line)
            entries.append(
                LoggedCommand(
                    seq=raw["seq"],
                    event_id=raw["event_id"],
                    kind=raw["kind"],
                    payload=raw["payload"],
                    applied_at=parse_instant(raw["applied_at"]),
                )
            )
        return entries


# -- CSV export -----------------------------------------------------------


def _bag_row(bag: BagRecord) -> list[str]:
    return [
        bag.event_id,
        bag.participant_id,
        bag.team_id or "",
        bag.quest_id or "",
        bag.bag_id,
        bag.waste_type.value,
        f"{bag.weight_kg:.3f}" if bag.weight_kg is not None else "",
        str(bag.points),
        format_instant(bag.recorded_at),
        bag.source.value,
    ]


def _participation_row(part: Participation) -> list[str]:
    return [
        part.quest_id,
        part.participant_id,
        format_instant(part.started_at),
        format_instant(part.completed_at) if part.completed_at else "",
    ]


def export_event_csv(
    bags: Sequence[BagRecord], participations: Sequence[Participation]
) -> bytes:
    """Render the event's collected data as CSV bytes.

    Section 1: one row per bag, ordered by recording time. A blank line.
    Section 2: one row per participation with its start (and completion)
    time. Optional fields serialize as empty; weights carry three
    decimals; timestamps are ISO-8601 UTC with ``Z``.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_BAG_HEADER.split(","))
    for bag in sorted(bags, key=lambda b: b.recorded_at):
        writer.writerow(_bag_row(bag))
    buffer.write("\n")
    writer.writerow(CSV_PARTICIPATION_HEADER.split(","))
    for part in sorted(
        participations, key=lambda p: (p.started_at, p.quest_id, p.participant_id)
    ):
        writer.writerow(_participation_row(part))
    return buffer.getvalue().encode("utf-8")


def export_aggregate_csv(aggregate: EventAggregate) -> bytes:
    return export_event_csv(aggregate.bags, aggregate.participations)


def parse_event_csv(data: bytes) -> tuple[list[BagRecord], list[Participation]]:
    """Inverse of :func:`export_event_csv`.

    Parsing and re-exporting yields byte-identical output, which is what
    makes golden-file comparisons meaningful.
    """
    rows = list(csv.reader(io.StringIO(data.decode("utf-8"))))
    try:
        split = rows.index([])
    except ValueError:
        raise MalformedBody("missing blank line between CSV sections") from None
    bag_rows, part_rows = rows[:split], rows[split + 1 :]
    if not bag_rows or bag_rows[0] != CSV_BAG_HEADER.split(","):
        raise MalformedBody("bad bag-section header")
    if not part_rows or part_rows[0] != CSV_PARTICIPATION_HEADER.split(","):
        raise MalformedBody("bad participation-section header")
    bags = []
    for row in bag_rows[1:]:
        if len(row) != 10:
            raise MalformedBody(f"bag row has {len(row)} fields, wanted 10")
        bags.append(
            BagRecord(
                event_id=row[0],
                participant_id=row[1],
                team_id=row[2] or None,
                quest_id=row[3] or None,
                bag_id=row[4],
                waste_type=parse_waste_type(row[5]),
                weight_kg=float(row[6]) if row[6] else None,
                points=int(row[7]),
                recorded_at=parse_instant(row[8]),
                source=Source(row[9]),
            )
        )
    participations = []
    for row in part_rows[1:]:
        if len(row) != 4:
            raise MalformedBody(f"participation row has {len(row)} fields, wanted 4")
        participations.append(
            Participation(
                quest_id=row[0],
                participant_id=row[1],
                started_at=parse_instant(row[2]),
                completed_at=parse_instant(row[3]) if row[3] else None,
            )
        )
    return bags, participations
