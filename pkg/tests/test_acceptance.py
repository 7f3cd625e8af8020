"""Acceptance suite: one test per release criterion.

Each test prints a single ``ACCEPTANCE n ... PASS`` line on success (run
with ``pytest -s`` to see them); a failure shows up as a normal pytest
failure. Criteria with runtime budgets assert them.
"""

from __future__ import annotations

import random
import string
import time
from datetime import datetime, timedelta, timezone

import pytest
from fastapi.testclient import TestClient

from ecoq import bins, domain
from ecoq.api import AppConfig, create_app
from ecoq.errors import (
    EcoQError,
    EventNotActive,
    IllegalTransition,
    NonPositiveWeight,
    WrongPhase,
)
from ecoq.geo import TimeWindow, find_events, haversine_distance, nearest_collection_points
from ecoq.model import (
    EventRecord,
    GeoPoint,
    Mode,
    PHASE_ORDER,
    Phase,
    Source,
    WasteType,
)
from ecoq.scoring import Scope, leaderboard
from ecoq.storage import EventStore, export_aggregate_csv, export_event_csv, parse_event_csv
from ecoq.verification import decode_bag_qr, encode_bag_qr
from ecoq.wire import format_instant

from .conftest import at, new_event
from .oracles import brute_force_leaderboard, haversine_reference, recount_summary

ID_ALPHABET = string.ascii_letters + string.digits + "-_."


def _announce(number: int, title: str) -> None:
    print(f"ACCEPTANCE {number} ({title}): PASS")


# -- criterion 1: test-event replay through the API -----------------------------


def test_acceptance_1_test_event_replay(tmp_path):
    started = time.monotonic()
    config = AppConfig(data_dir=tmp_path / "data")
    clock = lambda: datetime(2021, 5, 10, 9, 0, tzinfo=timezone.utc)
    client = TestClient(create_app(config, clock=clock))
    org = {"Authorization": f"Bearer {config.organizer_token}"}

    event = client.post(
        "/api/v1/events",
        headers=org,
        json={
            "name": "Campus cleanup",
            "icon": "leaf",
            "start_time": "2021-05-10T10:00:00Z",
            "end_time": "2021-05-10T14:00:00Z",
            "area_center": {"lat": 61.065, "lon": 28.095},
            "area_radius_m": 2000,
        },
    )
    assert event.status_code == 201
    eid = event.json()["event_id"]

    def run(method, path, **kwargs):
        response = getattr(client, method)(f"/api/v1{path}", **kwargs)
        assert response.status_code in (200, 201), response.text
        return response.json() if method == "post" or "json" in str(
            response.headers.get("content-type", "")
        ) else response.content

    run("post", f"/events/{eid}/phase", headers=org, json={"target": "preparation"})
    run("post", f"/events/{eid}/quests", headers=org, json={
        "title": "Plastic sweep", "target_type": "PLASTIC", "target_count": 5})
    run("post", f"/events/{eid}/quests", headers=org, json={
        "title": "Glass patrol", "target_type": "GLASS", "target_count": 3,
        "bonus_points": 40})
    tokens = {}
    for name, mode in (
        ("anna", "solo"), ("ben", "team"), ("chloe", "team"),
        ("dmitri", "solo"), ("eva", "solo"),
    ):
        reg = run("post", f"/events/{eid}/participants", headers=org,
                  json={"display_name": name, "mode": mode})
        tokens[reg["participant_id"]] = {
            "Authorization": f"Bearer {reg['token']}"
        }
    assert len(tokens) == 5
    team = run("post", f"/events/{eid}/teams", headers=tokens["p2"],
               json={"participant_id": "p2", "action": "create", "name": "Green Tigers"})
    run("post", f"/events/{eid}/teams", headers=tokens["p3"],
        json={"participant_id": "p3", "action": "join", "team_id": team["team_id"]})
    run("post", f"/events/{eid}/phase", headers=org, json={"target": "active"})

    run("post", f"/events/{eid}/quests/q1/start", headers=tokens["p1"],
        json={"participant_id": "p1", "started_at": "2021-05-10T10:05:00Z"})
    run("post", f"/events/{eid}/quests/q2/start", headers=tokens["p3"],
        json={"participant_id": "p3", "started_at": "2021-05-10T10:07:00Z"})

    run("post", "/bins", headers=org,
        json={"bin_id": "bin1", "location": {"lat": 61.065, "lon": 28.095}})

    rng = random.Random(20210510)
    recorded = 0
    minute = 10
    # 16 app-registered bags across participants and types
    plan = (
        [("p1", "PLASTIC", "q1")] * 5
        + [("p3", "GLASS", "q2")] * 3
        + [("p2", None, None)] * 3
        + [("p4", None, None)] * 3
        + [("p5", None, None)] * 2
    )
    for pid, waste, quest in plan:
        waste = waste or rng.choice(list(WasteType)).value
        body = {
            "participant_id": pid,
            "waste_type": waste,
            "recorded_at": f"2021-05-10T{10 + minute // 60}:{minute % 60:02d}:00Z",
        }
        if quest:
            body["quest_id"] = quest
        run("post", f"/events/{eid}/bags", headers=tokens[pid], json=body)
        recorded += 1
        minute += 2
    # 4 weighed drop-offs at the smart bin
    for pid in ("p2", "p4", "p5", "p1"):
        claim = run("post", f"/events/{eid}/claims", headers=tokens[pid],
                    json={"participant_id": pid,
                          "waste_type": rng.choice(list(WasteType)).value})
        run("post", "/bins/bin1/scan", headers=org, json={
            "qr_payload": claim["qr_payload"],
            "weight_kg": round(rng.uniform(0.5, 5.0), 3),
            "timestamp": f"2021-05-10T{10 + minute // 60}:{minute % 60:02d}:00Z",
        })
        recorded += 1
        minute += 2
    assert recorded == 20

    export = client.get(f"/api/v1/events/{eid}/export.csv")
    assert export.status_code == 200
    bags, participations = parse_event_csv(export.content)
    assert len(bags) == 20

    summary = client.get(f"/api/v1/events/{eid}/summary").json()
    counts, _ = recount_summary(bags)
    assert summary["counts"] == counts
    assert summary["total_bags"] == 20
    assert summary["participant_count"] == 5

    assert len(participations) == 2
    assert all(p.started_at is not None for p in participations)

    elapsed = time.monotonic() - started
    assert elapsed < 10.0
    _announce(1, f"test-event replay, 20 bags, {elapsed:.2f}s")


# -- criterion 2: leaderboard oracle equivalence ---------------------------------


def _random_event(rng: random.Random):
    agg = new_event()
    agg = domain.advance_phase(agg, Phase.PREPARATION)
    quests = []
    for index in range(rng.randint(0, 3)):
        agg, quest = domain.create_quest(
            agg,
            f"quest {index}",
            rng.choice(list(WasteType)),
            target_count=rng.randint(1, 6),
            bonus_points=rng.choice((0, 25, 50)),
        )
        quests.append(quest.quest_id)
    participant_count = rng.randint(1, 50)
    for index in range(participant_count):
        agg, _ = domain.register_participant(agg, f"runner{index}", Mode.SOLO)
    pids = list(agg.participants)
    team_ids = []
    for index in range(rng.randint(0, 4)):
        free = [p for p in pids if agg.team_of(p) is None]
        if not free:
            break
        agg, team = domain.create_team(agg, rng.choice(free), f"team {index}")
        team_ids.append(team.team_id)
        for _ in range(rng.randint(0, 6)):
            free = [p for p in pids if agg.team_of(p) is None]
            if not free:
                break
            agg, _ = domain.join_team(agg, rng.choice(free), team.team_id)
    agg = domain.advance_phase(agg, Phase.ACTIVE)
    for pid in pids:
        for quest_id in quests:
            if rng.random() < 0.2:
                agg, _ = domain.start_quest(agg, pid, quest_id, at(10, 1))
    second = 120
    for _ in range(rng.randint(0, 200)):
        pid = rng.choice(pids)
        waste = rng.choice(list(WasteType))
        candidates = [
            q
            for q in agg.quests
            if q.target_type is waste and agg.has_started(pid, q.quest_id)
        ]
        quest_id = candidates[0].quest_id if candidates and rng.random() < 0.6 else None
        agg, _ = domain.record_bag(
            agg,
            pid,
            waste,
            Source.APP,
            at(10) + timedelta(seconds=second),
            quest_id=quest_id,
        )
        # repeat timestamps often to force last-scored ties
        second += rng.choice((0, 0, 7))
    return agg


def test_acceptance_2_leaderboard_oracle():
    started = time.monotonic()
    rng = random.Random(777)
    mismatches = 0
    for _ in range(200):
        agg = _random_event(rng)
        for scope, by_team in ((Scope.INDIVIDUAL, False), (Scope.TEAM, True)):
            board = [
                (e.subject_id, e.total_points, e.bag_count, e.last_scored_at)
                for e in leaderboard(agg, scope)
            ]
            if board != brute_force_leaderboard(agg, by_team):
                mismatches += 1
    assert mismatches == 0
    elapsed = time.monotonic() - started
    assert elapsed < 60.0
    _announce(2, f"leaderboard oracle, 200 events x 2 scopes, {elapsed:.1f}s")


# -- criterion 3: lifecycle property suite ----------------------------------------


def _aggregate_in(phase: Phase):
    """An aggregate advanced to ``phase`` carrying whatever prerequisites
    could legally be created along the way (quest, participants, claim)."""
    agg = new_event()
    for step in PHASE_ORDER[1:]:
        if agg.phase is phase:
            break
        agg = domain.advance_phase(agg, step)
        if step is Phase.PREPARATION:
            agg, _ = domain.create_quest(agg, "sweep", WasteType.PLASTIC, 5)
            agg, _ = domain.register_participant(agg, "anna", Mode.SOLO)
            agg, _ = domain.register_participant(agg, "ben", Mode.SOLO)
        if step is Phase.ACTIVE:
            agg, _ = domain.start_quest(agg, "p1", "q1", at(10, 1))
            agg, _ = domain.issue_bag_claim(agg, "p1", WasteType.PLASTIC)
    assert agg.phase is phase
    return agg


def test_acceptance_3_lifecycle_grid():
    grid = [
        (
            "add_polluted_area",
            {Phase.PREPARATION, Phase.ACTIVE},
            WrongPhase,
            lambda agg: domain.add_polluted_area(
                agg, GeoPoint(61.066, 28.096), 100, ""
            ),
        ),
        (
            "add_collection_point",
            {Phase.PREPARATION, Phase.ACTIVE},
            WrongPhase,
            lambda agg: domain.add_collection_point(agg, GeoPoint(61.064, 28.094)),
        ),
        (
            "create_quest",
            {Phase.PREPARATION, Phase.ACTIVE},
            WrongPhase,
            lambda agg: domain.create_quest(agg, "extra quest"),
        ),
        (
            "register_participant",
            {Phase.PREPARATION, Phase.ACTIVE},
            WrongPhase,
            lambda agg: domain.register_participant(agg, "zoe", Mode.SOLO),
        ),
        (
            "start_quest",
            {Phase.ACTIVE},
            WrongPhase,
            lambda agg: domain.start_quest(agg, "p2", "q1", at(10, 30)),
        ),
        (
            "record_bag",
            {Phase.ACTIVE},
            WrongPhase,
            lambda agg: domain.record_bag(
                agg, "p1", WasteType.MIXED, Source.APP, at(11)
            ),
        ),
        (
            "issue_bag_claim",
            {Phase.ACTIVE},
            WrongPhase,
            lambda agg: domain.issue_bag_claim(agg, "p2", WasteType.GLASS),
        ),
        (
            "redeem_bag_claim",
            {Phase.ACTIVE},
            EventNotActive,
            lambda agg: domain.redeem_bag_claim(agg, "b1", 1.0, at(11)),
        ),
    ]
    false_accepts = 0
    checks = 0
    for phase in PHASE_ORDER:
        agg = _aggregate_in(phase)
        for name, allowed, expected_error, command in grid:
            checks += 1
            if phase in allowed:
                command(agg)  # must not raise
            else:
                try:
                    command(agg)
                except expected_error:
                    pass
                except EcoQError as exc:  # pragma: no cover - diagnostic
                    raise AssertionError(
                        f"{name} in {phase.value}: wrong error {type(exc).__name__}"
                    ) from exc
                else:
                    false_accepts += 1
        # phase transition grid: only the immediate successor is legal
        successor = (
            PHASE_ORDER[PHASE_ORDER.index(phase) + 1]
            if phase is not Phase.COMPLETED
            else None
        )
        for target in PHASE_ORDER:
            checks += 1
            if target is successor:
                domain.advance_phase(agg, target)
            else:
                try:
                    domain.advance_phase(agg, target)
                except IllegalTransition:
                    pass
                else:
                    false_accepts += 1
    assert false_accepts == 0
    _announce(3, f"lifecycle grid, {checks} phase x command checks, 0 false accepts")


# -- criterion 4: QR round-trip and tamper fuzz -----------------------------------


def test_acceptance_4_qr_roundtrip_and_fuzz():
    rng = random.Random(4)
    printable = [c for c in string.printable if c not in "\r\n"]
    round_trips = 0
    for _ in range(1000):
        event_id = "".join(rng.choices(ID_ALPHABET, k=rng.randint(1, 12)))
        bag_id = "".join(rng.choices(ID_ALPHABET, k=rng.randint(1, 12)))
        waste = rng.choice(list(WasteType))
        claim = decode_bag_qr(encode_bag_qr(event_id, bag_id, waste))
        assert (claim.event_id, claim.bag_id, claim.waste_type) == (
            event_id,
            bag_id,
            waste,
        )
        round_trips += 1
    assert round_trips == 1000

    attempts = 0
    rejected = 0
    for _ in range(1000):
        payload = encode_bag_qr(
            "".join(rng.choices(ID_ALPHABET, k=rng.randint(1, 12))),
            "".join(rng.choices(ID_ALPHABET, k=rng.randint(1, 12))),
            rng.choice(list(WasteType)),
        )
        pos = rng.randrange(len(payload))
        char = rng.choice(printable)
        while char == payload[pos]:
            char = rng.choice(printable)
        mutated = payload[:pos] + char + payload[pos + 1 :]
        attempts += 1
        try:
            decode_bag_qr(mutated)
        except EcoQError:
            rejected += 1
    rate = rejected / attempts
    assert rate >= 0.996
    _announce(4, f"1000 round trips, tamper rejection {rate:.4f}")


# -- criterion 5: geo oracle equivalence ------------------------------------------


def test_acceptance_5_geo_oracle():
    assert haversine_distance(GeoPoint(0, 0), GeoPoint(0, 0)) == 0.0
    assert haversine_distance(GeoPoint(0, 0), GeoPoint(1, 0)) == pytest.approx(
        111.1949, abs=1e-3
    )
    assert haversine_distance(GeoPoint(0, 0), GeoPoint(0, 180)) == pytest.approx(
        20015.09, abs=0.01
    )

    rng = random.Random(5)
    events = []
    for index in range(10_000):
        start = at(rng.randint(6, 18), rng.randint(0, 59))
        events.append(
            EventRecord(
                event_id=f"e{index}",
                name="x",
                icon="leaf",
                start_time=start,
                end_time=start + timedelta(hours=rng.randint(1, 5)),
                area_center=GeoPoint(rng.uniform(-85, 85), rng.uniform(-179, 179)),
                area_radius_m=1000,
            )
        )
    origin = GeoPoint(61.0, 28.0)
    window = TimeWindow(at(9), at(12))
    radius_km = 3000.0
    got = find_events(events, origin, radius_km, window)

    def distance(ev):
        return haversine_reference(
            origin.lat, origin.lon, ev.area_center.lat, ev.area_center.lon
        )

    expected = [
        ev
        for ev in events
        if distance(ev) <= radius_km
        and ev.start_time <= window.end
        and window.start <= ev.end_time
    ]
    expected.sort(key=lambda ev: (distance(ev), ev.start_time, ev.event_id))
    assert [e.event_id for e in got] == [e.event_id for e in expected]
    for ev in got:
        assert distance(ev) <= radius_km
        assert ev.start_time <= window.end and window.start <= ev.end_time
    excluded = [ev for ev in events if ev not in set(got)]
    for ev in rng.sample(excluded, 200):
        assert (
            distance(ev) > radius_km
            or ev.start_time > window.end
            or window.start > ev.end_time
        )

    points = [
        GeoPoint(rng.uniform(-85, 85), rng.uniform(-179, 179)) for _ in range(10_000)
    ]
    full = sorted(
        points, key=lambda p: haversine_reference(origin.lat, origin.lon, p.lat, p.lon)
    )
    for k in (1, 7, 100, 9999):
        assert nearest_collection_points(points, origin, k) == full[:k]
    _announce(5, "geo oracle, 10000 events + 10000 points")


# -- criterion 6: bin conservation -------------------------------------------------


def _drop_simulation(seed: int):
    """100 drop attempts with invalid weights and tampered payloads mixed in."""
    rng = random.Random(seed)
    agg = new_event()
    agg = domain.advance_phase(agg, Phase.PREPARATION)
    for index in range(5):
        agg, _ = domain.register_participant(agg, f"runner{index}", Mode.SOLO)
    agg = domain.advance_phase(agg, Phase.ACTIVE)
    state = bins.new_bin("bin1", GeoPoint(61.065, 28.095))
    accepted: list[float] = []
    second = 0
    for _ in range(100):
        pid = f"p{rng.randint(1, 5)}"
        waste = rng.choice(list(WasteType))
        agg, claim = domain.issue_bag_claim(agg, pid, waste)
        payload = encode_bag_qr(agg.event_id, claim.bag_id, claim.waste_type)
        weight = round(rng.uniform(-0.5, 6.0), 3)
        if rng.random() < 0.1:
            pos = rng.randrange(len(payload))
            payload = payload[:pos] + chr(33 + rng.randrange(90)) + payload[pos + 1 :]
        second += 60
        now = at(10) + timedelta(seconds=second)
        try:
            result = bins.bin_scan_drop(state, payload, weight, now, lambda _e: agg)
        except EcoQError:
            pass
        else:
            state, agg = result.bin, result.aggregate
            accepted.append(weight)
        assert state.lid is bins.Lid.CLOSED
    return agg, state, accepted


def test_acceptance_6_bin_conservation():
    agg, state, accepted = _drop_simulation(66)
    assert 0 < len(accepted) < 100  # the mix really contains rejections
    total = 0.0
    for weight in accepted:
        total += weight
    assert state.cumulative_weight_kg == total  # exact, same fold order
    assert len(agg.bags) == len(accepted)
    assert all(bag.weight_kg is not None for bag in agg.bags)

    again_agg, again_state, again_accepted = _drop_simulation(66)
    assert again_accepted == accepted
    assert again_state == state
    assert export_aggregate_csv(again_agg) == export_aggregate_csv(agg)
    _announce(
        6,
        f"bin conservation, {len(accepted)} accepted of 100 drops, rerun identical",
    )


# -- criterion 7: persistence determinism -------------------------------------------


def test_acceptance_7_persistence_determinism(tmp_path):
    store = EventStore(tmp_path / "data")
    rng = random.Random(70)
    _, record = store.create(
        {
            "name": "Persisted cleanup",
            "icon": "recycle",
            "start_time": "2021-05-10T10:00:00Z",
            "end_time": "2021-05-10T14:00:00Z",
            "area_center": {"lat": 61.065, "lon": 28.095},
            "area_radius_m": 2000,
        },
        at(9),
    )
    eid = record.event_id
    store.execute(eid, "advance_phase", {"target": "preparation"}, at(9))
    store.execute(
        eid,
        "create_quest",
        {"title": "sweep", "target_type": "PLASTIC", "target_count": 4},
        at(9),
    )
    for index in range(6):
        store.execute(
            eid,
            "register_participant",
            {"display_name": f"runner{index}", "mode": "solo"},
            at(9),
        )
    store.execute(
        eid,
        "team_action",
        {"participant_id": "p1", "action": "create", "name": "crew"},
        at(9),
    )
    store.execute(eid, "advance_phase", {"target": "active"}, at(9))
    store.execute(
        eid,
        "start_quest",
        {"participant_id": "p2", "quest_id": "q1", "started_at": "2021-05-10T10:02:00Z"},
        at(10),
    )
    minute = 5
    for _ in range(60):
        pid = f"p{rng.randint(1, 6)}"
        waste = rng.choice(list(WasteType))
        payload = {
            "participant_id": pid,
            "waste_type": waste.value,
            "source": "app",
            "recorded_at": format_instant(at(10 + minute // 60, minute % 60)),
        }
        if pid == "p2" and waste is WasteType.PLASTIC:
            payload["quest_id"] = "q1"
        if rng.random() < 0.3:
            payload["weight_kg"] = round(rng.uniform(0.2, 5.0), 3)
        store.execute(eid, "record_bag", payload, at(11))
        minute += 3
    live = store.get(eid)

    first, _, _ = store.replay(eid)
    second, _, _ = store.replay(eid)
    assert first == live  # field-identical dataclass equality
    assert second == first

    fresh = EventStore(store.data_dir)
    assert fresh.get(eid) == live

    exported = export_aggregate_csv(live)
    bags, participations = parse_event_csv(exported)
    assert export_event_csv(bags, participations) == exported
    _announce(7, f"replayed {len(store.read_log(eid))} commands, exports stable")
