"""HTTP facade over the domain: events, scoring, bins, export.

Every mutation goes through the command store, so nothing bypasses domain
validation, and time always comes from the request body or the injected
clock; handlers never read the wall clock directly. Domain errors map to
statuses through one table: validation 400, conflicts 409, missing
entities 404, auth 401/403, storage faults 500.

Auth is deliberately minimal (pre-shared tokens, no accounts):

* the organizer token comes from ``ECOQ_ORGANIZER_TOKEN``;
* participants get self-describing tokens ``p.<id>.<mac>`` minted at
  registration from ``ECOQ_PARTICIPANT_TOKEN_SEED``; registering requires
  the organizer token or the seed itself, acting as the event join code;
* bins get ``b.<id>.<mac>`` tokens minted from the same seed when created.

The organizer token authorizes everything; participant and bin tokens
only cover their own subject. Reads are open.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from ecoq import bins as binsim
from ecoq import scoring, wire
from ecoq.errors import (
    AuthError,
    ConflictError,
    EcoQError,
    Forbidden,
    MalformedBody,
    NotFoundError,
    StorageError,
    Unauthorized,
    ValidationError,
)
from ecoq.geo import TimeWindow, find_events
from ecoq.model import GeoPoint
from ecoq.storage import EventStore, export_aggregate_csv
from ecoq.verification import encode_bag_qr

API_PREFIX = "/api/v1"

#: Family-level status mapping; concrete errors resolve through their MRO,
#: so every error class lands on exactly one status.
ERROR_STATUS: dict[type[EcoQError], int] = {
    ValidationError: 400,
    AuthError: 401,
    Unauthorized: 401,
    Forbidden: 403,
    NotFoundError: 404,
    ConflictError: 409,
    StorageError: 500,
}


def http_status(exc: EcoQError) -> int:
    for klass in type(exc).__mro__:
        if klass in ERROR_STATUS:
            return ERROR_STATUS[klass]  # type: ignore[index]
    return 500


class Role(str, Enum):
    ORGANIZER = "organizer"
    PARTICIPANT = "participant"
    BIN = "bin"


@dataclass(frozen=True)
class ApiToken:
    """A validated bearer token: who is calling and as what."""

    role: Role
    subject: str | None = None


@dataclass(frozen=True)
class AppConfig:
    """Service configuration, normally read from the environment."""

    data_dir: Path
    organizer_token: str = "organizer-dev-token"
    participant_seed: str = "ecoq-dev-seed"
    fill_alert_threshold: float = binsim.DEFAULT_ALERT_THRESHOLD
    addr: str = "127.0.0.1:8000"

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "AppConfig":
        env = dict(os.environ if env is None else env)
        return cls(
            data_dir=Path(env.get("ECOQ_DATA_DIR", "./data")),
            organizer_token=env.get("ECOQ_ORGANIZER_TOKEN", cls.organizer_token),
            participant_seed=env.get(
                "ECOQ_PARTICIPANT_TOKEN_SEED", cls.participant_seed
            ),
            fill_alert_threshold=float(
                env.get("ECOQ_FILL_ALERT_THRESHOLD", binsim.DEFAULT_ALERT_THRESHOLD)
            ),
            addr=env.get("ECOQ_ADDR", cls.addr),
        )


def _mac(seed: str, subject: str) -> str:
    digest = hmac.new(seed.encode(), subject.encode(), hashlib.sha256).hexdigest()
    return digest[:16]


def mint_participant_token(seed: str, participant_id: str) -> str:
    return f"p.{participant_id}.{_mac(seed, 'participant:' + participant_id)}"


def mint_bin_token(seed: str, bin_id: str) -> str:
    return f"b.{bin_id}.{_mac(seed, 'bin:' + bin_id)}"


def authorize(token: str | None, config: AppConfig) -> ApiToken:
    """Resolve a bearer token to a role, or refuse it."""
    if not token:
        raise Unauthorized("missing bearer token")
    if hmac.compare_digest(token, config.organizer_token):
        return ApiToken(Role.ORGANIZER)
    parts = token.split(".")
    if len(parts) == 3 and parts[0] in ("p", "b"):
        kind, subject, mac = parts
        label = "participant:" if kind == "p" else "bin:"
        if hmac.compare_digest(mac, _mac(config.participant_seed, label + subject)):
            role = Role.PARTICIPANT if kind == "p" else Role.BIN
            return ApiToken(role, subject)
    raise Unauthorized("unrecognized token")


def _bearer(request: Request) -> str | None:
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip()
    return header or None


async def _json_body(request: Request) -> dict[str, Any]:
    raw = await request.body()
    if not raw:
        raise MalformedBody("request body must be a JSON object")
    try:
        body = json.loads(raw)
    except json.JSONDecodeError:
        raise MalformedBody("request body is not valid JSON") from None
    if not isinstance(body, dict):
        raise MalformedBody("request body must be a JSON object")
    return body


def _need(body: dict[str, Any], key: str) -> Any:
    if key not in body or body[key] is None:
        raise MalformedBody(f"missing field {key!r}")
    return body[key]


def bin_state_dict(state: binsim.BinState) -> dict[str, Any]:
    return {
        "bin_id": state.bin_id,
        "location": wire.geo_point_dict(state.location),
        "fill_percent": state.fill_percent,
        "cumulative_weight_kg": state.cumulative_weight_kg,
        "lid": state.lid.value,
        "last_seen": wire.format_instant(state.last_seen) if state.last_seen else None,
    }


def create_app(
    config: AppConfig,
    clock: Callable[[], datetime] | None = None,
) -> FastAPI:
    """Build the service around one data directory and one clock."""
    store = EventStore(config.data_dir)
    registry = binsim.BinRegistry()
    now = clock or (lambda: datetime.now(timezone.utc))

    app = FastAPI(title="ecoq", openapi_url=None)
    app.state.store = store
    app.state.bins = registry
    app.state.config = config

    @app.exception_handler(EcoQError)
    async def _domain_error(_request: Request, exc: EcoQError) -> JSONResponse:
        return JSONResponse(
            status_code=http_status(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    # -- auth helpers -----------------------------------------------------

    def require_organizer(request: Request) -> ApiToken:
        token = authorize(_bearer(request), config)
        if token.role is not Role.ORGANIZER:
            raise Forbidden(f"{token.role.value} tokens cannot perform this action")
        return token

    def require_join_auth(request: Request) -> None:
        # Registration bootstrap: organizer token or the raw seed (join code).
        raw = _bearer(request)
        if raw and hmac.compare_digest(raw, config.participant_seed):
            return
        require_organizer(request)

    def require_self_or_organizer(request: Request, participant_id: str) -> ApiToken:
        token = authorize(_bearer(request), config)
        if token.role is Role.ORGANIZER:
            return token
        if token.role is Role.PARTICIPANT and token.subject == participant_id:
            return token
        raise Forbidden(f"token does not cover participant {participant_id!r}")

    def require_bin_or_organizer(request: Request, bin_id: str) -> ApiToken:
        token = authorize(_bearer(request), config)
        if token.role is Role.ORGANIZER:
            return token
        if token.role is Role.BIN and token.subject == bin_id:
            return token
        raise Forbidden(f"token does not cover bin {bin_id!r}")

    def body_time(body: dict[str, Any], key: str) -> datetime:
        value = body.get(key)
        return wire.parse_instant(value) if value is not None else now()

    # -- event lifecycle ----------------------------------------------------

    @app.post(API_PREFIX + "/events", status_code=201)
    async def post_event(request: Request) -> dict[str, Any]:
        require_organizer(request)
        body = await _json_body(request)
        _, record = store.create(
            {
                "name": _need(body, "name"),
                "icon": _need(body, "icon"),
                "start_time": _need(body, "start_time"),
                "end_time": _need(body, "end_time"),
                "area_center": _need(body, "area_center"),
                "area_radius_m": _need(body, "area_radius_m"),
            },
            applied_at=now(),
        )
        return wire.event_record_dict(record)

    @app.post(API_PREFIX + "/events/{event_id}/phase")
    async def post_phase(event_id: str, request: Request) -> dict[str, Any]:
        require_organizer(request)
        body = await _json_body(request)
        _, record = store.execute(
            event_id, "advance_phase", {"target": _need(body, "target")}, now()
        )
        return wire.event_record_dict(record)

    @app.post(API_PREFIX + "/events/{event_id}/areas", status_code=201)
    async def post_area(event_id: str, request: Request) -> dict[str, Any]:
        require_organizer(request)
        body = await _json_body(request)
        _, area = store.execute(
            event_id,
            "add_polluted_area",
            {
                "center": _need(body, "center"),
                "radius_m": _need(body, "radius_m"),
                "note": body.get("note", ""),
            },
            now(),
        )
        return wire.polluted_area_dict(area)

    @app.post(API_PREFIX + "/events/{event_id}/collection-points", status_code=201)
    async def post_collection_point(event_id: str, request: Request) -> dict[str, Any]:
        require_organizer(request)
        body = await _json_body(request)
        _, record = store.execute(
            event_id,
            "add_collection_point",
            {"point": _need(body, "point")},
            now(),
        )
        return wire.event_record_dict(record)

    @app.post(API_PREFIX + "/events/{event_id}/quests", status_code=201)
    async def post_quest(event_id: str, request: Request) -> dict[str, Any]:
        require_organizer(request)
        body = await _json_body(request)
        _, quest = store.execute(
            event_id,
            "create_quest",
            {
                "title": _need(body, "title"),
                "target_type": body.get("target_type"),
                "target_count": body.get("target_count"),
                "area": body.get("area"),
                "bonus_points": body.get("bonus_points"),
            },
            now(),
        )
        return wire.quest_dict(quest)

    @app.post(API_PREFIX + "/events/{event_id}/participants", status_code=201)
    async def post_participant(event_id: str, request: Request) -> dict[str, Any]:
        require_join_auth(request)
        body = await _json_body(request)
        _, info = store.execute(
            event_id,
            "register_participant",
            {
                "display_name": _need(body, "display_name"),
                "mode": _need(body, "mode"),
            },
            now(),
        )
        out = wire.participant_dict(info)
        out["token"] = mint_participant_token(
            config.participant_seed, info.participant_id
        )
        return out

    @app.post(API_PREFIX + "/events/{event_id}/teams", status_code=201)
    async def post_team(event_id: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request)
        participant_id = _need(body, "participant_id")
        require_self_or_organizer(request, participant_id)
        payload = {
            "participant_id": participant_id,
            "action": _need(body, "action"),
        }
        if "name" in body:
            payload["name"] = body["name"]
        if "team_id" in body:
            payload["team_id"] = body["team_id"]
        _, team = store.execute(event_id, "team_action", payload, now())
        return wire.team_dict(team)

    @app.post(API_PREFIX + "/events/{event_id}/quests/{quest_id}/start", status_code=201)
    async def post_start_quest(
        event_id: str, quest_id: str, request: Request
    ) -> dict[str, Any]:
        body = await _json_body(request)
        participant_id = _need(body, "participant_id")
        require_self_or_organizer(request, participant_id)
        _, part = store.execute(
            event_id,
            "start_quest",
            {
                "participant_id": participant_id,
                "quest_id": quest_id,
                "started_at": wire.format_instant(body_time(body, "started_at")),
            },
            now(),
        )
        return wire.participation_dict(part)

    @app.post(API_PREFIX + "/events/{event_id}/bags", status_code=201)
    async def post_bag(event_id: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request)
        participant_id = _need(body, "participant_id")
        require_self_or_organizer(request, participant_id)
        payload = {
            "participant_id": participant_id,
            "waste_type": _need(body, "waste_type"),
            "source": body.get("source", "app"),
            "quest_id": body.get("quest_id"),
            "weight_kg": body.get("weight_kg"),
            "recorded_at": wire.format_instant(body_time(body, "recorded_at")),
        }
        _, bag = store.execute(event_id, "record_bag", payload, now())
        return wire.bag_dict(bag)

    @app.post(API_PREFIX + "/events/{event_id}/claims", status_code=201)
    async def post_claim(event_id: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request)
        participant_id = _need(body, "participant_id")
        require_self_or_organizer(request, participant_id)
        _, claim = store.execute(
            event_id,
            "issue_bag_claim",
            {
                "participant_id": participant_id,
                "waste_type": _need(body, "waste_type"),
                "quest_id": body.get("quest_id"),
            },
            now(),
        )
        payload_text = encode_bag_qr(event_id, claim.bag_id, claim.waste_type)
        return {
            "bag_id": claim.bag_id,
            "participant_id": claim.participant_id,
            "waste_type": claim.waste_type.value,
            "quest_id": claim.quest_id,
            "qr_payload": payload_text,
        }

    # -- event reads --------------------------------------------------------

    @app.get(API_PREFIX + "/events")
    async def get_events(request: Request) -> dict[str, Any]:
        params = request.query_params
        records = [agg.record for agg in store.all_aggregates()]
        if not any(k in params for k in ("lat", "lon", "radius_km", "from", "to")):
            records.sort(key=lambda r: (r.start_time, r.event_id))
            return {"events": [wire.event_record_dict(r) for r in records]}
        for key in ("lat", "lon", "radius_km"):
            if key not in params:
                raise MalformedBody(f"missing query parameter {key!r}")
        try:
            center = GeoPoint(float(params["lat"]), float(params["lon"]))
            radius_km = float(params["radius_km"])
        except ValueError:
            raise MalformedBody("lat, lon and radius_km must be numbers") from None
        window = TimeWindow(
            start=(
                wire.parse_instant(params["from"])
                if "from" in params
                else datetime.min.replace(tzinfo=timezone.utc)
            ),
            end=(
                wire.parse_instant(params["to"])
                if "to" in params
                else datetime.max.replace(tzinfo=timezone.utc)
            ),
        )
        hits = find_events(records, center, radius_km, window)
        return {"events": [wire.event_record_dict(r) for r in hits]}

    @app.get(API_PREFIX + "/events/{event_id}")
    async def get_event(event_id: str) -> dict[str, Any]:
        return wire.aggregate_view(store.get(event_id))

    @app.get(API_PREFIX + "/events/{event_id}/summary")
    async def get_summary(event_id: str) -> dict[str, Any]:
        from ecoq.domain import event_summary

        return wire.summary_dict(event_summary(store.get(event_id)))

    @app.get(API_PREFIX + "/events/{event_id}/leaderboard")
    async def get_leaderboard(event_id: str, request: Request) -> dict[str, Any]:
        label = request.query_params.get("scope", "individual")
        try:
            scope = scoring.Scope(label.lower())
        except ValueError:
            raise MalformedBody(f"unknown scope {label!r}") from None
        entries = scoring.leaderboard(store.get(event_id), scope)
        return {
            "scope": scope.value,
            "entries": [wire.leaderboard_entry_dict(e) for e in entries],
        }

    @app.get(API_PREFIX + "/events/{event_id}/export.csv")
    async def get_export(event_id: str) -> Response:
        data = export_aggregate_csv(store.get(event_id))
        return Response(content=data, media_type="text/csv; charset=utf-8")

    # -- bins ---------------------------------------------------------------

    @app.post(API_PREFIX + "/bins", status_code=201)
    async def post_bin(request: Request) -> dict[str, Any]:
        require_organizer(request)
        body = await _json_body(request)
        location = wire.parse_geo_point(_need(body, "location"))
        state = registry.register(str(_need(body, "bin_id")), location)
        out = bin_state_dict(state)
        out["token"] = mint_bin_token(config.participant_seed, state.bin_id)
        return out

    @app.get(API_PREFIX + "/bins")
    async def get_bins() -> dict[str, Any]:
        states = sorted(registry.all_bins(), key=lambda s: s.bin_id)
        return {"bins": [bin_state_dict(s) for s in states]}

    @app.post(API_PREFIX + "/bins/{bin_id}/telemetry")
    async def post_telemetry(bin_id: str, request: Request) -> dict[str, Any]:
        require_bin_or_organizer(request, bin_id)
        raw = (await request.body()).decode("utf-8")
        lines = [line for line in raw.splitlines() if line.strip()]
        if not lines:
            raise MalformedBody("telemetry body must hold at least one reading line")
        state = registry.get(bin_id)
        for line in lines:
            reading = binsim.parse_telemetry_line(line)
            if reading.bin_id != bin_id:
                raise MalformedBody(
                    f"reading for {reading.bin_id!r} posted to bin {bin_id!r}"
                )
            state = registry.ingest(bin_id, reading)
        return bin_state_dict(state)

    @app.post(API_PREFIX + "/bins/{bin_id}/scan", status_code=201)
    async def post_scan(bin_id: str, request: Request) -> dict[str, Any]:
        require_bin_or_organizer(request, bin_id)
        body = await _json_body(request)
        registry.get(bin_id)
        claim = binsim.decode_claim(str(_need(body, "qr_payload")))
        weight = float(_need(body, "weight_kg"))
        at = body_time(body, "timestamp")
        _, bag = store.execute(
            claim.event_id,
            "bin_drop",
            {
                "bag_id": claim.bag_id,
                "waste_type": claim.waste_type.value,
                "weight_kg": weight,
                "recorded_at": wire.format_instant(at),
                "bin_id": bin_id,
            },
            now(),
        )
        state = registry.record_drop(bin_id, weight, at)
        return {"bin": bin_state_dict(state), "bag": wire.bag_dict(bag)}

    @app.get(API_PREFIX + "/bins/alerts")
    async def get_alerts(request: Request) -> dict[str, Any]:
        raw = request.query_params.get("threshold")
        try:
            threshold = float(raw) if raw is not None else config.fill_alert_threshold
        except ValueError:
            raise MalformedBody(f"threshold must be a number, got {raw!r}") from None
        ids = binsim.fill_alerts(registry.all_bins(), threshold)
        return {"threshold": threshold, "bin_ids": ids}

    return app


def create_app_from_env() -> FastAPI:
    return create_app(AppConfig.from_env())
