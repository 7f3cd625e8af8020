"""Operator command line: run the service, seed data, simulate bins, export.

Every subcommand except ``serve`` is an API client. With ``--base-url``
it talks to a running service over HTTP; without it, it mounts the
service in-process on the configured data directory, so scripted setups
and exports need no server at all. Either way commands travel through the
same wire contract.

Seed files are JSON lines, one request per line::

    {"method": "POST", "path": "/api/v1/events", "body": {...}}

Blank lines and ``#`` comments are skipped. Requests run with the
organizer token.

Exit codes: 0 success, 1 runtime failure, 2 argument errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import random
import sys
from pathlib import Path
from typing import Any

import httpx

from ecoq.api import AppConfig, create_app
from ecoq.model import WasteType
from ecoq.wire import format_instant, parse_instant


class CommandFailed(Exception):
    """A subcommand hit a runtime error; message already user-readable."""


def _client(base_url: str | None, config: AppConfig) -> httpx.AsyncClient:
    if base_url:
        return httpx.AsyncClient(base_url=base_url.rstrip("/"), timeout=30.0)
    transport = httpx.ASGITransport(app=create_app(config))
    return httpx.AsyncClient(transport=transport, base_url="http://ecoq.local")


def _check(response: httpx.Response, context: str) -> Any:
    if response.status_code >= 400:
        raise CommandFailed(f"{context}: HTTP {response.status_code} {response.text}")
    if "json" in response.headers.get("content-type", ""):
        return response.json()
    return response.content


async def _run_seed(args: argparse.Namespace, config: AppConfig) -> int:
    path = Path(args.file)
    if not path.exists():
        raise CommandFailed(f"seed file not found: {path}")
    headers = {"Authorization": f"Bearer {config.organizer_token}"}
    executed = 0
    async with _client(args.base_url, config) as client:
        for line_no, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                command = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CommandFailed(f"{path}:{line_no}: bad JSON: {exc}") from exc
            method = command.get("method", "POST").upper()
            request_path = command["path"]
            response = await client.request(
                method, request_path, json=command.get("body"), headers=headers
            )
            _check(response, f"{path}:{line_no} {method} {request_path}")
            executed += 1
    print(f"seeded {executed} commands from {path}")
    return 0


async def _run_export(args: argparse.Namespace, config: AppConfig) -> int:
    async with _client(args.base_url, config) as client:
        response = await client.get(f"/api/v1/events/{args.event}/export.csv")
        data = _check(response, f"export {args.event}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    print(f"wrote {len(data)} bytes to {out}")
    return 0


async def _run_simulate_bins(args: argparse.Namespace, config: AppConfig) -> int:
    """Drive deterministic drop traffic against one event.

    Same (count, drops, seed) always produces the same claims, weights,
    timestamps, and therefore the same bag records.
    """
    rng = random.Random(args.seed)
    headers = {"Authorization": f"Bearer {config.organizer_token}"}
    async with _client(args.base_url, config) as client:
        response = await client.get(f"/api/v1/events/{args.event}")
        view = _check(response, f"fetch event {args.event}")
        participants = [p["participant_id"] for p in view["participants"]]
        if not participants:
            raise CommandFailed(
                f"event {args.event} has no participants; seed it first"
            )
        if view["event"]["phase"] != "active":
            raise CommandFailed(f"event {args.event} is not active")
        start = parse_instant(view["event"]["start_time"])
        end = parse_instant(view["event"]["end_time"])
        center = view["event"]["area_center"]

        bin_ids = []
        for index in range(args.count):
            bin_id = f"bin{index + 1}"
            location = {
                "lat": center["lat"] + rng.uniform(-0.003, 0.003),
                "lon": center["lon"] + rng.uniform(-0.003, 0.003),
            }
            response = await client.post(
                "/api/v1/bins",
                json={"bin_id": bin_id, "location": location},
                headers=headers,
            )
            _check(response, f"create {bin_id}")
            bin_ids.append(bin_id)

        total = args.count * args.drops
        window = end - start
        accepted = 0
        for index in range(total):
            participant = rng.choice(participants)
            waste = rng.choice(list(WasteType))
            weight = round(rng.uniform(0.2, 8.0), 3)
            bin_id = rng.choice(bin_ids)
            at = start + window * (index + 1) / (total + 1)
            at = at.replace(microsecond=0)
            response = await client.post(
                f"/api/v1/events/{args.event}/claims",
                json={"participant_id": participant, "waste_type": waste.value},
                headers=headers,
            )
            claim = _check(response, f"claim for drop {index + 1}")
            response = await client.post(
                f"/api/v1/bins/{bin_id}/scan",
                json={
                    "qr_payload": claim["qr_payload"],
                    "weight_kg": weight,
                    "timestamp": format_instant(at),
                },
                headers=headers,
            )
            _check(response, f"scan at {bin_id} for drop {index + 1}")
            accepted += 1
    print(
        f"simulated {accepted}/{total} drops across {args.count} bins "
        f"on event {args.event}"
    )
    return 0


def _run_serve(args: argparse.Namespace, config: AppConfig) -> int:
    import uvicorn

    addr = args.addr or config.addr
    host, _, port_text = addr.partition(":")
    try:
        port = int(port_text or "8000")
    except ValueError:
        raise CommandFailed(f"bad --addr {addr!r}; expected host:port") from None
    uvicorn.run(create_app(config), host=host or "127.0.0.1", port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecoq",
        description="Organize and run waste-collection events.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--addr", help="listen address host:port (env ECOQ_ADDR)")

    seed = sub.add_parser("seed", help="replay a scenario file through the API")
    seed.add_argument("--file", required=True, help="JSON-lines scenario file")
    seed.add_argument("--base-url", help="target a running service instead")

    sim = sub.add_parser(
        "simulate-bins", help="deterministic smart-bin drop traffic"
    )
    sim.add_argument("--count", type=int, required=True, help="number of bins")
    sim.add_argument("--drops", type=int, required=True, help="drops per bin")
    sim.add_argument("--seed", type=int, required=True, help="RNG seed")
    sim.add_argument("--event", default="e1", help="target event id (default e1)")
    sim.add_argument("--base-url", help="target a running service instead")

    export = sub.add_parser("export", help="write an event's CSV export")
    export.add_argument("--event", required=True, help="event id")
    export.add_argument("--out", required=True, help="output file path")
    export.add_argument("--base-url", help="target a running service instead")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = AppConfig.from_env()
    try:
        if args.command == "serve":
            return _run_serve(args, config)
        if args.command == "seed":
            return asyncio.run(_run_seed(args, config))
        if args.command == "simulate-bins":
            if args.count < 1 or args.drops < 1:
                parser.error("--count and --drops must be at least 1")
            return asyncio.run(_run_simulate_bins(args, config))
        if args.command == "export":
            return asyncio.run(_run_export(args, config))
        parser.error(f"unknown command {args.command!r}")
    except CommandFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: transport failure: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
