/** A fetch-level double of the HTTP service.
 *
 * Implements the documented contract for the endpoints the UI touches,
 * with server semantics (sequential ids, scoring table, leaderboard
 * order) reproduced in miniature, so flow tests exercise the real client
 * and views against believable responses.
 */

import type { FetchLike } from "../src/api.js";
import type {
  BagRecord,
  EventRecord,
  LeaderboardEntry,
  Participation,
  ParticipantInfo,
  Quest,
  Team,
  WasteType,
} from "../src/types.js";

const POINTS: Record<WasteType, number> = {
  MIXED: 10,
  PAPER: 10,
  PLASTIC: 15,
  GLASS: 15,
  METAL: 20,
  HAZARDOUS: 30,
};

interface EventState {
  record: EventRecord;
  quests: Quest[];
  teams: Team[];
  participants: ParticipantInfo[];
  participations: Participation[];
  bags: BagRecord[];
  bagSeq: number;
}

export class MockService {
  events = new Map<string, EventState>();
  requests: string[] = [];

  readonly fetchImpl: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : {};
    const path = url.replace(/^https?:\/\/[^/]+/, "").replace(/^\/api\/v1/, "");
    this.requests.push(`${method} ${path}`);
    try {
      return this.route(method, path, body);
    } catch (error) {
      const [status, code] = (error as Error).message.split(":", 2);
      return json(Number(status), { error: code, detail: String(error) });
    }
  };

  private route(method: string, path: string, body: any): Response {
    if (method === "POST" && path === "/events") {
      const eventId = `e${this.events.size + 1}`;
      const record: EventRecord = {
        event_id: eventId,
        name: body.name,
        icon: body.icon,
        start_time: body.start_time,
        end_time: body.end_time,
        area_center: body.area_center,
        area_radius_m: body.area_radius_m,
        phase: "defined",
        polluted_areas: [],
        collection_points: [],
      };
      if (!body.name) throw new Error("400:InvalidName");
      if (body.start_time >= body.end_time) throw new Error("400:InvalidSchedule");
      this.events.set(eventId, {
        record,
        quests: [],
        teams: [],
        participants: [],
        participations: [],
        bags: [],
        bagSeq: 0,
      });
      return json(201, record);
    }
    if (method === "GET" && path === "/events") {
      return json(200, {
        events: [...this.events.values()].map((s) => s.record),
      });
    }
    const match = path.match(/^\/events\/([^/]+)(\/.*)?$/);
    if (match) {
      const state = this.events.get(match[1]);
      if (!state) throw new Error("404:UnknownEvent");
      return this.eventRoute(method, match[2] ?? "", body, state);
    }
    throw new Error("404:NotFound");
  }

  private eventRoute(
    method: string,
    sub: string,
    body: any,
    state: EventState,
  ): Response {
    const eid = state.record.event_id;
    if (method === "GET" && sub === "") {
      return json(200, {
        event: state.record,
        quests: state.quests,
        teams: state.teams,
        participants: state.participants,
        participations: state.participations,
        bag_count: state.bags.length,
      });
    }
    if (method === "POST" && sub === "/phase") {
      const order = ["defined", "preparation", "active", "completed"];
      const current = order.indexOf(state.record.phase);
      if (order[current + 1] !== body.target) throw new Error("409:IllegalTransition");
      state.record = { ...state.record, phase: body.target };
      return json(200, state.record);
    }
    if (method === "POST" && sub === "/quests") {
      const quest: Quest = {
        quest_id: `q${state.quests.length + 1}`,
        event_id: eid,
        title: body.title,
        target_type: body.target_type ?? null,
        target_count: body.target_count ?? null,
        area: null,
        bonus_points: body.bonus_points ?? 50,
      };
      state.quests.push(quest);
      return json(201, quest);
    }
    if (method === "POST" && sub === "/participants") {
      if (state.participants.some((p) => p.display_name === body.display_name)) {
        throw new Error("409:DuplicateName");
      }
      const info: ParticipantInfo = {
        participant_id: `p${state.participants.length + 1}`,
        display_name: body.display_name,
        mode: body.mode,
      };
      state.participants.push(info);
      return json(201, { ...info, token: `p.${info.participant_id}.mock` });
    }
    if (method === "POST" && sub === "/teams") {
      if (body.action === "create") {
        if (state.teams.some((t) => t.name === body.name)) {
          throw new Error("409:DuplicateTeamName");
        }
        if (state.teams.some((t) => t.member_ids.includes(body.participant_id))) {
          throw new Error("409:AlreadyInTeam");
        }
        const team: Team = {
          team_id: `t${state.teams.length + 1}`,
          event_id: eid,
          name: body.name,
          member_ids: [body.participant_id],
        };
        state.teams.push(team);
        return json(201, team);
      }
      const team = state.teams.find((t) => t.team_id === body.team_id);
      if (!team) throw new Error("404:UnknownTeam");
      if (state.teams.some((t) => t.member_ids.includes(body.participant_id))) {
        throw new Error("409:AlreadyInTeam");
      }
      team.member_ids.push(body.participant_id);
      return json(201, team);
    }
    const start = sub.match(/^\/quests\/([^/]+)\/start$/);
    if (method === "POST" && start) {
      if (state.record.phase !== "active") throw new Error("409:WrongPhase");
      const part: Participation = {
        participant_id: body.participant_id,
        quest_id: start[1],
        started_at: body.started_at,
        completed_at: null,
      };
      state.participations.push(part);
      return json(201, part);
    }
    if (method === "POST" && sub === "/bags") {
      if (state.record.phase !== "active") throw new Error("409:WrongPhase");
      state.bagSeq += 1;
      const team = state.teams.find((t) => t.member_ids.includes(body.participant_id));
      const bag: BagRecord = {
        bag_id: `b${state.bagSeq}`,
        event_id: eid,
        participant_id: body.participant_id,
        quest_id: body.quest_id ?? null,
        team_id: team?.team_id ?? null,
        waste_type: body.waste_type,
        weight_kg: body.weight_kg ?? null,
        points: POINTS[body.waste_type as WasteType],
        recorded_at: body.recorded_at,
        source: "app",
      };
      state.bags.push(bag);
      return json(201, bag);
    }
    if (method === "POST" && sub === "/claims") {
      state.bagSeq += 1;
      const bagId = `b${state.bagSeq}`;
      return json(201, {
        bag_id: bagId,
        participant_id: body.participant_id,
        waste_type: body.waste_type,
        quest_id: body.quest_id ?? null,
        qr_payload: `ECOQ1|${eid}|${bagId}|${body.waste_type}|00000000`,
      });
    }
    if (method === "GET" && sub.startsWith("/leaderboard")) {
      const scope = sub.includes("scope=team") ? "team" : "individual";
      const totals = new Map<string, LeaderboardEntry>();
      if (scope === "individual") {
        for (const p of state.participants) {
          totals.set(p.participant_id, {
            subject_id: p.participant_id,
            total_points: 0,
            bag_count: 0,
            last_scored_at: null,
          });
        }
      } else {
        for (const t of state.teams) {
          totals.set(t.team_id, {
            subject_id: t.team_id,
            total_points: 0,
            bag_count: 0,
            last_scored_at: null,
          });
        }
      }
      for (const bag of state.bags) {
        const key = scope === "individual" ? bag.participant_id : bag.team_id;
        const entry = key ? totals.get(key) : undefined;
        if (!entry) continue;
        entry.total_points += bag.points;
        entry.bag_count += 1;
        if (!entry.last_scored_at || bag.recorded_at > entry.last_scored_at) {
          entry.last_scored_at = bag.recorded_at;
        }
      }
      const entries = [...totals.values()].sort((a, b) => {
        if (a.total_points !== b.total_points) return b.total_points - a.total_points;
        const ta = a.last_scored_at ?? "9999";
        const tb = b.last_scored_at ?? "9999";
        if (ta !== tb) return ta < tb ? -1 : 1;
        return a.subject_id < b.subject_id ? -1 : 1;
      });
      return json(200, { scope, entries });
    }
    if (method === "GET" && sub === "/summary") {
      const counts: Record<string, number> = {
        MIXED: 0, PAPER: 0, PLASTIC: 0, GLASS: 0, METAL: 0, HAZARDOUS: 0,
      };
      const weights: Record<string, number> = { ...counts };
      for (const bag of state.bags) {
        counts[bag.waste_type] += 1;
        if (bag.weight_kg) weights[bag.waste_type] += bag.weight_kg;
      }
      return json(200, {
        counts,
        weights,
        participant_count: state.participants.length,
        quest_completions: state.participations.filter((p) => p.completed_at).length,
        total_bags: state.bags.length,
      });
    }
    throw new Error("404:NotFound");
  }
}

function json(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "content-type": "application/json" },
  });
}
