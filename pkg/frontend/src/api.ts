/** Thin typed client over the HTTP API.
 *
 * Every mutation the UI performs goes through here; nothing is computed
 * client-side that the server already computes (scores, order, ids).
 */

import type {
  BagClaim,
  BagRecord,
  EventRecord,
  EventSummary,
  EventView,
  Leaderboard,
  Participation,
  RegisteredParticipant,
  Team,
  WasteType,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export interface ClientOptions {
  baseUrl?: string;
  token?: string;
  fetchImpl?: FetchLike;
}

export class ApiClient {
  baseUrl: string;
  token: string | undefined;
  private readonly fetchImpl: FetchLike;

  constructor(options: ClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.token = options.token;
    this.fetchImpl = options.fetchImpl ?? ((input, init) => fetch(input, init));
  }

  withToken(token: string | undefined): ApiClient {
    return new ApiClient({
      baseUrl: this.baseUrl,
      token,
      fetchImpl: this.fetchImpl,
    });
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = `http_${response.status}`;
      let detail = response.statusText;
      try {
        const parsed = await response.json();
        code = parsed.error ?? code;
        detail = parsed.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, detail);
    }
    return (await response.json()) as T;
  }

  // -- events ----------------------------------------------------------

  createEvent(body: {
    name: string;
    icon: string;
    start_time: string;
    end_time: string;
    area_center: { lat: number; lon: number };
    area_radius_m: number;
  }): Promise<EventRecord> {
    return this.request("POST", "/events", body);
  }

  advancePhase(eventId: string, target: string): Promise<EventRecord> {
    return this.request("POST", `/events/${eventId}/phase`, { target });
  }

  listEvents(query?: {
    lat: number;
    lon: number;
    radius_km: number;
    from?: string;
    to?: string;
  }): Promise<{ events: EventRecord[] }> {
    if (!query) return this.request("GET", "/events");
    const params = new URLSearchParams();
    params.set("lat", String(query.lat));
    params.set("lon", String(query.lon));
    params.set("radius_km", String(query.radius_km));
    if (query.from) params.set("from", query.from);
    if (query.to) params.set("to", query.to);
    return this.request("GET", `/events?${params.toString()}`);
  }

  eventView(eventId: string): Promise<EventView> {
    return this.request("GET", `/events/${eventId}`);
  }

  eventSummary(eventId: string): Promise<EventSummary> {
    return this.request("GET", `/events/${eventId}/summary`);
  }

  leaderboard(
    eventId: string,
    scope: "individual" | "team",
  ): Promise<Leaderboard> {
    return this.request(
      "GET",
      `/events/${eventId}/leaderboard?scope=${scope}`,
    );
  }

  addArea(
    eventId: string,
    body: { center: { lat: number; lon: number }; radius_m: number; note: string },
  ): Promise<unknown> {
    return this.request("POST", `/events/${eventId}/areas`, body);
  }

  createQuest(
    eventId: string,
    body: {
      title: string;
      target_type?: WasteType;
      target_count?: number;
      bonus_points?: number;
    },
  ): Promise<unknown> {
    return this.request("POST", `/events/${eventId}/quests`, body);
  }

  register(
    eventId: string,
    displayName: string,
    mode: "solo" | "team",
  ): Promise<RegisteredParticipant> {
    return this.request("POST", `/events/${eventId}/participants`, {
      display_name: displayName,
      mode,
    });
  }

  teamAction(
    eventId: string,
    body:
      | { participant_id: string; action: "create"; name: string }
      | { participant_id: string; action: "join"; team_id: string },
  ): Promise<Team> {
    return this.request("POST", `/events/${eventId}/teams`, body);
  }

  startQuest(
    eventId: string,
    questId: string,
    participantId: string,
  ): Promise<Participation> {
    return this.request("POST", `/events/${eventId}/quests/${questId}/start`, {
      participant_id: participantId,
      started_at: new Date().toISOString(),
    });
  }

  recordBag(
    eventId: string,
    body: {
      participant_id: string;
      waste_type: WasteType;
      quest_id?: string;
      weight_kg?: number;
    },
  ): Promise<BagRecord> {
    return this.request("POST", `/events/${eventId}/bags`, {
      ...body,
      recorded_at: new Date().toISOString(),
    });
  }

  issueClaim(
    eventId: string,
    body: { participant_id: string; waste_type: WasteType; quest_id?: string },
  ): Promise<BagClaim> {
    return this.request("POST", `/events/${eventId}/claims`, body);
  }

  exportUrl(eventId: string): string {
    return `${this.baseUrl}/api/v1/events/${eventId}/export.csv`;
  }
}
