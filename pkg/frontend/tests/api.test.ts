import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Captured {
  url: string;
  method: string;
  headers: Record<string, string>;
  body: unknown;
}

function capture(status = 200, payload: unknown = {}) {
  const calls: Captured[] = [];
  const fetchImpl = async (url: string, init?: RequestInit) => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      headers: (init?.headers as Record<string, string>) ?? {},
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { calls, fetchImpl };
}

describe("api client", () => {
  it("targets the versioned prefix and sends the bearer token", async () => {
    const { calls, fetchImpl } = capture(200, { events: [] });
    const client = new ApiClient({ baseUrl: "http://api", token: "tok", fetchImpl });
    await client.listEvents();
    expect(calls[0].url).toBe("http://api/api/v1/events");
    expect(calls[0].headers["Authorization"]).toBe("Bearer tok");
  });

  it("posts domain-shaped bodies", async () => {
    const { calls, fetchImpl } = capture(201, {});
    const client = new ApiClient({ fetchImpl, token: "t" });
    await client.createEvent({
      name: "Campus cleanup",
      icon: "leaf",
      start_time: "2021-05-10T10:00:00Z",
      end_time: "2021-05-10T14:00:00Z",
      area_center: { lat: 61.065, lon: 28.095 },
      area_radius_m: 2000,
    });
    expect(calls[0].method).toBe("POST");
    expect(calls[0].body).toMatchObject({ name: "Campus cleanup", icon: "leaf" });
  });

  it("stamps a client timestamp on bags", async () => {
    const { calls, fetchImpl } = capture(201, {});
    const client = new ApiClient({ fetchImpl, token: "t" });
    await client.recordBag("e1", { participant_id: "p1", waste_type: "PLASTIC" });
    const body = calls[0].body as { recorded_at: string };
    expect(body.recorded_at).toMatch(/^\d{4}-\d{2}-\d{2}T/);
  });

  it("surfaces the server's error code and detail", async () => {
    const { fetchImpl } = capture(409, {
      error: "WrongPhase",
      detail: "cannot record a bag in phase defined",
    });
    const client = new ApiClient({ fetchImpl });
    const failure = await client
      .eventSummary("e1")
      .then(() => null)
      .catch((e: ApiError) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure!.status).toBe(409);
    expect(failure!.code).toBe("WrongPhase");
    expect(failure!.message).toContain("defined");
  });

  it("keeps the status text when the error body is not json", async () => {
    const fetchImpl = async () =>
      new Response("boom", { status: 500, statusText: "Internal Server Error" });
    const client = new ApiClient({ fetchImpl });
    const failure = await client.eventView("e1").catch((e: ApiError) => e);
    expect(failure.code).toBe("http_500");
  });

  it("builds the geo search query", async () => {
    const { calls, fetchImpl } = capture(200, { events: [] });
    const client = new ApiClient({ fetchImpl });
    await client.listEvents({
      lat: 61,
      lon: 28,
      radius_km: 5,
      from: "2021-05-10T09:00:00Z",
    });
    expect(calls[0].url).toContain("lat=61");
    expect(calls[0].url).toContain("radius_km=5");
    expect(calls[0].url).toContain("from=2021-05-10T09%3A00%3A00Z");
  });
});
