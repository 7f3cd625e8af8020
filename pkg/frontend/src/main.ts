/** Browser bootstrap: hash routing, token handling, and controllers.
 *
 * Routes: `#/` event browser · `#/new` organizer wizard · `#/e/<id>`
 * participant event page with the live leaderboard.
 */

import { ApiClient, ApiError } from "./api.js";
import { LeaderboardPoller } from "./leaderboard.js";
import type { BagClaim, EventView, WasteType } from "./types.js";
import {
  renderEventList,
  renderEventPage,
  renderLeaderboard,
  renderSummary,
} from "./views.js";
import {
  emptyWizard,
  renderWizard,
  submitWizard,
  WIZARD_STEPS,
  WizardState,
} from "./wizard.js";

const root = document.getElementById("app")!;
const store = window.localStorage;

function baseUrl(): string {
  return store.getItem("ecoq.apiBase") ?? "";
}

function organizerToken(): string {
  return store.getItem("ecoq.organizerToken") ?? "";
}

function participantFor(eventId: string): { id: string; token: string } | null {
  const raw = store.getItem(`ecoq.participant.${eventId}`);
  return raw ? JSON.parse(raw) : null;
}

function api(token?: string): ApiClient {
  return new ApiClient({ baseUrl: baseUrl(), token });
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return String(error);
}

// -- settings bar ----------------------------------------------------------------

function wireSettings(): void {
  const form = document.getElementById("settings") as HTMLFormElement;
  const base = form.querySelector<HTMLInputElement>("#set-base")!;
  const token = form.querySelector<HTMLInputElement>("#set-org")!;
  base.value = baseUrl();
  token.value = organizerToken();
  form.addEventListener("change", () => {
    store.setItem("ecoq.apiBase", base.value.trim());
    store.setItem("ecoq.organizerToken", token.value.trim());
  });
}

// -- event browser ------------------------------------------------------------------

async function showBrowser(): Promise<void> {
  root.innerHTML = `<p class="muted">Loading events…</p>`;
  try {
    const { events } = await api().listEvents();
    root.innerHTML = `
      <section>
        <header class="row">
          <h2>Events</h2>
          <a class="button" href="#/new">Organize an event</a>
        </header>
        ${renderEventList(events)}
      </section>`;
  } catch (error) {
    root.innerHTML = `<p class="error">Cannot reach the service: ${describe(error)}</p>`;
  }
}

// -- wizard -----------------------------------------------------------------------

function showWizard(): void {
  let state: WizardState = emptyWizard();
  let apiError: string | undefined;

  const read = (id: string): string =>
    (document.getElementById(id) as HTMLInputElement | null)?.value ?? "";

  const pull = (): void => {
    if (state.step === 0) state = { ...state, name: read("wz-name") };
    if (state.step === 1)
      state = {
        ...state,
        date: read("wz-date"),
        startTime: read("wz-start"),
        endTime: read("wz-end"),
      };
    if (state.step === 2)
      state = {
        ...state,
        lat: read("wz-lat"),
        lon: read("wz-lon"),
        radiusM: read("wz-radius"),
      };
  };

  const draw = (): void => {
    root.innerHTML = renderWizard(state, apiError);
  };

  root.onclick = async (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target) return;
    const action = target.dataset.action;
    pull();
    apiError = undefined;
    if (action === "pick-icon") {
      state = { ...state, icon: target.dataset.icon! };
    } else if (action === "wizard-back" && state.step > 0) {
      state = { ...state, step: state.step - 1 };
    } else if (action === "wizard-next" && state.step < WIZARD_STEPS.length - 1) {
      state = { ...state, step: state.step + 1 };
    } else if (action === "wizard-submit") {
      try {
        const record = await submitWizard(api(organizerToken()), state);
        window.location.hash = `#/e/${record.event_id}`;
        return;
      } catch (error) {
        apiError = describe(error);
      }
    }
    draw();
  };
  // live revalidation keeps Next/Create in sync while typing
  root.oninput = () => {
    pull();
    const scroll = window.scrollY;
    draw();
    window.scrollTo(0, scroll);
  };
  draw();
}

// -- event page ----------------------------------------------------------------------

async function showEventPage(eventId: string): Promise<void> {
  let view: EventView;
  try {
    view = await api().eventView(eventId);
  } catch (error) {
    root.innerHTML = `<p class="error">Event not found: ${describe(error)}</p>`;
    return;
  }

  let claim: BagClaim | null = null;
  let notice: string | null = null;
  let pageError: string | null = null;
  const names = new Map<string, string>();

  const poller = new LeaderboardPoller(api(), eventId, {
    render: (board, stale) => {
      const slot = document.getElementById("leaderboard-slot");
      if (slot) slot.innerHTML = renderLeaderboard(board, names, stale);
    },
  });

  const refreshNames = (current: EventView): void => {
    names.clear();
    for (const p of current.participants) names.set(p.participant_id, p.display_name);
    for (const t of current.teams) names.set(t.team_id, t.name);
  };

  const draw = (): void => {
    refreshNames(view);
    const me = participantFor(eventId);
    root.innerHTML = renderEventPage(view, {
      participantId: me?.id ?? null,
      claim,
      notice,
      error: pageError,
    });
    void poller.tick();
  };

  const reload = async (): Promise<void> => {
    view = await api().eventView(eventId);
    draw();
  };

  root.onclick = async (event) => {
    const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
    if (!target) return;
    const action = target.dataset.action!;
    if (action.startsWith("wizard")) return;
    event.preventDefault();
    const me = participantFor(eventId);
    const value = (id: string) =>
      (document.getElementById(id) as HTMLInputElement | null)?.value ?? "";
    notice = null;
    pageError = null;
    try {
      if (action === "register") {
        const registered = await api(value("reg-code")).register(
          eventId,
          value("reg-name"),
          value("reg-mode") === "team" ? "team" : "solo",
        );
        store.setItem(
          `ecoq.participant.${eventId}`,
          JSON.stringify({ id: registered.participant_id, token: registered.token }),
        );
        notice = `Registered as ${registered.display_name} (${registered.participant_id}).`;
        await reload();
        return;
      }
      if (!me) return;
      const client = api(me.token);
      if (action === "start-quest") {
        await client.startQuest(eventId, target.dataset.quest!, me.id);
        notice = "Quest started, good hunting.";
      } else if (action === "create-team") {
        await client.teamAction(eventId, {
          participant_id: me.id,
          action: "create",
          name: value("team-name"),
        });
      } else if (action === "join-team") {
        await client.teamAction(eventId, {
          participant_id: me.id,
          action: "join",
          team_id: value("team-pick"),
        });
      } else if (action === "record-bag") {
        const bag = await client.recordBag(eventId, {
          participant_id: me.id,
          waste_type: value("bag-waste") as WasteType,
          quest_id: value("bag-quest") || undefined,
        });
        notice = `Bag ${bag.bag_id} registered: +${bag.points} points.`;
      } else if (action === "issue-claim") {
        claim = await client.issueClaim(eventId, {
          participant_id: me.id,
          waste_type: value("bag-waste") as WasteType,
          quest_id: value("bag-quest") || undefined,
        });
      } else if (action === "scope-individual") {
        await poller.setScope("individual");
        return;
      } else if (action === "scope-team") {
        await poller.setScope("team");
        return;
      }
      await reload();
    } catch (error) {
      pageError = describe(error);
      draw();
    }
  };

  draw();
  await poller.start(view.event.phase === "active");
  const summarySlot = document.createElement("div");
  summarySlot.className = "summary-slot";
  root.firstElementChild?.appendChild(summarySlot);
  try {
    summarySlot.innerHTML =
      `<h3>Collected so far</h3>` + renderSummary(await api().eventSummary(eventId));
  } catch {
    // summary is decorative; ignore fetch hiccups
  }
}

// -- router -----------------------------------------------------------------------

let teardown: (() => void) | null = null;

async function route(): Promise<void> {
  teardown?.();
  teardown = null;
  root.onclick = null;
  root.oninput = null;
  const hash = window.location.hash || "#/";
  if (hash === "#/" || hash === "") {
    await showBrowser();
  } else if (hash === "#/new") {
    showWizard();
  } else if (hash.startsWith("#/e/")) {
    const eventId = decodeURIComponent(hash.slice(4));
    await showEventPage(eventId);
  } else {
    root.innerHTML = `<p class="error">Unknown page ${hash}</p>`;
  }
}

wireSettings();
window.addEventListener("hashchange", () => void route());
void route();
