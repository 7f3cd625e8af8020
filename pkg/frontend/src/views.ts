/** Pure HTML renderers.
 *
 * Every function here maps API responses (plus a little view context) to
 * a markup string and nothing else, so the whole visual layer is
 * snapshot-testable without a DOM. Controllers attach behavior through
 * `data-action` attributes.
 */

import type {
  BagClaim,
  EventRecord,
  EventSummary,
  EventView,
  Leaderboard,
  WasteType,
} from "./types.js";
import { ICONS, WASTE_TYPES } from "./types.js";
import { encodeQr, qrToSvg } from "./qr.js";

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const ICON_GLYPHS: Record<string, string> = {
  leaf: "🍃",
  tree: "🌳",
  recycle: "♻️",
  droplet: "💧",
  globe: "🌍",
  sun: "☀️",
  sprout: "🌱",
  bin: "🗑️",
};

export function iconGlyph(icon: string): string {
  return ICON_GLYPHS[icon] ?? "🍃";
}

export function formatInstant(iso: string): string {
  return iso.replace("T", " ").replace(/:\d\d(\.\d+)?Z$/, " UTC");
}

const PHASE_LABELS: Record<string, string> = {
  defined: "Defined",
  preparation: "Preparation",
  active: "Active",
  completed: "Completed",
};

export function phaseBadge(phase: string): string {
  return `<span class="badge phase-${phase}">${PHASE_LABELS[phase] ?? phase}</span>`;
}

// -- event browser ------------------------------------------------------------

export function renderEventList(events: EventRecord[]): string {
  if (events.length === 0) {
    return `<p class="muted">No events yet. Organizers can create one.</p>`;
  }
  const cards = events.map(
    (ev) => `
    <a class="card event-card" href="#/e/${encodeURIComponent(ev.event_id)}">
      <span class="event-icon">${iconGlyph(ev.icon)}</span>
      <span class="event-name">${escapeHtml(ev.name)}</span>
      ${phaseBadge(ev.phase)}
      <span class="muted">${formatInstant(ev.start_time)} → ${formatInstant(ev.end_time)}</span>
    </a>`,
  );
  return `<div class="event-list">${cards.join("")}</div>`;
}

// -- area map (schematic, tile-free) --------------------------------------------

export function renderAreaMap(event: EventRecord): string {
  // local equirectangular projection around the event center
  const radiusDeg = event.area_radius_m / 111_194.9;
  const pad = radiusDeg * 1.8 || 0.01;
  const toXY = (lat: number, lon: number) => {
    const x = 50 + ((lon - event.area_center.lon) / pad) * 45;
    const y = 50 - ((lat - event.area_center.lat) / pad) * 45;
    return { x: x.toFixed(2), y: y.toFixed(2) };
  };
  const areaR = ((radiusDeg / pad) * 45).toFixed(2);
  const spots = event.polluted_areas.map((area) => {
    const at = toXY(area.center.lat, area.center.lon);
    return `<circle cx="${at.x}" cy="${at.y}" r="3.4" class="map-polluted">` +
      `<title>${escapeHtml(area.note || area.area_id)}</title></circle>`;
  });
  const points = event.collection_points.map((point, index) => {
    const at = toXY(point.lat, point.lon);
    return `<rect x="${Number(at.x) - 2}" y="${Number(at.y) - 2}" width="4" height="4" ` +
      `class="map-collection"><title>collection point ${index + 1}</title></rect>`;
  });
  return `
  <svg viewBox="0 0 100 100" class="area-map" role="img" aria-label="event area map">
    <circle cx="50" cy="50" r="${areaR}" class="map-area"/>
    <circle cx="50" cy="50" r="1.6" class="map-center"/>
    ${spots.join("")}
    ${points.join("")}
  </svg>`;
}

// -- event page -----------------------------------------------------------------

export interface EventPageContext {
  participantId: string | null;
  claim: BagClaim | null;
  notice: string | null;
  error: string | null;
}

export function renderEventPage(view: EventView, ctx: EventPageContext): string {
  const ev = view.event;
  const me = ctx.participantId;
  const myTeam = me
    ? view.teams.find((t) => t.member_ids.includes(me)) ?? null
    : null;
  const started = new Set(
    view.participations
      .filter((p) => p.participant_id === me)
      .map((p) => p.quest_id),
  );
  const completed = new Set(
    view.participations
      .filter((p) => p.participant_id === me && p.completed_at !== null)
      .map((p) => p.quest_id),
  );

  const quests = view.quests.length
    ? view.quests
        .map((q) => {
          const target = q.target_count
            ? `${q.target_count} × ${q.target_type}`
            : "open goal";
          let action: string;
          if (!me) {
            action = `<span class="muted">register to start</span>`;
          } else if (completed.has(q.quest_id)) {
            action = `<span class="badge done">completed</span>`;
          } else if (started.has(q.quest_id)) {
            action = `<span class="badge started">started</span>`;
          } else {
            action =
              `<button data-action="start-quest" data-quest="${q.quest_id}" ` +
              `${ev.phase === "active" ? "" : "disabled "}>Start</button>`;
          }
          return `<li class="quest" data-quest-id="${q.quest_id}">
            <strong>${escapeHtml(q.title)}</strong>
            <span class="muted">${target}, +${q.bonus_points} bonus</span>
            ${action}
          </li>`;
        })
        .join("")
    : `<li class="muted">No quests yet.</li>`;

  const teamOptions = view.teams
    .map((t) => `<option value="${t.team_id}">${escapeHtml(t.name)}</option>`)
    .join("");
  const teamControls = !me
    ? `<p class="muted">Register to join a team.</p>`
    : myTeam
      ? `<p>You are in <strong>${escapeHtml(myTeam.name)}</strong>. ` +
        `<span class="muted">One team per event.</span></p>
         <button data-action="create-team" disabled>Create team</button>
         <button data-action="join-team" disabled>Join team</button>`
      : `<input id="team-name" placeholder="New team name">
         <button data-action="create-team">Create team</button>
         ${
           view.teams.length
             ? `<select id="team-pick">${teamOptions}</select>
                <button data-action="join-team">Join team</button>`
             : ""
         }`;

  const questOptions = view.quests
    .filter((q) => started.has(q.quest_id))
    .map((q) => `<option value="${q.quest_id}">${escapeHtml(q.title)}</option>`)
    .join("");
  const wasteOptions = WASTE_TYPES.map(
    (wt) => `<option value="${wt}">${wt}</option>`,
  ).join("");
  const bagForm = !me
    ? ""
    : `<form data-action="bag-form" class="bag-form">
        <label>Waste type
          <select id="bag-waste">${wasteOptions}</select>
        </label>
        <label>Quest
          <select id="bag-quest"><option value="">none</option>${questOptions}</select>
        </label>
        <button data-action="record-bag" ${ev.phase === "active" ? "" : "disabled"}>
          Register bag
        </button>
        <button data-action="issue-claim" ${ev.phase === "active" ? "" : "disabled"}>
          Bin drop-off QR
        </button>
      </form>`;

  const claimBlock = ctx.claim
    ? `<div class="claim card">
        <h4>Show this at the smart bin</h4>
        ${qrToSvg(encodeQr(ctx.claim.qr_payload))}
        <code class="payload">${escapeHtml(ctx.claim.qr_payload)}</code>
      </div>`
    : "";

  const registration = me
    ? ""
    : `<form data-action="register-form" class="card register">
        <h3>Join this event</h3>
        <input id="reg-name" placeholder="Display name">
        <select id="reg-mode">
          <option value="solo">solo</option>
          <option value="team">in a team</option>
        </select>
        <input id="reg-code" placeholder="Join code">
        <button data-action="register">Register</button>
      </form>`;

  return `
  <section class="event-page">
    <header>
      <h2>${iconGlyph(ev.icon)} ${escapeHtml(ev.name)} ${phaseBadge(ev.phase)}</h2>
      <p class="muted">${formatInstant(ev.start_time)} → ${formatInstant(ev.end_time)}
        · ${view.participants.length} participants · ${view.bag_count} bags</p>
    </header>
    ${ctx.error ? `<p class="error" role="alert">${escapeHtml(ctx.error)}</p>` : ""}
    ${ctx.notice ? `<p class="notice">${escapeHtml(ctx.notice)}</p>` : ""}
    ${registration}
    <div class="columns">
      <div>
        <h3>Quests</h3>
        <ul class="quests">${quests}</ul>
        <h3>Team</h3>
        <div class="team-controls">${teamControls}</div>
        <h3>Register a bag</h3>
        ${bagForm || `<p class="muted">Register above to record bags.</p>`}
        ${claimBlock}
      </div>
      <div>
        <h3>Area</h3>
        ${renderAreaMap(ev)}
        <p class="muted">${ev.polluted_areas.length} polluted areas marked,
          ${ev.collection_points.length} collection points</p>
        <h3>Leaderboard</h3>
        <div class="scope-switch">
          <button data-action="scope-individual">Individual</button>
          <button data-action="scope-team">Teams</button>
        </div>
        <div id="leaderboard-slot"></div>
      </div>
    </div>
  </section>`;
}

// -- leaderboard -------------------------------------------------------------------

export function renderLeaderboard(
  board: Leaderboard,
  names: Map<string, string>,
  stale: boolean,
): string {
  // Rows render in exactly the order the server sent; ranking and
  // tie-breaks are server business.
  const staleBanner = stale
    ? `<p class="stale" role="alert">Live updates interrupted; showing last known standings.</p>`
    : "";
  if (board.entries.length === 0) {
    return `${staleBanner}<p class="muted empty-board">No scores yet.</p>`;
  }
  const rows = board.entries
    .map(
      (entry, index) => `
      <tr data-subject="${escapeHtml(entry.subject_id)}">
        <td class="rank">${index + 1}</td>
        <td>${escapeHtml(names.get(entry.subject_id) ?? entry.subject_id)}</td>
        <td class="num">${entry.total_points}</td>
        <td class="num">${entry.bag_count}</td>
      </tr>`,
    )
    .join("");
  return `${staleBanner}
  <table class="leaderboard" data-scope="${board.scope}">
    <thead><tr><th>#</th><th>${board.scope === "team" ? "Team" : "Participant"}</th>
      <th>Points</th><th>Bags</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

// -- summary ---------------------------------------------------------------------

export function renderSummary(summary: EventSummary): string {
  const rows = (Object.keys(summary.counts) as WasteType[])
    .map(
      (wt) => `<tr><td>${wt}</td><td class="num">${summary.counts[wt]}</td>
        <td class="num">${summary.weights[wt].toFixed(3)} kg</td></tr>`,
    )
    .join("");
  return `
  <table class="summary">
    <thead><tr><th>Type</th><th>Bags</th><th>Weight</th></tr></thead>
    <tbody>${rows}</tbody>
    <tfoot><tr><td>total</td><td class="num">${summary.total_bags}</td><td></td></tr></tfoot>
  </table>
  <p class="muted">${summary.participant_count} participants,
    ${summary.quest_completions} quests completed.</p>`;
}

export { ICONS };
