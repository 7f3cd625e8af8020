/** Organizer event-creation wizard: collect name, icon, date, time, and
 * area over four steps, validating inline with the same rules the API
 * enforces, then submit one create request.
 */

import type { ApiClient } from "./api.js";
import type { EventRecord } from "./types.js";
import { ICONS } from "./types.js";
import { escapeHtml, iconGlyph } from "./views.js";

export interface WizardState {
  step: number; // 0 basics, 1 schedule, 2 area, 3 review
  name: string;
  icon: string;
  date: string; // YYYY-MM-DD
  startTime: string; // HH:MM
  endTime: string; // HH:MM
  lat: string;
  lon: string;
  radiusM: string;
}

export const WIZARD_STEPS = ["Basics", "Schedule", "Area", "Review"] as const;

export function emptyWizard(): WizardState {
  return {
    step: 0,
    name: "",
    icon: "leaf",
    date: "",
    startTime: "",
    endTime: "",
    lat: "",
    lon: "",
    radiusM: "1000",
  };
}

export type WizardErrors = Partial<
  Record<"name" | "icon" | "schedule" | "area", string>
>;

/** Mirrors the API's InvalidName / InvalidIcon / InvalidSchedule /
 * InvalidGeo validations so users see problems before submitting. */
export function validateWizard(state: WizardState): WizardErrors {
  const errors: WizardErrors = {};
  if (state.name.length === 0) {
    errors.name = "Name must not be empty.";
  } else if (state.name.length > 120) {
    errors.name = "Name must be at most 120 characters.";
  }
  if (!(ICONS as readonly string[]).includes(state.icon)) {
    errors.icon = "Pick an icon from the set.";
  }
  if (!state.date || !state.startTime || !state.endTime) {
    errors.schedule = "Date, start time, and end time are required.";
  } else if (state.endTime <= state.startTime) {
    errors.schedule = "The event must end after it starts.";
  }
  const lat = Number(state.lat);
  const lon = Number(state.lon);
  const radius = Number(state.radiusM);
  if (state.lat === "" || state.lon === "" || Number.isNaN(lat) || Number.isNaN(lon)) {
    errors.area = "Pick a center point on the map.";
  } else if (lat < -90 || lat > 90 || lon < -180 || lon > 180) {
    errors.area = "Coordinates out of range.";
  } else if (Number.isNaN(radius) || radius <= 0) {
    errors.area = "Radius must be a positive number of meters.";
  }
  return errors;
}

const STEP_FIELDS: Array<Array<keyof WizardErrors>> = [
  ["name", "icon"],
  ["schedule"],
  ["area"],
  [],
];

export function stepErrors(state: WizardState, step: number): WizardErrors {
  const all = validateWizard(state);
  const out: WizardErrors = {};
  for (const key of STEP_FIELDS[step]) {
    if (all[key]) out[key] = all[key];
  }
  return out;
}

export function canSubmit(state: WizardState): boolean {
  return Object.keys(validateWizard(state)).length === 0;
}

export function toCreateBody(state: WizardState) {
  return {
    name: state.name,
    icon: state.icon,
    start_time: `${state.date}T${state.startTime}:00Z`,
    end_time: `${state.date}T${state.endTime}:00Z`,
    area_center: { lat: Number(state.lat), lon: Number(state.lon) },
    area_radius_m: Number(state.radiusM),
  };
}

export async function submitWizard(
  api: ApiClient,
  state: WizardState,
): Promise<EventRecord> {
  return api.createEvent(toCreateBody(state));
}

// -- rendering -------------------------------------------------------------------

export function renderWizard(state: WizardState, apiError?: string): string {
  const errors = stepErrors(state, state.step);
  const crumbs = WIZARD_STEPS.map(
    (label, index) =>
      `<span class="crumb ${index === state.step ? "current" : ""}">${label}</span>`,
  ).join(" › ");

  let body = "";
  if (state.step === 0) {
    const icons = (ICONS as readonly string[])
      .map(
        (icon) =>
          `<button type="button" data-action="pick-icon" data-icon="${icon}"
            class="icon-pick ${state.icon === icon ? "picked" : ""}"
            aria-label="${icon}">${iconGlyph(icon)}</button>`,
      )
      .join("");
    body = `
      <label>Event name
        <input id="wz-name" maxlength="140" value="${escapeHtml(state.name)}"
          placeholder="Campus cleanup">
      </label>
      ${errors.name ? `<p class="error">${errors.name}</p>` : ""}
      <div class="icon-row" role="group" aria-label="icon">${icons}</div>
      ${errors.icon ? `<p class="error">${errors.icon}</p>` : ""}`;
  } else if (state.step === 1) {
    body = `
      <label>Date <input id="wz-date" type="date" value="${state.date}"></label>
      <label>Starts <input id="wz-start" type="time" value="${state.startTime}"></label>
      <label>Ends <input id="wz-end" type="time" value="${state.endTime}"></label>
      ${errors.schedule ? `<p class="error">${errors.schedule}</p>` : ""}
      <p class="muted">Times are UTC.</p>`;
  } else if (state.step === 2) {
    body = `
      <label>Latitude <input id="wz-lat" value="${escapeHtml(state.lat)}" placeholder="61.065"></label>
      <label>Longitude <input id="wz-lon" value="${escapeHtml(state.lon)}" placeholder="28.095"></label>
      <label>Radius (m) <input id="wz-radius" value="${escapeHtml(state.radiusM)}"></label>
      ${errors.area ? `<p class="error">${errors.area}</p>` : ""}
      <p class="muted">Center and radius define the cleanup area.</p>`;
  } else {
    body = `
      <dl class="review">
        <dt>Name</dt><dd>${iconGlyph(state.icon)} ${escapeHtml(state.name)}</dd>
        <dt>When</dt><dd>${state.date} ${state.startTime}–${state.endTime} UTC</dd>
        <dt>Where</dt><dd>(${escapeHtml(state.lat)}, ${escapeHtml(state.lon)}),
          radius ${escapeHtml(state.radiusM)} m</dd>
      </dl>`;
  }

  const onLast = state.step === WIZARD_STEPS.length - 1;
  const blocked = Object.keys(errors).length > 0;
  return `
  <section class="wizard card">
    <h2>New event</h2>
    <nav class="crumbs">${crumbs}</nav>
    ${body}
    ${apiError ? `<p class="error" role="alert">${escapeHtml(apiError)}</p>` : ""}
    <div class="wizard-nav">
      <button data-action="wizard-back" ${state.step === 0 ? "disabled" : ""}>Back</button>
      ${
        onLast
          ? `<button data-action="wizard-submit" ${canSubmit(state) ? "" : "disabled"}>Create event</button>`
          : `<button data-action="wizard-next" ${blocked ? "disabled" : ""}>Next</button>`
      }
    </div>
  </section>`;
}
