/** Live leaderboard: fetch, render verbatim, poll while the event runs.
 *
 * The poller never reorders or recomputes anything; it re-renders
 * whatever the server sends. A fetch failure keeps the last standings on
 * screen behind a stale banner and the polling continues.
 */

import type { ApiClient } from "./api.js";
import type { Leaderboard } from "./types.js";

export const POLL_INTERVAL_MS = 5000;

export interface PollerHooks {
  render: (board: Leaderboard, stale: boolean) => void;
  setIntervalImpl?: typeof setInterval;
  clearIntervalImpl?: typeof clearInterval;
}

export class LeaderboardPoller {
  scope: "individual" | "team" = "individual";
  private last: Leaderboard | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly setIntervalImpl: typeof setInterval;
  private readonly clearIntervalImpl: typeof clearInterval;

  constructor(
    private readonly api: ApiClient,
    private readonly eventId: string,
    private readonly hooks: PollerHooks,
    private readonly intervalMs: number = POLL_INTERVAL_MS,
  ) {
    this.setIntervalImpl = hooks.setIntervalImpl ?? setInterval;
    this.clearIntervalImpl = hooks.clearIntervalImpl ?? clearInterval;
  }

  async tick(): Promise<void> {
    try {
      const board = await this.api.leaderboard(this.eventId, this.scope);
      this.last = board;
      this.hooks.render(board, false);
    } catch {
      if (this.last) {
        this.hooks.render(this.last, true);
      } else {
        this.hooks.render({ scope: this.scope, entries: [] }, true);
      }
    }
  }

  /** Fetch once immediately, then poll while `active` is true. */
  async start(active: boolean): Promise<void> {
    await this.tick();
    if (active && this.timer === null) {
      this.timer = this.setIntervalImpl(() => void this.tick(), this.intervalMs);
    }
  }

  async setScope(scope: "individual" | "team"): Promise<void> {
    this.scope = scope;
    this.last = null;
    await this.tick();
  }

  stop(): void {
    if (this.timer !== null) {
      this.clearIntervalImpl(this.timer);
      this.timer = null;
    }
  }
}
