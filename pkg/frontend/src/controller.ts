// Fetch orchestration: at most one in-flight fetch per region, responses
// applied in request order, late responses for superseded requests dropped.

import { ServiceClient, ServiceError } from "./client.js";
import {
  DashboardState,
  applyAssessment,
  markUnreachable,
  setNotifications,
  setRegions,
  setToast,
} from "./state.js";

export type Clock = () => number;

export class DashboardController {
  private inFlight = new Map<string, Promise<void>>();
  private latestRequest = new Map<string, number>();
  private requestCounter = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private client: ServiceClient,
    readonly state: DashboardState,
    private clock: Clock = () => Date.now(),
    private onChange: () => void = () => {},
  ) {}

  async loadRegions(): Promise<void> {
    try {
      setRegions(this.state, await this.client.regions());
    } catch (error) {
      setToast(this.state, `cannot list regions: ${describe(error)}`);
    }
    this.onChange();
  }

  /** Refresh one region's assessment and cluster detail from the service.
   *
   * Poll ticks join an already in-flight fetch; a forced refresh supersedes
   * it instead, and the superseded response is discarded on arrival.
   */
  fetchAndRender(regionId: string, force = false): Promise<void> {
    const pending = this.inFlight.get(regionId);
    if (pending !== undefined && !force) return pending;

    const requestId = ++this.requestCounter;
    this.latestRequest.set(regionId, requestId);
    const task = this.fetchOnce(regionId, force, requestId).finally(() => {
      if (this.inFlight.get(regionId) === task) {
        this.inFlight.delete(regionId);
      }
    });
    this.inFlight.set(regionId, task);
    return task;
  }

  private async fetchOnce(regionId: string, force: boolean, requestId: number): Promise<void> {
    try {
      const assessment = await this.client.assessment(regionId, force);
      const detail = await this.client.clusters(regionId);
      if (this.latestRequest.get(regionId) !== requestId) {
        return; // a newer request for this region superseded us
      }
      applyAssessment(this.state, regionId, assessment, detail, this.clock());
    } catch (error) {
      if (this.latestRequest.get(regionId) !== requestId) return;
      if (error instanceof ServiceError && error.status === 404) {
        // unknown region: surface a toast, leave the view untouched
        setToast(this.state, `region ${regionId}: ${error.message}`);
      } else {
        markUnreachable(this.state, regionId);
      }
    }
    this.onChange();
  }

  /** The official's manual refresh: force a fresh assessment server-side. */
  triggerReassessment(regionId: string): Promise<void> {
    return this.fetchAndRender(regionId, true);
  }

  async loadNotifications(userId: string): Promise<void> {
    try {
      setNotifications(this.state, userId, await this.client.notifications(userId));
    } catch (error) {
      setToast(this.state, `notifications for ${userId}: ${describe(error)}`);
    }
    this.onChange();
  }

  selectRegion(regionId: string): Promise<void> {
    this.state.selected = regionId;
    setToast(this.state, null);
    return this.fetchAndRender(regionId);
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => {
      if (this.state.selected !== null) {
        void this.fetchAndRender(this.state.selected);
      }
      this.onChange(); // staleness flags depend on the clock, not on data
    }, this.state.refreshIntervalS * 1000);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}

function describe(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}
