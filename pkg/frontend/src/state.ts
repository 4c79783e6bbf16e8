// Dashboard state and the transitions the controller applies to it.
// Verdicts are never computed here: a view only ever holds what the last
// service response said, plus bookkeeping about how fresh that response is.

import type { Assessment, ClusterDetail, Notification, RegionInfo } from "./types.js";

export interface RegionView {
  regionId: string;
  assessment: Assessment | null;
  detail: ClusterDetail | null;
  fetchedAt: number | null; // ms since epoch, when the response landed
  unreachable: boolean;
}

export interface DashboardState {
  regions: RegionInfo[];
  selected: string | null;
  views: Record<string, RegionView>;
  toast: string | null;
  refreshIntervalS: number;
  notificationUser: string | null;
  notifications: Notification[];
}

export function initialState(refreshIntervalS = 10): DashboardState {
  return {
    regions: [],
    selected: null,
    views: {},
    toast: null,
    refreshIntervalS,
    notificationUser: null,
    notifications: [],
  };
}

export function emptyView(regionId: string): RegionView {
  return {
    regionId,
    assessment: null,
    detail: null,
    fetchedAt: null,
    unreachable: false,
  };
}

export function viewFor(state: DashboardState, regionId: string): RegionView {
  return state.views[regionId] ?? emptyView(regionId);
}

export function setRegions(state: DashboardState, regions: RegionInfo[]): void {
  state.regions = regions;
  if (state.selected === null && regions.length > 0) {
    state.selected = regions[0].region_id;
  }
}

export function applyAssessment(
  state: DashboardState,
  regionId: string,
  assessment: Assessment,
  detail: ClusterDetail,
  at: number,
): void {
  state.views[regionId] = {
    regionId,
    assessment,
    detail,
    fetchedAt: at,
    unreachable: false,
  };
}

export function markUnreachable(state: DashboardState, regionId: string): void {
  // keep the last-known view; only flag that refreshing failed
  state.views[regionId] = { ...viewFor(state, regionId), unreachable: true };
}

export function setToast(state: DashboardState, message: string | null): void {
  state.toast = message;
}

export function setNotifications(
  state: DashboardState,
  userId: string,
  items: Notification[],
): void {
  state.notificationUser = userId;
  state.notifications = items;
}

/** Data older than twice the refresh interval must be visibly flagged. */
export function isStale(view: RegionView, now: number, refreshIntervalS: number): boolean {
  if (view.fetchedAt === null) return false;
  if (view.unreachable) return true;
  return now - view.fetchedAt > 2 * refreshIntervalS * 1000;
}
