// Pure view functions: state in, HTML string out. Rendering the same state
// at the same clock value is byte-identical, which the snapshot tests pin.

import { escapeHtml, renderMap } from "./map.js";
import { DashboardState, RegionView, isStale, viewFor } from "./state.js";
import type { Notification } from "./types.js";

export function renderRegionSelector(state: DashboardState): string {
  const options = state.regions
    .map((region) => {
      const selected = region.region_id === state.selected ? " selected" : "";
      return `<option value="${escapeHtml(region.region_id)}"${selected}>${escapeHtml(
        region.name,
      )}</option>`;
    })
    .join("");
  return `<select id="region-select" aria-label="region">${options}</select>`;
}

export function renderBanner(view: RegionView): string {
  const assessment = view.assessment;
  if (assessment === null) {
    return `<div class="banner banner-none">NO DATA</div>`;
  }
  const cls = assessment.verdict === "LOCKDOWN" ? "banner-lockdown" : "banner-clear";
  return (
    `<div class="banner ${cls}" data-verdict="${assessment.verdict}">` +
    `<strong>${assessment.verdict.replace("_", " ")}</strong>` +
    `<span class="aeo">AEO ${assessment.aeo_total} / threshold ${assessment.threshold}</span>` +
    `</div>`
  );
}

export function renderStaleFlag(
  view: RegionView,
  now: number,
  refreshIntervalS: number,
): string {
  if (!isStale(view, now, refreshIntervalS)) return "";
  const reason = view.unreachable ? "service unreachable" : "data out of date";
  return `<div class="stale-flag">STALE: ${reason}; showing last known state</div>`;
}

export function renderClusterTable(view: RegionView): string {
  const detail = view.detail;
  if (detail === null || detail.clusters.length === 0) {
    return `<p class="muted">no clusters</p>`;
  }
  const rows = detail.clusters
    .map(
      (cluster) =>
        `<tr><td>${cluster.index}</td>` +
        `<td>${cluster.member_count}</td>` +
        `<td>${cluster.aeo}</td>` +
        `<td>${cluster.rms_radius_m.toFixed(1)} m</td></tr>`,
    )
    .join("");
  return (
    `<table class="clusters"><thead>` +
    `<tr><th>cluster</th><th>positions</th><th>AEO</th><th>RMS radius</th></tr>` +
    `</thead><tbody>${rows}</tbody></table>`
  );
}

export function renderNotificationFeed(userId: string | null, items: Notification[]): string {
  if (userId === null) {
    return `<p class="muted">enter a user id to inspect their notifications</p>`;
  }
  if (items.length === 0) {
    return `<p class="muted">no notifications for ${escapeHtml(userId)}</p>`;
  }
  const rows = items
    .map(
      (n) =>
        `<li class="feed-item feed-${n.kind.toLowerCase()}">` +
        `<span class="feed-kind">${n.kind}</span> ` +
        `${escapeHtml(n.message)}</li>`,
    )
    .join("");
  return `<ul class="feed">${rows}</ul>`;
}

export function renderToast(state: DashboardState): string {
  if (state.toast === null) return "";
  return `<div class="toast" role="alert">${escapeHtml(state.toast)}</div>`;
}

export function renderDashboard(state: DashboardState, now: number): string {
  const selected = state.selected;
  const view = selected === null ? null : viewFor(state, selected);
  const mapHtml =
    view === null || view.detail === null
      ? `<div class="map-placeholder">no data</div>`
      : renderMap(view.detail);
  return (
    `<header>` +
    `<h1>Lockdown monitor</h1>` +
    renderRegionSelector(state) +
    `<button id="reassess" type="button">Re-assess now</button>` +
    `</header>` +
    renderToast(state) +
    (view === null
      ? `<div class="banner banner-none">NO REGION SELECTED</div>`
      : renderStaleFlag(view, now, state.refreshIntervalS) + renderBanner(view)) +
    `<main><section class="map-pane">${mapHtml}</section>` +
    `<section class="detail-pane">` +
    (view === null ? "" : renderClusterTable(view)) +
    `<div class="feed-pane">` +
    `<input id="feed-user" placeholder="user id" value="${escapeHtml(
      state.notificationUser ?? "",
    )}"/>` +
    `<button id="feed-load" type="button">Load notifications</button>` +
    renderNotificationFeed(state.notificationUser, state.notifications) +
    `</div></section></main>`
  );
}
