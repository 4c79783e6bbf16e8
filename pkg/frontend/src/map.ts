// Self-contained SVG map: a plain equirectangular projection of the region,
// no tile server or maps API involved.

import type { ClusterDetail, Verdict } from "./types.js";

export const MAP_WIDTH = 640;
export const MAP_HEIGHT = 420;
const PADDING = 36;

interface Bounds {
  minLat: number;
  minLon: number;
  maxLat: number;
  maxLon: number;
}

function dataBounds(detail: ClusterDetail): Bounds | null {
  const lats: number[] = [];
  const lons: number[] = [];
  for (const cluster of detail.clusters) {
    if (cluster.centroid) {
      lats.push(cluster.centroid.lat);
      lons.push(cluster.centroid.lon);
    }
  }
  for (const position of detail.latest_positions) {
    lats.push(position.lat);
    lons.push(position.lon);
  }
  if (lats.length === 0) return null;
  const minLat = Math.min(...lats);
  const maxLat = Math.max(...lats);
  const minLon = Math.min(...lons);
  const maxLon = Math.max(...lons);
  // degenerate extents (single point) get a nominal span
  const latSpan = Math.max(maxLat - minLat, 1e-4);
  const lonSpan = Math.max(maxLon - minLon, 1e-4);
  return {
    minLat: minLat - 0.1 * latSpan,
    maxLat: maxLat + 0.1 * latSpan,
    minLon: minLon - 0.1 * lonSpan,
    maxLon: maxLon + 0.1 * lonSpan,
  };
}

function project(bounds: Bounds, lat: number, lon: number): { x: number; y: number } {
  const x =
    PADDING +
    ((lon - bounds.minLon) / (bounds.maxLon - bounds.minLon)) * (MAP_WIDTH - 2 * PADDING);
  const y =
    MAP_HEIGHT -
    PADDING -
    ((lat - bounds.minLat) / (bounds.maxLat - bounds.minLat)) * (MAP_HEIGHT - 2 * PADDING);
  return { x: round2(x), y: round2(y) };
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}

export function markerRadius(memberCount: number): number {
  return round2(6 + 4 * Math.sqrt(memberCount));
}

export function verdictColor(verdict: Verdict): string {
  return verdict === "LOCKDOWN" ? "#d93025" : "#188038";
}

/** Render the region map as an SVG string: user dots plus cluster markers
 * sized by member count and colored by the service's verdict. */
export function renderMap(detail: ClusterDetail): string {
  const bounds = dataBounds(detail);
  const parts: string[] = [
    `<svg class="map" viewBox="0 0 ${MAP_WIDTH} ${MAP_HEIGHT}" role="img" aria-label="region map">`,
    `<rect width="${MAP_WIDTH}" height="${MAP_HEIGHT}" class="map-bg"/>`,
  ];
  if (bounds === null) {
    parts.push(
      `<text x="${MAP_WIDTH / 2}" y="${MAP_HEIGHT / 2}" class="map-empty">no data</text>`,
    );
  } else {
    const color = verdictColor(detail.verdict);
    for (const position of detail.latest_positions) {
      const { x, y } = project(bounds, position.lat, position.lon);
      parts.push(
        `<circle cx="${x}" cy="${y}" r="3" class="user-dot">` +
          `<title>${escapeHtml(position.user_id)}</title></circle>`,
      );
    }
    for (const cluster of detail.clusters) {
      if (!cluster.centroid) continue;
      const { x, y } = project(bounds, cluster.centroid.lat, cluster.centroid.lon);
      const r = markerRadius(cluster.member_count);
      parts.push(
        `<g class="cluster-marker" data-cluster="${cluster.index}">` +
          `<circle cx="${x}" cy="${y}" r="${r}" fill="${color}" fill-opacity="0.35" stroke="${color}"/>` +
          `<text x="${x}" y="${y}" class="cluster-label">AEO ${cluster.aeo}</text>` +
          `</g>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
