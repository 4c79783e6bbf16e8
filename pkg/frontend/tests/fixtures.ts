// Fixed service responses used by the rendering and controller tests.

import type { Assessment, ClusterDetail, RegionInfo } from "../src/types.js";

export const DENVER_REGION: RegionInfo = {
  region_id: "denver",
  name: "Denver, CO",
  bounding_box: [39.7192, -105.0103, 39.7592, -104.9703],
  k: 2,
};

export const ASPEN_REGION: RegionInfo = {
  region_id: "aspen",
  name: "Aspen, CO",
  bounding_box: [39.1711, -106.8375, 39.2111, -106.7975],
  k: 2,
};

export const DENVER_ASSESSMENT: Assessment = {
  region_id: "denver",
  aeo_total: 55,
  aeo_per_cluster: { "0": 28, "1": 27 },
  threshold: 10,
  verdict: "LOCKDOWN",
  clusters: {
    k: 2,
    centroids: [
      { lat: 39.7392, lon: -104.9915 },
      { lat: 39.7392, lon: -104.9891 },
    ],
    assignments: { "0": 0, "1": 1 },
    inertia: 1234.5,
    iterations: 4,
  },
  assessed_at: 555,
};

export const DENVER_DETAIL: ClusterDetail = {
  region_id: "denver",
  verdict: "LOCKDOWN",
  aeo_total: 55,
  assessed_at: 555,
  clusters: [
    {
      index: 0,
      centroid: { lat: 39.7392, lon: -104.9915 },
      member_count: 290,
      aeo: 28,
      rms_radius_m: 61.5,
    },
    {
      index: 1,
      centroid: { lat: 39.7392, lon: -104.9891 },
      member_count: 270,
      aeo: 27,
      rms_radius_m: 58.2,
    },
  ],
  latest_positions: [
    { user_id: "a1", lat: 39.7396, lon: -104.9903, tick: 111, wall_time: 555 },
    { user_id: "b2", lat: 39.7393, lon: -104.9897, tick: 111, wall_time: 555 },
    { user_id: "c3", lat: 39.7389, lon: -104.9899, tick: 111, wall_time: 555 },
    { user_id: "d4", lat: 39.7389, lon: -104.9907, tick: 111, wall_time: 555 },
    { user_id: "e5", lat: 39.7393, lon: -104.9909, tick: 111, wall_time: 555 },
  ],
};

export const ASPEN_ASSESSMENT: Assessment = {
  region_id: "aspen",
  aeo_total: 0,
  aeo_per_cluster: { "0": 0, "1": 0 },
  threshold: 10,
  verdict: "NO_LOCKDOWN",
  clusters: {
    k: 2,
    centroids: [
      { lat: 39.1911, lon: -106.8187 },
      { lat: 39.1911, lon: -106.8163 },
    ],
    assignments: { "0": 0, "1": 1 },
    inertia: 987.6,
    iterations: 3,
  },
  assessed_at: 555,
};

export const ASPEN_DETAIL: ClusterDetail = {
  region_id: "aspen",
  verdict: "NO_LOCKDOWN",
  aeo_total: 0,
  assessed_at: 555,
  clusters: [
    {
      index: 0,
      centroid: { lat: 39.1911, lon: -106.8187 },
      member_count: 336,
      aeo: 0,
      rms_radius_m: 88.0,
    },
    {
      index: 1,
      centroid: { lat: 39.1911, lon: -106.8163 },
      member_count: 224,
      aeo: 0,
      rms_radius_m: 74.3,
    },
  ],
  latest_positions: [
    { user_id: "a1", lat: 39.1911, lon: -106.8196, tick: 111, wall_time: 555 },
    { user_id: "b2", lat: 39.1913, lon: -106.8174, tick: 111, wall_time: 555 },
  ],
};

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}
