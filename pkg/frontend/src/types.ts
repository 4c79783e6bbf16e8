// Wire formats of the tracing service, mirrored field for field.

export type Verdict = "LOCKDOWN" | "NO_LOCKDOWN";

export interface RegionInfo {
  region_id: string;
  name: string;
  bounding_box: [number, number, number, number]; // min lat, min lon, max lat, max lon
  k: number;
}

export interface ClusterModel {
  k: number;
  centroids: { lat: number; lon: number }[];
  assignments: Record<string, number>;
  inertia: number;
  iterations: number;
}

export interface Assessment {
  region_id: string;
  aeo_total: number;
  aeo_per_cluster: Record<string, number>;
  threshold: number;
  verdict: Verdict;
  clusters: ClusterModel | null;
  assessed_at: number;
}

export interface ClusterMarker {
  index: number;
  centroid: { lat: number; lon: number } | null;
  member_count: number;
  aeo: number;
  rms_radius_m: number;
}

export interface ClusterDetail {
  region_id: string;
  verdict: Verdict;
  aeo_total: number;
  assessed_at: number;
  clusters: ClusterMarker[];
  latest_positions: {
    user_id: string;
    lat: number;
    lon: number;
    tick: number;
    wall_time: number;
  }[];
}

export interface Notification {
  notification_id: number;
  recipient: string;
  kind: "CONTACT_WITH_POSITIVE" | "NEAR_INFECTED_AREA" | "BT_PROXIMITY";
  created_at: number;
  message: string;
  source_event: string;
}
