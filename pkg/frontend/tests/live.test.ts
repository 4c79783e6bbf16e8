// End-to-end check against a real service preloaded with both scenarios
// (see scripts/dashboard_e2e.sh at the repository root). Skipped unless
// TRACELOCK_SERVICE_URL is set.

import { describe, expect, it } from "vitest";

import { ServiceClient } from "../src/client.js";
import { DashboardController } from "../src/controller.js";
import { renderDashboard } from "../src/render.js";
import { initialState, viewFor } from "../src/state.js";
import type { Assessment } from "../src/types.js";

const serviceUrl = process.env.TRACELOCK_SERVICE_URL;

describe.skipIf(!serviceUrl)("dashboard against a live service", () => {
  it("shows a red LOCKDOWN banner with AEO 55 for the crowded region", async () => {
    const client = new ServiceClient(serviceUrl!);
    const state = initialState(10);
    const controller = new DashboardController(client, state);
    await controller.loadRegions();
    await controller.fetchAndRender("denver");

    const html = renderDashboard(state, Date.now());
    expect(html).toContain("banner-lockdown");
    expect(html).toContain('data-verdict="LOCKDOWN"');
    expect(html).toContain("AEO 55");
    expect(html).toContain("cluster-marker");

    // displayed verdict is exactly what the service last answered
    const last = client.log
      .filter((entry) => entry.url.includes("/api/regions/denver/assessment"))
      .pop();
    expect((last?.body as Assessment).verdict).toBe("LOCKDOWN");
  });

  it("shows a green banner for the sparse region", async () => {
    const client = new ServiceClient(serviceUrl!);
    const state = initialState(10);
    const controller = new DashboardController(client, state);
    await controller.loadRegions();
    state.selected = "aspen";
    await controller.fetchAndRender("aspen");

    const html = renderDashboard(state, Date.now());
    expect(html).toContain("banner-clear");
    expect(html).toContain('data-verdict="NO_LOCKDOWN"');
  });

  it("manual re-assessment returns a fresh, consistent verdict", async () => {
    const client = new ServiceClient(serviceUrl!);
    const state = initialState(10);
    const controller = new DashboardController(client, state);
    await controller.loadRegions();
    await controller.fetchAndRender("denver");
    const before = viewFor(state, "denver").assessment;
    await controller.triggerReassessment("denver");
    const after = viewFor(state, "denver").assessment;
    expect(after?.verdict).toBe(before?.verdict);
    expect(after?.aeo_total).toBe(before?.aeo_total);
  });
});
