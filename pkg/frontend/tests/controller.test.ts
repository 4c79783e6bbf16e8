import { describe, expect, it } from "vitest";

import { ServiceClient } from "../src/client.js";
import { DashboardController } from "../src/controller.js";
import { renderDashboard } from "../src/render.js";
import { initialState, viewFor } from "../src/state.js";
import type { Assessment } from "../src/types.js";
import {
  ASPEN_REGION,
  DENVER_ASSESSMENT,
  DENVER_DETAIL,
  DENVER_REGION,
  jsonResponse,
} from "./fixtures.js";

type Handler = (url: string) => Promise<Response> | Response | undefined;

function fetchRouter(handler: Handler) {
  let calls = 0;
  const impl = async (url: string): Promise<Response> => {
    calls += 1;
    const result = await handler(url);
    if (result === undefined) throw new TypeError(`fetch failed: ${url}`);
    return result;
  };
  return { impl, count: () => calls };
}

function deferred<T>() {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((res) => {
    resolve = res;
  });
  return { promise, resolve };
}

function happyPathHandler(url: string): Response | undefined {
  if (url.endsWith("/api/regions")) {
    return jsonResponse([DENVER_REGION, ASPEN_REGION]);
  }
  if (url.includes("/api/regions/denver/assessment")) {
    return jsonResponse(DENVER_ASSESSMENT);
  }
  if (url.includes("/api/regions/denver/clusters")) {
    return jsonResponse(DENVER_DETAIL);
  }
  return undefined;
}

function makeController(handler: Handler, now = () => 1_700_000_000_000) {
  const router = fetchRouter(handler);
  const client = new ServiceClient("http://svc", router.impl);
  const state = initialState(10);
  let renders = 0;
  const controller = new DashboardController(client, state, now, () => {
    renders += 1;
  });
  return { controller, client, state, router, renders: () => renders };
}

describe("fetchAndRender", () => {
  it("applies exactly what the service responded", async () => {
    const { controller, client, state } = makeController(happyPathHandler);
    await controller.loadRegions();
    await controller.fetchAndRender("denver");

    const view = viewFor(state, "denver");
    expect(view.assessment).toEqual(DENVER_ASSESSMENT);
    expect(view.detail).toEqual(DENVER_DETAIL);

    // the displayed verdict is traceable to a logged service response
    const html = renderDashboard(state, 1_700_000_000_000);
    const shown = html.match(/data-verdict="([A-Z_]+)"/)?.[1];
    const assessmentResponses = client.log.filter((entry) =>
      entry.url.includes("/api/regions/denver/assessment"),
    );
    expect(assessmentResponses.length).toBeGreaterThan(0);
    const last = assessmentResponses[assessmentResponses.length - 1];
    expect(shown).toBe((last.body as Assessment).verdict);
    expect(html).toContain("AEO 55 / threshold 10");
  });

  it("joins an in-flight fetch instead of issuing a second one", async () => {
    const gate = deferred<Response>();
    const { controller, router } = makeController((url) => {
      if (url.includes("/assessment")) return gate.promise;
      return happyPathHandler(url);
    });
    const first = controller.fetchAndRender("denver");
    const second = controller.fetchAndRender("denver");
    expect(second).toBe(first);
    gate.resolve(jsonResponse(DENVER_ASSESSMENT));
    await Promise.all([first, second]);
    // one assessment call + one clusters call
    expect(router.count()).toBe(2);
  });

  it("discards the late response of a superseded request", async () => {
    const slow = deferred<Response>();
    let assessmentCalls = 0;
    const staleAssessment = { ...DENVER_ASSESSMENT, aeo_total: 1, verdict: "NO_LOCKDOWN" };
    const { controller, state } = makeController((url) => {
      if (url.includes("/assessment")) {
        assessmentCalls += 1;
        // first (poll) request hangs; the forced one returns fresh data
        return assessmentCalls === 1 ? slow.promise : jsonResponse(DENVER_ASSESSMENT);
      }
      return happyPathHandler(url);
    });

    const polled = controller.fetchAndRender("denver");
    await controller.triggerReassessment("denver");
    expect(viewFor(state, "denver").assessment?.aeo_total).toBe(55);

    const fetchedAt = viewFor(state, "denver").fetchedAt;
    slow.resolve(jsonResponse(staleAssessment));
    await polled;
    // the stale poll response did not overwrite the forced refresh
    expect(viewFor(state, "denver").assessment?.aeo_total).toBe(55);
    expect(viewFor(state, "denver").fetchedAt).toBe(fetchedAt);
  });

  it("an unreachable service flags the view but keeps the last data", async () => {
    let failing = false;
    const { controller, state } = makeController((url) =>
      failing ? undefined : happyPathHandler(url),
    );
    state.selected = "denver";
    await controller.fetchAndRender("denver");
    expect(viewFor(state, "denver").unreachable).toBe(false);

    failing = true;
    await controller.fetchAndRender("denver");
    const view = viewFor(state, "denver");
    expect(view.unreachable).toBe(true);
    expect(view.assessment).toEqual(DENVER_ASSESSMENT);

    const html = renderDashboard(state, 1_700_000_000_000);
    expect(html).toContain("STALE");
    expect(html).toContain("service unreachable");
    expect(html).toContain('data-verdict="LOCKDOWN"');
  });

  it("an unknown region raises a toast and leaves views untouched", async () => {
    const { controller, state } = makeController((url) => {
      if (url.includes("/api/regions/atlantis/")) {
        return jsonResponse({ detail: "unknown region 'atlantis'" }, 404);
      }
      return happyPathHandler(url);
    });
    await controller.fetchAndRender("denver");
    const before = viewFor(state, "denver");

    await controller.triggerReassessment("atlantis");
    expect(state.toast).toContain("atlantis");
    expect(viewFor(state, "denver")).toEqual(before);
    expect(viewFor(state, "atlantis").assessment).toBeNull();

    const html = renderDashboard(state, 1_700_000_000_000);
    expect(html).toContain("toast");
  });

  it("notifies the render callback after every settle", async () => {
    const { controller, renders } = makeController(happyPathHandler);
    await controller.loadRegions();
    await controller.fetchAndRender("denver");
    expect(renders()).toBe(2);
  });
});

describe("loadNotifications", () => {
  it("stores the polled feed for the requested user", async () => {
    const feed = [
      {
        notification_id: 1,
        recipient: "u1",
        kind: "NEAR_INFECTED_AREA",
        created_at: 10,
        message: "avoid the area",
        source_event: "area:denver:555",
      },
    ];
    const { controller, state } = makeController((url) => {
      if (url.includes("/api/users/u1/notifications")) return jsonResponse(feed);
      return happyPathHandler(url);
    });
    await controller.loadNotifications("u1");
    expect(state.notificationUser).toBe("u1");
    expect(state.notifications).toEqual(feed);
  });

  it("unknown users surface a toast", async () => {
    const { controller, state } = makeController((url) => {
      if (url.includes("/notifications")) {
        return jsonResponse({ detail: "unknown user 'ghost'" }, 404);
      }
      return happyPathHandler(url);
    });
    await controller.loadNotifications("ghost");
    expect(state.toast).toContain("ghost");
  });
});
