// Browser bootstrap: wire the controller to the DOM and start polling.

import { ServiceClient } from "./client.js";
import { DashboardController } from "./controller.js";
import { renderDashboard } from "./render.js";
import { initialState } from "./state.js";

const params = new URLSearchParams(window.location.search);
const serviceUrl = params.get("service") ?? "http://127.0.0.1:8000";
const refreshS = Number(params.get("refresh") ?? "10");

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app element");

const client = new ServiceClient(serviceUrl);
const state = initialState(refreshS);
const controller = new DashboardController(client, state, () => Date.now(), () => {
  root.innerHTML = renderDashboard(state, Date.now());
});

root.addEventListener("change", (event) => {
  const target = event.target as HTMLElement;
  if (target.id === "region-select") {
    void controller.selectRegion((target as HTMLSelectElement).value);
  }
});

root.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.id === "reassess" && state.selected !== null) {
    void controller.triggerReassessment(state.selected);
  }
  if (target.id === "feed-load") {
    const input = document.getElementById("feed-user") as HTMLInputElement | null;
    if (input !== null && input.value.trim() !== "") {
      void controller.loadNotifications(input.value.trim());
    }
  }
});

void (async () => {
  await controller.loadRegions();
  if (state.selected !== null) {
    await controller.fetchAndRender(state.selected);
  }
  controller.start();
})();
