// @vitest-environment happy-dom
import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { startApp } from "../src/app";
import type { AppController } from "../src/app";
import type { FetchLike } from "../src/api";
import { CASE_ID, fakeService } from "./helpers";
import type { FakeService } from "./helpers";

const FINAL = "connected(defendant-x, offence-wsm-admin)";

function mount(): HTMLElement {
  const root = document.createElement("div");
  root.id = "app";
  document.body.append(root);
  return root;
}

function nodeFill(root: HTMLElement, nodeId: string): string | null {
  const shape = root.querySelector(`[data-node-id="${nodeId}"] .node-shape`);
  return shape ? shape.getAttribute("fill") : null;
}

function finalBadge(root: HTMLElement): Element | null {
  const card = root.querySelector(`[data-statement="${FINAL}"]`);
  return card ? card.querySelector(".badge") : null;
}

function submitAnswerForm(
  root: HTMLElement,
  argId: string,
  cqId: string,
  answer: string,
  justification: string,
): void {
  const form = root.querySelector(
    `form[data-arg-id="${argId}"][data-cq-id="${cqId}"]`) as HTMLFormElement | null;
  expect(form).not.toBeNull();
  const select = form!.querySelector("select") as HTMLSelectElement;
  const input = form!.querySelector("input[name=justification]") as HTMLInputElement;
  select.value = answer;
  input.value = justification;
  form!.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

async function openCase(service: FakeService): Promise<{ root: HTMLElement; app: AppController }> {
  window.location.hash = `#/case/${CASE_ID}`;
  const root = mount();
  const app = startApp(root, new ApiClient("", service.fetch));
  await app.whenIdle();
  return { root, app };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("case view", () => {
  it("shows the tagged marketplace entities in the flow graph", async () => {
    const service = fakeService();
    const { root } = await openCase(service);
    const flow = root.querySelector(".flow-graph");
    expect(flow).not.toBeNull();
    const text = flow!.textContent ?? "";
    for (const entity of ["hansa", "dudebuy", "mixer-service", "bppc", "game-company"]) {
      expect(text).toContain(entity);
    }
    expect(root.querySelectorAll(".flow-node.tagged").length).toBeGreaterThanOrEqual(5);
  });

  it("renders every framework node in the argument graph", async () => {
    const service = fakeService();
    const { root } = await openCase(service);
    const argGraph = root.querySelector(".argument-graph");
    expect(argGraph).not.toBeNull();
    for (const id of ["a1", "a7", "a9", "a11"]) {
      expect(nodeFill(root, id)).toBe("#2e8b57");
    }
  });

  it("answers a critical question through the form and updates in place", async () => {
    const service = fakeService();
    const { root, app } = await openCase(service);
    const hrefBefore = window.location.href;

    expect(nodeFill(root, "a7")).toBe("#2e8b57");
    expect(finalBadge(root)?.classList.contains("badge-presumptive")).toBe(true);

    submitAnswerForm(root, "a7", "cq1", "unfavourable",
      "mixing-service records show pooled keys");
    await app.whenIdle();

    // same page, same mount point: the answer round trip never navigates
    expect(window.location.href).toBe(hrefBefore);
    expect(root.isConnected).toBe(true);
    for (const request of service.requests) {
      expect(request.path.startsWith("/api/")).toBe(true);
    }

    expect(nodeFill(root, "a7")).toBe("#c0392b");
    expect(nodeFill(root, "a9")).toBe("#c0392b");
    expect(nodeFill(root, "a11")).toBe("#c0392b");
    expect(nodeFill(root, "a1")).toBe("#2e8b57");

    const badge = finalBadge(root);
    expect(badge?.classList.contains("badge-defeated")).toBe(true);
    expect(badge?.textContent).toBe("defeated");

    // the objection that did the damage is now a node attacking a7
    const objection = root.querySelector('[data-node-id="cq:a7:cq1"]');
    expect(objection?.getAttribute("data-label")).toBe("IN");

    const toast = root.querySelector(".toast-info");
    expect(toast?.textContent).toContain("label changed for a11, a7, a9");

    const answered = root.querySelector('article.cq[data-arg-id="a7"][data-cq-id="cq1"]');
    expect(answered?.classList.contains("cq-unfavourable")).toBe(true);
    expect(answered?.querySelector("form")).toBeNull();
  });

  it("rejects a blank justification client side and changes nothing", async () => {
    const service = fakeService();
    const { root, app } = await openCase(service);
    const postsBefore = service.requests.filter((r) => r.method === "POST").length;

    submitAnswerForm(root, "a7", "cq1", "unfavourable", "   ");
    await app.whenIdle();

    expect(service.requests.filter((r) => r.method === "POST").length).toBe(postsBefore);
    expect(nodeFill(root, "a7")).toBe("#2e8b57");
    expect(finalBadge(root)?.classList.contains("badge-presumptive")).toBe(true);
    expect(root.querySelector(".toast-error")?.textContent)
      .toContain("a justification is required");
  });

  it("keeps the old state and toasts when the service rejects the answer", async () => {
    const service = fakeService();
    const busyFetch: FetchLike = async (input, init) => {
      if ((init?.method ?? "GET").toUpperCase() === "POST") {
        return new Response(JSON.stringify({ error: "case busy" }), {
          status: 503,
          headers: { "Retry-After": "1" },
        });
      }
      return service.fetch(input, init);
    };
    window.location.hash = `#/case/${CASE_ID}`;
    const root = mount();
    const app = startApp(root, new ApiClient("", busyFetch));
    await app.whenIdle();

    submitAnswerForm(root, "a7", "cq1", "unfavourable", "solid grounds");
    await app.whenIdle();

    expect(nodeFill(root, "a7")).toBe("#2e8b57");
    expect(finalBadge(root)?.classList.contains("badge-presumptive")).toBe(true);
    expect(root.querySelector(".toast-error")?.textContent)
      .toContain("case is busy; retry in 1s");
  });
});

describe("navigation and failure screens", () => {
  it("lists cases when no case is selected", async () => {
    const service = fakeService();
    window.location.hash = "";
    const root = mount();
    const app = startApp(root, new ApiClient("", service.fetch));
    await app.whenIdle();
    const link = root.querySelector(".case-list a");
    expect(link?.textContent).toBe(CASE_ID);
    expect(link?.getAttribute("href")).toBe(`#/case/${CASE_ID}`);
  });

  it("loads the case after a hash change", async () => {
    const service = fakeService();
    window.location.hash = "";
    const root = mount();
    const app = startApp(root, new ApiClient("", service.fetch));
    await app.whenIdle();
    expect(root.querySelector(".case-view")).toBeNull();

    window.location.hash = `#/case/${CASE_ID}`;
    window.dispatchEvent(new Event("hashchange"));
    await app.whenIdle();
    expect(root.querySelector(".case-view")).not.toBeNull();
    expect(app.getState().current?.caseId).toBe(CASE_ID);
  });

  it("shows a retry screen when the service is unreachable, then recovers", async () => {
    const service = fakeService();
    let reachable = false;
    const flakyFetch: FetchLike = async (input, init) => {
      if (!reachable) throw new TypeError("fetch failed");
      return service.fetch(input, init);
    };
    window.location.hash = `#/case/${CASE_ID}`;
    const root = mount();
    const app = startApp(root, new ApiClient("", flakyFetch));
    await app.whenIdle();

    const button = root.querySelector(".retry-button") as HTMLButtonElement | null;
    expect(button).not.toBeNull();
    expect(app.getState().unreachable).toBe(true);

    reachable = true;
    button!.click();
    await app.whenIdle();
    expect(app.getState().unreachable).toBe(false);
    expect(root.querySelector(".case-view")).not.toBeNull();
  });
});
