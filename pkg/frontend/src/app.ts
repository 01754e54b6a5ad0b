import { ApiClient, ApiError } from "./api";
import { renderApp } from "./render";
import type { Handlers } from "./render";
import {
  describeError,
  dismissToast,
  fetchCaseState,
  initialState,
  pushToast,
  submitAnswer,
} from "./state";
import type { AppState } from "./state";
import type { CqState } from "./types";

export interface AppController {
  /** resolves once every in-flight fetch/render has settled */
  whenIdle(): Promise<void>;
  getState(): AppState;
}

function caseIdFromHash(): string {
  const match = /^#\/case\/(.+)$/.exec(window.location.hash);
  return match && match[1] ? decodeURIComponent(match[1]) : "";
}

/**
 * Wire the state store, the API client, and the renderer together on `root`.
 * Every update re-renders in place; the page itself never reloads.
 */
export function startApp(root: HTMLElement, client: ApiClient): AppController {
  let state = initialState();
  let inflight: Promise<void> = Promise.resolve();

  function track(work: Promise<void>): void {
    inflight = inflight.then(() => work);
  }

  function update(next: AppState): void {
    state = next;
    renderApp(root, state, handlers);
  }

  async function load(): Promise<void> {
    update({ ...state, loading: true, unreachable: false });
    try {
      const cases = await client.listCases();
      const caseId = caseIdFromHash();
      const current = caseId && cases.cases.includes(caseId)
        ? await fetchCaseState(client, caseId)
        : null;
      update({ ...state, cases: cases.cases, current, loading: false, unreachable: false });
    } catch (error) {
      if (error instanceof ApiError && error.kind === "network") {
        update({ ...state, loading: false, unreachable: true });
        return;
      }
      update(pushToast(
        { ...state, loading: false, current: null }, "error", describeError(error)));
    }
  }

  const handlers: Handlers = {
    selectCase(caseId: string): void {
      window.location.hash = caseId ? `#/case/${encodeURIComponent(caseId)}` : "#/";
    },

    answer(argId: string, cqId: string, answer: CqState, justification: string): void {
      const current = state.current;
      if (!current) return;
      track(
        submitAnswer(client, current, argId, cqId, answer, justification)
          .then((outcome) => {
            const flipped = outcome.changedArgIds.filter((n) => !n.startsWith("cq:"));
            const note = flipped.length > 0
              ? `recorded; label changed for ${flipped.join(", ")}`
              : "recorded; labels unchanged";
            update(pushToast({ ...state, current: outcome.state }, "info", note));
          })
          .catch((error) => {
            update(pushToast(state, "error", describeError(error)));
          }),
      );
    },

    formError(message: string): void {
      update(pushToast(state, "error", message));
    },

    retry(): void {
      track(load());
    },

    dismissToast(id: number): void {
      update(dismissToast(state, id));
    },
  };

  window.addEventListener("hashchange", () => {
    track(load());
  });
  track(load());

  return {
    async whenIdle(): Promise<void> {
      let seen: Promise<void>;
      do {
        seen = inflight;
        await seen;
      } while (seen !== inflight);
    },
    getState: () => state,
  };
}
