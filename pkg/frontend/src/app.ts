// DOM glue: routes hashes to views, fetches payloads, delegates events.
// All rendering goes through the pure functions in render.ts.

import { api, ApiError } from "./api";
import {
  errorBannerHtml,
  explainViewHtml,
  introHtml,
  loadingHtml,
  noMatchHtml,
  notFoundHtml,
  pageHtml,
  profileViewHtml,
  resultsHtml,
  searchFormHtml,
} from "./render";
import { parseRoute, searchHash, validateQuery } from "./state";
import type { StrategyInfo } from "./types";

export function createApp(root: HTMLElement, win: Window = window): () => Promise<void> {
  let strategyInfo: StrategyInfo | null = null;
  let renderSeq = 0;

  async function ensureStrategies(): Promise<StrategyInfo | null> {
    if (strategyInfo === null) {
      try {
        strategyInfo = await api.strategies();
      } catch {
        strategyInfo = null;
      }
    }
    return strategyInfo;
  }

  async function show(): Promise<void> {
    const seq = ++renderSeq;
    const put = (content: string) => {
      // a newer navigation wins; stale responses must not overwrite it
      if (seq === renderSeq) {
        root.innerHTML = pageHtml(content);
      }
    };
    const route = parseRoute(win.location.hash);
    try {
      if (route.view === "search") {
        const info = await ensureStrategies();
        const strategy = route.strategy || info?.default || "fused";
        if (validateQuery(route.query) !== null) {
          put(searchFormHtml(route.query, strategy, info) + introHtml());
          return;
        }
        put(searchFormHtml(route.query, strategy, info) + loadingHtml());
        const response = await api.search(route.query, strategy);
        put(searchFormHtml(route.query, strategy, info) + resultsHtml(response, route.page));
      } else if (route.view === "author") {
        put(loadingHtml());
        const [card, profile, documents] = await Promise.all([
          api.author(route.authorId),
          api.profile(route.authorId),
          api.documents(route.authorId),
        ]);
        put(profileViewHtml(card, profile, documents));
      } else {
        put(loadingHtml());
        const payload = await api.explain(route.query, route.authorId);
        const card = await api.author(route.authorId).catch(() => null);
        put(explainViewHtml(payload, card));
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 422 && route.view === "search") {
        put(
          searchFormHtml(route.query, route.strategy, strategyInfo) +
            noMatchHtml(route.query, err.detail),
        );
      } else if (err instanceof ApiError && err.status === 404) {
        put(notFoundHtml(err.detail));
      } else {
        const message = err instanceof Error ? err.message : String(err);
        put(errorBannerHtml(message));
      }
    }
  }

  root.addEventListener("submit", (ev) => {
    const form = ev.target as HTMLFormElement;
    if (form.dataset.role !== "search-form") return;
    ev.preventDefault();
    const queryInput = form.elements.namedItem("q") as HTMLInputElement;
    const strategySelect = form.elements.namedItem("strategy") as HTMLSelectElement | null;
    const message = validateQuery(queryInput.value);
    const hint = form.querySelector<HTMLElement>('[data-role="form-hint"]');
    if (message !== null) {
      // client-side validation: no request leaves the page
      if (hint) {
        hint.textContent = message;
        hint.hidden = false;
      }
      return;
    }
    const target = searchHash(queryInput.value.trim(), strategySelect?.value ?? "");
    if (win.location.hash === target) {
      void show();
    } else {
      win.location.hash = target;
    }
  });

  root.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.dataset.role === "retry") {
      void show();
    }
  });

  win.addEventListener("hashchange", () => void show());
  void show();
  return show;
}
