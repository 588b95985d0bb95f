import type {
  AuthorCard,
  AuthorDocuments,
  AuthorProfilePayload,
  ExplainPayload,
  SearchResponse,
  StrategyInfo,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

// the search page always asks for the service's maximum page of results and
// paginates client-side; the service caps limit at 100
export const SEARCH_LIMIT = 100;

const inflight = new Map<string, Promise<unknown>>();

export function inflightCount(): number {
  return inflight.size;
}

/** GET a JSON payload; concurrent requests for the same path share one fetch. */
export function getJson<T>(path: string, fetchImpl?: typeof fetch): Promise<T> {
  const pending = inflight.get(path);
  if (pending) {
    return pending as Promise<T>;
  }
  const doFetch = fetchImpl ?? fetch;
  const request = (async () => {
    try {
      let response: Response;
      try {
        response = await doFetch(path);
      } catch (err) {
        throw new Error(`network failure: ${String(err)}`);
      }
      const body = await response.json().catch(() => null);
      if (!response.ok) {
        const detail =
          body && typeof body.detail === "string" ? body.detail : `HTTP ${response.status}`;
        throw new ApiError(response.status, detail);
      }
      return body as T;
    } finally {
      inflight.delete(path);
    }
  })();
  inflight.set(path, request);
  return request;
}

export const api = {
  strategies: (): Promise<StrategyInfo> => getJson("/api/strategies"),
  search: (query: string, strategy: string): Promise<SearchResponse> => {
    const params = new URLSearchParams({
      q: query,
      strategy,
      limit: String(SEARCH_LIMIT),
    });
    return getJson(`/api/search?${params}`);
  },
  author: (authorId: string): Promise<AuthorCard> =>
    getJson(`/api/authors/${encodeURIComponent(authorId)}`),
  profile: (authorId: string): Promise<AuthorProfilePayload> =>
    getJson(`/api/authors/${encodeURIComponent(authorId)}/profile`),
  documents: (authorId: string): Promise<AuthorDocuments> =>
    getJson(`/api/authors/${encodeURIComponent(authorId)}/documents`),
  explain: (query: string, authorId: string): Promise<ExplainPayload> => {
    const params = new URLSearchParams({ q: query, author: authorId });
    return getJson(`/api/explain?${params}`);
  },
};
