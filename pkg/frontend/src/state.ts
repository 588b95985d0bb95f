export const PAGE_SIZE = 20;

export type Route =
  | { view: "search"; query: string; strategy: string; page: number }
  | { view: "author"; authorId: string }
  | { view: "explain"; query: string; authorId: string };

export function parseRoute(hash: string): Route {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  const [path, queryString = ""] = raw.split("?", 2);
  const params = new URLSearchParams(queryString);
  const segments = path.split("/").filter((s) => s.length > 0);
  if (segments[0] === "author" && segments.length === 2 && segments[1]) {
    return { view: "author", authorId: decodeURIComponent(segments[1]) };
  }
  if (segments[0] === "explain") {
    const query = params.get("q") ?? "";
    const authorId = params.get("author") ?? "";
    if (query && authorId) {
      return { view: "explain", query, authorId };
    }
  }
  const page = Number.parseInt(params.get("page") ?? "1", 10);
  return {
    view: "search",
    query: params.get("q") ?? "",
    strategy: params.get("strategy") ?? "",
    page: Number.isFinite(page) && page >= 1 ? page : 1,
  };
}

export function searchHash(query: string, strategy: string, page = 1): string {
  const params = new URLSearchParams();
  if (query) params.set("q", query);
  if (strategy) params.set("strategy", strategy);
  if (page > 1) params.set("page", String(page));
  const qs = params.toString();
  return qs ? `#/?${qs}` : "#/";
}

export function authorHash(authorId: string): string {
  return `#/author/${encodeURIComponent(authorId)}`;
}

export function explainHash(query: string, authorId: string): string {
  const params = new URLSearchParams({ q: query, author: authorId });
  return `#/explain?${params}`;
}

export function pageCount(totalResults: number): number {
  return Math.max(1, Math.ceil(totalResults / PAGE_SIZE));
}

/** The page's slice in original order; page is clamped to the valid range. */
export function pageSlice<T>(items: T[], page: number): T[] {
  const clamped = Math.min(Math.max(page, 1), pageCount(items.length));
  return items.slice((clamped - 1) * PAGE_SIZE, clamped * PAGE_SIZE);
}

/** null when the query is submittable, otherwise the validation message. */
export function validateQuery(query: string): string | null {
  if (query.trim().length === 0) {
    return "Type a topic to search for.";
  }
  return null;
}
