// Pure view renderers: payload in, HTML string out. No fetching, no DOM
// reads, no reordering or rescaling of anything the API returned; these
// functions are what the snapshot tests pin down.

import type {
  AuthorCard,
  AuthorDocuments,
  AuthorProfilePayload,
  EntityContribution,
  ExplainPayload,
  SearchResponse,
  StrategyInfo,
} from "./types";
import { authorHash, explainHash, pageCount, pageSlice, searchHash } from "./state";

export function escapeHtml(value: string): string {
  return value.replace(/[&<>"']/g, (c) => {
    switch (c) {
      case "&":
        return "&amp;";
      case "<":
        return "&lt;";
      case ">":
        return "&gt;";
      case '"':
        return "&quot;";
      default:
        return "&#39;";
    }
  });
}

/** Scores and diagnostics shown with 6 significant digits, zeros trimmed. */
export function fmtScore(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  if (value === 0) return "0";
  const s = value.toPrecision(6);
  if (s.includes("e")) return s;
  if (s.includes(".")) return s.replace(/0+$/, "").replace(/\.$/, "");
  return s;
}

/** Bar width in percent, proportional to value/max. */
export function barWidth(value: number, max: number): string {
  if (max <= 0) return "0";
  const pct = (100 * value) / max;
  return pct
    .toPrecision(4)
    .replace(/0+$/, "")
    .replace(/\.$/, "");
}

function num(value: number | null): string {
  return value === null ? "&ndash;" : fmtScore(value);
}

export function pageHtml(content: string): string {
  return `<header class="site-header">
  <a class="site-title" href="#/">expertsearch</a>
</header>
<main>
${content}
</main>`;
}

export function introHtml(): string {
  return `<section class="intro">
  <p>Search for a topic to rank the authors whose work matches it.
  Each result links to the author&#39;s expertise profile and to an
  explanation of why it matched.</p>
</section>`;
}

export function loadingHtml(): string {
  return `<p class="loading" role="status">Loading&hellip;</p>`;
}

export function searchFormHtml(
  query: string,
  strategy: string,
  info: StrategyInfo | null,
): string {
  const options = (info?.strategies ?? [])
    .map((name) => {
      const active = name === (strategy || info?.default);
      return `<option value="${escapeHtml(name)}"${active ? " selected" : ""}>${escapeHtml(name)}</option>`;
    })
    .join("");
  return `<form class="search-form" data-role="search-form">
  <input name="q" type="search" value="${escapeHtml(query)}" placeholder="Search for a topic" aria-label="query" />
  <select name="strategy" aria-label="ranking strategy">${options}</select>
  <button type="submit">Search</button>
  <p class="form-hint" data-role="form-hint" hidden></p>
</form>`;
}

function queryEntityChips(entities: string[]): string {
  if (entities.length === 0) return "";
  const chips = entities
    .map((e) => `<span class="chip" data-entity="${escapeHtml(e)}">${escapeHtml(e)}</span>`)
    .join(" ");
  return `<p class="query-entities">Query entities: ${chips}</p>`;
}

function subScoresHtml(subScores: Record<string, number>): string {
  const parts = Object.entries(subScores).map(
    ([name, value]) =>
      `<span class="sub-score" data-sub="${escapeHtml(name)}">${escapeHtml(name)} ${fmtScore(value)}</span>`,
  );
  return parts.join(" ");
}

function paginationHtml(response: SearchResponse, page: number): string {
  const pages = pageCount(response.results.length);
  if (pages <= 1) return "";
  const current = Math.min(Math.max(page, 1), pages);
  const link = (p: number, label: string, rel: string) =>
    `<a rel="${rel}" href="${escapeHtml(searchHash(response.query, response.strategy, p))}">${label}</a>`;
  const prev = current > 1 ? link(current - 1, "&larr; previous", "prev") : "";
  const next = current < pages ? link(current + 1, "next &rarr;", "next") : "";
  return `<nav class="pagination" aria-label="result pages">
  ${prev}
  <span class="page-status">page ${current} of ${pages}</span>
  ${next}
</nav>`;
}

export function resultsHtml(response: SearchResponse, page: number): string {
  const rows = pageSlice(response.results, page)
    .map((r) => {
      const explainLink = `<a class="result-explain" href="${escapeHtml(
        explainHash(response.query, r.author_id),
      )}">why?</a>`;
      return `<li class="result" data-author="${escapeHtml(r.author_id)}">
  <span class="result-rank">${r.rank}</span>
  <a class="result-name" href="${escapeHtml(authorHash(r.author_id))}">${escapeHtml(r.display_name)}</a>
  <span class="result-score" data-role="score">${fmtScore(r.score)}</span>
  <span class="result-subs">${subScoresHtml(r.sub_scores)}</span>
  ${explainLink}
</li>`;
    })
    .join("\n");
  const count = response.results.length;
  const noun = count === 1 ? "expert" : "experts";
  return `<section class="search-results">
  <h2>${count} ${noun} for &ldquo;${escapeHtml(response.query)}&rdquo;
    <span class="strategy-label">(${escapeHtml(response.strategy)})</span></h2>
  ${queryEntityChips(response.query_entities)}
  <ol class="results">
${rows}
  </ol>
  ${paginationHtml(response, page)}
</section>`;
}

export function noMatchHtml(query: string, detail: string): string {
  return `<section class="no-match" role="status">
  <h2>No topical match</h2>
  <p>&ldquo;${escapeHtml(query)}&rdquo; matched nothing in the index:
  ${escapeHtml(detail)}.</p>
  <p>Try a broader topic or different wording.</p>
</section>`;
}

export function errorBannerHtml(message: string): string {
  return `<div class="banner error" role="alert">
  <p>${escapeHtml(message)}</p>
  <button type="button" data-role="retry">Retry</button>
</div>`;
}

export function notFoundHtml(detail: string): string {
  return `<section class="not-found">
  <h2>Not found</h2>
  <p>${escapeHtml(detail)}</p>
  <p><a href="#/">Back to search</a></p>
</section>`;
}

function documentsHtml(documents: AuthorDocuments): string {
  if (documents.documents.length === 0) {
    return `<p class="empty">No documents on record.</p>`;
  }
  const items = documents.documents
    .map(
      (d) => `<li class="document" data-doc="${escapeHtml(d.doc_id)}">
  <span class="doc-title">${escapeHtml(d.title)}</span>
  <span class="doc-kind">${escapeHtml(d.doc_kind)}</span>
  <span class="doc-id">${escapeHtml(d.doc_id)}</span>
</li>`,
    )
    .join("\n");
  return `<ul class="documents">
${items}
</ul>`;
}

export function profileViewHtml(
  card: AuthorCard,
  profile: AuthorProfilePayload,
  documents: AuthorDocuments,
): string {
  const docsAnchor = `docs-${card.author_id}`;
  let topics: string;
  if (profile.entities.length === 0) {
    topics = `<p class="empty" data-role="empty-profile">This author has an empty
  expertise profile: no known entity survived annotation of their documents.
  Document search still finds them by text.</p>`;
  } else {
    const maxRelevance = Math.max(...profile.entities.map((e) => e.relevance));
    const rows = profile.entities
      .map(
        (e) => `<tr data-entity="${escapeHtml(e.entity_id)}">
  <th scope="row"><a href="#${docsAnchor}">${escapeHtml(e.entity_id)}</a></th>
  <td class="bar-cell"><div class="bar" style="width: ${barWidth(e.relevance, maxRelevance)}%"></div></td>
  <td class="num" data-role="relevance">${fmtScore(e.relevance)}</td>
  <td class="num">${fmtScore(e.rho)}</td>
  <td class="num"><a href="#${docsAnchor}">${e.doc_count} doc${e.doc_count === 1 ? "" : "s"}</a></td>
</tr>`,
      )
      .join("\n");
    topics = `<table class="topics">
  <thead>
    <tr><th>topic</th><th>relevance</th><th class="num">r</th><th class="num">link conf.</th><th class="num">backing</th></tr>
  </thead>
  <tbody>
${rows}
  </tbody>
</table>`;
  }
  const edges =
    profile.edges.length === 0
      ? ""
      : `<details class="edges">
  <summary>${profile.edges.length} relatedness link${profile.edges.length === 1 ? "" : "s"} between topics</summary>
  <table>
    <thead><tr><th>topic</th><th>topic</th><th class="num">relatedness</th></tr></thead>
    <tbody>
${profile.edges
  .map(
    (e) => `<tr><td>${escapeHtml(e.source)}</td><td>${escapeHtml(e.target)}</td><td class="num">${fmtScore(e.weight)}</td></tr>`,
  )
  .join("\n")}
    </tbody>
  </table>
</details>`;
  return `<article class="profile">
  <header>
    <h2>${escapeHtml(card.display_name)} <span class="author-id">${escapeHtml(card.author_id)}</span></h2>
    <p class="profile-stats">${card.document_count} document${card.document_count === 1 ? "" : "s"},
    ${card.entity_count} profile topic${card.entity_count === 1 ? "" : "s"}</p>
  </header>
  <section class="profile-topics">
    <h3>Topics by relevance</h3>
    ${topics}
  </section>
  ${edges}
  <section class="profile-documents" id="${docsAnchor}">
    <h3>Documents</h3>
    ${documentsHtml(documents)}
  </section>
</article>`;
}

function contributionRow(c: EntityContribution): string {
  return `<tr data-entity="${escapeHtml(c.entity_id)}">
  <td>${escapeHtml(c.entity_id)}</td>
  <td class="in-profile">${c.in_profile ? "yes" : "no"}</td>
  <td class="num" data-role="contribution">${fmtScore(c.contribution)}</td>
  <td class="num">${num(c.rho)}</td>
  <td class="num">${c.doc_count === null ? "&ndash;" : c.doc_count}</td>
  <td class="num">${num(c.relevance)}</td>
  <td class="num">${num(c.iaf)}</td>
</tr>`;
}

export function explainViewHtml(payload: ExplainPayload, card: AuthorCard | null): string {
  const explanation = payload.explanation;
  const name = card ? card.display_name : payload.author_id;
  let breakdown: string;
  if (explanation.contributions.length === 0) {
    breakdown = `<p class="empty">The query text links to no known entity, so the
  profile match score is 0. Document search may still rank this author.</p>`;
  } else {
    const rows = explanation.contributions.map(contributionRow).join("\n");
    breakdown = `<table class="contributions">
  <thead>
    <tr><th>query entity</th><th>in profile</th><th class="num">contribution</th>
    <th class="num">link conf.</th><th class="num">docs</th><th class="num">relevance</th><th class="num">iaf</th></tr>
  </thead>
  <tbody>
${rows}
  </tbody>
  <tfoot>
    <tr><th scope="row" colspan="2">profile match score</th>
    <td class="num" data-role="total">${fmtScore(explanation.total)}</td>
    <td colspan="4"></td></tr>
  </tfoot>
</table>`;
  }
  const topEntities =
    explanation.top_entities.length === 0
      ? ""
      : `<section class="top-entities">
  <h3>Author&#39;s top profile topics</h3>
  <ul>
${explanation.top_entities
  .map(
    (t) => `<li data-entity="${escapeHtml(t.entity_id)}">${escapeHtml(t.entity_id)}
  <span class="num">relevance ${fmtScore(t.relevance)}</span>
  <span class="num">link conf. ${t.rho === null ? "&ndash;" : fmtScore(t.rho)}</span></li>`,
  )
  .join("\n")}
  </ul>
</section>`;
  return `<article class="explain">
  <h2>Why <a href="${escapeHtml(authorHash(payload.author_id))}">${escapeHtml(name)}</a>
  matches &ldquo;${escapeHtml(payload.query)}&rdquo;</h2>
  <p class="method">Profile scoring method: <code>${escapeHtml(explanation.method)}</code></p>
  ${breakdown}
  ${topEntities}
  <p><a href="${escapeHtml(searchHash(payload.query, ""))}">Back to results</a></p>
</article>`;
}
