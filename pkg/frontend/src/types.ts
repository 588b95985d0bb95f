// Shapes of the /api payloads, mirrored field for field.

export interface StrategyInfo {
  strategies: string[];
  default: string;
  scheme: string;
  profile_method: string;
  fusion_method: string;
}

export interface EntityContribution {
  entity_id: string;
  contribution: number;
  in_profile: boolean;
  rho: number | null;
  doc_count: number | null;
  relevance: number | null;
  iaf: number | null;
}

export interface TopEntity {
  entity_id: string;
  relevance: number;
  rho: number | null;
}

export interface Explanation {
  query_entities: string[];
  method: string;
  contributions: EntityContribution[];
  top_entities: TopEntity[];
  total: number;
}

export interface SearchResult {
  author_id: string;
  display_name: string;
  score: number;
  rank: number;
  sub_scores: Record<string, number>;
  explanation: Explanation | null;
}

export interface SearchResponse {
  query: string;
  strategy: string;
  query_entities: string[];
  results: SearchResult[];
}

export interface AuthorCard {
  author_id: string;
  display_name: string;
  document_count: number;
  entity_count: number;
  top_entities: { entity_id: string; relevance: number }[];
}

export interface ProfileEntity {
  entity_id: string;
  relevance: number;
  rho: number;
  doc_count: number;
}

export interface ProfileEdge {
  source: string;
  target: string;
  weight: number;
}

export interface AuthorProfilePayload {
  author_id: string;
  display_name: string;
  entities: ProfileEntity[];
  edges: ProfileEdge[];
}

export interface DocumentRecord {
  doc_id: string;
  title: string;
  body: string;
  doc_kind: string;
  author_ids: string[];
}

export interface AuthorDocuments {
  author_id: string;
  documents: DocumentRecord[];
}

export interface ExplainPayload {
  query: string;
  author_id: string;
  explanation: Explanation;
}
