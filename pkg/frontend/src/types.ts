// Response schemas, mirroring the server's canonical JSON documents 1:1.
// The UI never computes scores of its own; every number rendered comes
// verbatim out of one of these documents.

export type NodeKind = "category" | "event" | "concept";

export interface StatsDoc {
  category_count: number;
  event_count: number;
  concept_count: number;
  max_depth: number;
  avg_children_per_category: number;
  events_per_top_category: Record<string, number>;
}

export interface NodeDoc {
  id: string;
  name: string;
  kind: NodeKind;
  parent: string | null;
  children: string[];
}

export interface TreeDoc {
  root: string;
  depth: number;
  nodes: NodeDoc[];
}

export interface HealthDoc {
  status: string;
  ontology: StatsDoc;
  corpora: string[];
}

export type ScoredId = [string, number];

export interface MatchDoc {
  matched_events: ScoredId[];
  matched_concepts: ScoredId[];
  restricted: boolean;
  shortage: boolean;
  non_top_level_restrictions: string[];
}

export interface MatchRequest {
  text: string;
  restrict_categories?: string[];
  event_count?: number;
  concept_count?: number;
}

export interface RetrieveRequest {
  corpus: string;
  query?: MatchRequest;
  concepts?: string[];
  weighted?: boolean;
}

export interface RetrieveDoc {
  corpus: string;
  ranking: ScoredId[];
  match: MatchDoc | null;
}

export interface RecountRequest {
  corpus: string;
  video_id: string;
  top_n?: number;
  mode?: "plain" | "two-step";
  top_events?: number;
}

export interface RecountEntryDoc {
  concept_id: string;
  concept_name: string;
  event_id: string;
  event_name: string;
  score: number;
}

export interface RecountDoc {
  video_id: string;
  mode: string;
  entries: RecountEntryDoc[];
}

export interface CorpusInfo {
  name: string;
  video_count: number;
  concept_count: number;
}

export interface CorporaDoc {
  corpora: CorpusInfo[];
}

export interface ErrorDoc {
  code: string;
  message: string;
  detail: Record<string, unknown>;
}
