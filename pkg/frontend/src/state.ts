// Client-side view state. Two rules hold everywhere:
//  1. results are always stored next to the exact request that produced
//     them, so any rendered number is traceable to one service response;
//  2. each panel has one in-flight request at a time, and responses that
//     were superseded by a newer request are discarded by sequence number.

import type { MatchDoc, MatchRequest, NodeDoc, RecountDoc, RetrieveDoc } from "./types.js";

export class TreeViewState {
  readonly expanded = new Set<string>();
  selected: string | null = null;
  readonly cache = new Map<string, NodeDoc>();

  absorb(nodes: NodeDoc[]): void {
    for (const node of nodes) this.cache.set(node.id, node);
  }

  toggle(id: string): boolean {
    if (!this.cache.has(id)) throw new Error(`unknown node ${id}`);
    if (this.expanded.has(id)) {
      this.expanded.delete(id);
      return false;
    }
    this.expanded.add(id);
    return true;
  }

  select(id: string): void {
    if (!this.cache.has(id)) throw new Error(`unknown node ${id}`);
    this.selected = id;
  }
}

export interface MatchOutcome {
  request: MatchRequest;
  result: MatchDoc;
}

export interface RetrieveOutcome {
  request: { corpus: string; query: MatchRequest };
  result: RetrieveDoc;
}

export interface RecountOutcome {
  request: { corpus: string; video_id: string; top_n: number };
  result: RecountDoc;
}

export class QuerySession {
  text = "";
  readonly restriction = new Set<string>();
  eventCount = 2;
  conceptCount = 15;
  corpus: string | null = null;

  lastMatch: MatchOutcome | null = null;
  previousMatch: MatchOutcome | null = null;
  lastRetrieval: RetrieveOutcome | null = null;
  lastRecount: RecountOutcome | null = null;

  toggleChip(categoryId: string): boolean {
    if (this.restriction.has(categoryId)) {
      this.restriction.delete(categoryId);
      return false;
    }
    this.restriction.add(categoryId);
    return true;
  }

  /** The /match body for the current console state; chips map 1:1 into
   *  restrict_categories (sorted for determinism). */
  matchRequest(): MatchRequest {
    const request: MatchRequest = {
      text: this.text,
      event_count: this.eventCount,
      concept_count: this.conceptCount,
    };
    if (this.restriction.size > 0) {
      request.restrict_categories = [...this.restriction].sort();
    }
    return request;
  }

  recordMatch(outcome: MatchOutcome): void {
    this.previousMatch = this.lastMatch;
    this.lastMatch = outcome;
  }
}

/** Monotonically increasing ticket per panel; a response is applied only if
 *  its ticket is still the newest one issued. */
export class RequestSequencer {
  private counter = 0;

  issue(): number {
    return ++this.counter;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.counter;
  }
}
