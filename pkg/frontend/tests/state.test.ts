// Pure state-machine behavior: chip round-tripping at the session level,
// stale-response discard by sequence number, tree-state invariants.

import { describe, expect, it } from "vitest";
import { QuerySession, RequestSequencer, TreeViewState } from "../src/state.js";
import type { NodeDoc } from "../src/types.js";

const node = (id: string, parent: string | null = null): NodeDoc => ({
  id,
  name: id,
  kind: "category",
  parent,
  children: [],
});

describe("QuerySession", () => {
  it("chips map exactly onto restrict_categories, sorted", () => {
    const session = new QuerySession();
    session.text = "x";
    session.toggleChip("c09");
    session.toggleChip("c01");
    expect(session.matchRequest().restrict_categories).toEqual(["c01", "c09"]);
    session.toggleChip("c09");
    expect(session.matchRequest().restrict_categories).toEqual(["c01"]);
    session.toggleChip("c01");
    expect(session.matchRequest().restrict_categories).toBeUndefined();
  });

  it("remembers the previous match for comparison", () => {
    const session = new QuerySession();
    const outcome = (text: string) => ({
      request: { text },
      result: {
        matched_events: [],
        matched_concepts: [],
        restricted: false,
        shortage: false,
        non_top_level_restrictions: [],
      },
    });
    session.recordMatch(outcome("one"));
    session.recordMatch(outcome("two"));
    expect(session.lastMatch!.request.text).toBe("two");
    expect(session.previousMatch!.request.text).toBe("one");
  });
});

describe("RequestSequencer", () => {
  it("discards responses superseded by a newer request", () => {
    const seq = new RequestSequencer();
    const first = seq.issue();
    const second = seq.issue();
    // the slow first response arrives after the second was issued
    expect(seq.isCurrent(first)).toBe(false);
    expect(seq.isCurrent(second)).toBe(true);
  });
});

describe("TreeViewState", () => {
  it("only known nodes can be expanded or selected", () => {
    const state = new TreeViewState();
    state.absorb([node("root"), node("child", "root")]);
    expect(state.toggle("root")).toBe(true);
    expect(state.toggle("root")).toBe(false);
    state.select("child");
    expect(state.selected).toBe("child");
    expect(() => state.toggle("ghost")).toThrow("unknown node");
    expect(() => state.select("ghost")).toThrow("unknown node");
  });
});
