// Match console: query box, top-level category restriction chips, matched
// events/concepts. Toggling a chip and re-running updates results in place
// and keeps the previous run visible so before/after can be compared.

import { ApiClient, ApiError } from "./api.js";
import { QuerySession, RequestSequencer } from "./state.js";
import { banner, clear, clearBanners, el, scoreCell } from "./render.js";
import type { MatchDoc, NodeDoc, ScoredId } from "./types.js";

export class MatchConsole {
  readonly session = new QuerySession();
  private readonly seq = new RequestSequencer();
  private chips: NodeDoc[] = [];
  private names = new Map<string, string>();
  onMatched: (() => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async boot(): Promise<void> {
    const doc = await this.api.tree(undefined, 1);
    this.chips = doc.nodes
      .filter((n) => n.parent !== null && n.kind === "category")
      .sort((a, b) => (a.id < b.id ? -1 : 1));
    for (const node of doc.nodes) this.names.set(node.id, node.name);
    this.render();
  }

  async runMatch(): Promise<void> {
    const request = this.session.matchRequest();
    if (!request.text.trim()) {
      banner(this.root, "info", "type an event query first");
      return;
    }
    const ticket = this.seq.issue();
    try {
      const result = await this.api.match(request);
      if (!this.seq.isCurrent(ticket)) return;
      await this.ensureNames([
        ...result.matched_events.map(([id]) => id),
        ...result.matched_concepts.map(([id]) => id),
      ]);
      if (!this.seq.isCurrent(ticket)) return;
      this.session.recordMatch({ request, result });
      this.render();
    } catch (err) {
      if (!this.seq.isCurrent(ticket)) return;
      this.render();
      if (err instanceof ApiError && err.code === "empty-pool") {
        banner(this.root, "error",
               "no events under the selected categories; widen the restriction chips");
      } else {
        banner(this.root, "error", `match failed: ${(err as Error).message}`,
               () => void this.runMatch());
      }
    }
  }

  /** Resolve any ids missing from the name cache before results render, so
   *  labels are right on first paint. */
  private async ensureNames(ids: string[]): Promise<void> {
    const missing = [...new Set(ids)].filter((id) => !this.names.has(id));
    const nodes = await Promise.all(missing.map((id) => this.api.node(id)));
    for (const node of nodes) this.names.set(node.id, node.name);
  }

  render(): void {
    clearBanners(this.root);
    clear(this.root);

    const form = el("div", "console-form");
    const input = el("input", "query-input") as HTMLInputElement;
    input.type = "text";
    input.placeholder = "event query, e.g. wedding shower";
    input.value = this.session.text;
    input.addEventListener("input", () => {
      this.session.text = input.value;
    });
    const run = el("button", "run-match", "match");
    run.addEventListener("click", () => void this.runMatch());
    form.append(input, run);
    this.root.append(form);

    const chipBox = el("div", "chips");
    for (const chip of this.chips) {
      const button = el("button", "chip", chip.name);
      button.dataset.categoryId = chip.id;
      if (this.session.restriction.has(chip.id)) button.classList.add("chip-on");
      button.addEventListener("click", () => {
        this.session.toggleChip(chip.id);
        this.render();
      });
      chipBox.append(button);
    }
    this.root.append(chipBox);

    if (this.session.lastMatch) {
      this.root.append(this.renderOutcome("current run", this.session.lastMatch.result,
                                          this.session.lastMatch.request.restrict_categories));
    }
    if (this.session.previousMatch) {
      this.root.append(
        this.renderOutcome("previous run", this.session.previousMatch.result,
                           this.session.previousMatch.request.restrict_categories),
      );
    }
  }

  private renderOutcome(title: string, result: MatchDoc,
                        restriction: string[] | undefined): HTMLElement {
    const box = el("div", title === "current run" ? "outcome current" : "outcome previous");
    const label = restriction?.length
      ? `${title} (restricted to: ${restriction.map((c) => this.names.get(c) ?? c).join(", ")})`
      : `${title} (unrestricted)`;
    box.append(el("h3", undefined, label));

    box.append(el("h4", undefined, "matched events"));
    box.append(this.scoredList(result.matched_events, "event"));
    box.append(el("h4", undefined, "matched concepts"));
    box.append(this.scoredList(result.matched_concepts, "concept"));
    if (result.shortage) {
      box.append(el("p", "note", "fewer concepts available than requested"));
    }
    if (result.non_top_level_restrictions.length > 0) {
      box.append(el("p", "note",
                    `non top-level restriction ids: ${result.non_top_level_restrictions.join(", ")}`));
    }
    return box;
  }

  private scoredList(pairs: ScoredId[], kind: string): HTMLElement {
    const list = el("ul", `matched-${kind}s`);
    for (const [id, score] of pairs) {
      const row = el("li", `matched-${kind}`);
      row.dataset.id = id;
      row.append(el("span", "name", this.names.get(id) ?? id), " ", scoreCell(score));
      list.append(row);
    }
    return list;
  }
}
