// Lazy-loading tree explorer. Expanding a node fetches one level of
// children; selecting an event lists its concepts and, when a corpus is
// loaded, its top videos (scored server-side from the event's concepts).

import { ApiClient } from "./api.js";
import { RequestSequencer, TreeViewState } from "./state.js";
import { banner, clear, clearBanners, el, scoreCell } from "./render.js";
import type { NodeDoc } from "./types.js";

export class TreeExplorer {
  readonly state = new TreeViewState();
  private readonly detailSeq = new RequestSequencer();
  onEventSelected: ((node: NodeDoc) => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
    private readonly detail: HTMLElement,
    private corpus: string | null = null,
  ) {}

  setCorpus(name: string | null): void {
    this.corpus = name;
  }

  async boot(): Promise<void> {
    try {
      const doc = await this.api.tree(undefined, 1);
      this.state.absorb(doc.nodes);
      this.state.expanded.add(doc.root);
      this.render();
    } catch (err) {
      banner(this.container, "error", `failed to load tree: ${(err as Error).message}`,
             () => void this.boot());
    }
  }

  async expand(id: string): Promise<void> {
    const nowExpanded = this.state.toggle(id);
    if (nowExpanded) {
      try {
        const doc = await this.api.tree(id, 1);
        this.state.absorb(doc.nodes);
      } catch (err) {
        this.state.toggle(id);
        banner(this.container, "error", `failed to expand: ${(err as Error).message}`,
               () => void this.expand(id));
        return;
      }
    }
    this.render();
  }

  async select(id: string): Promise<void> {
    this.state.select(id);
    const node = this.state.cache.get(id)!;
    this.render();
    if (node.kind === "event") {
      this.onEventSelected?.(node);
      await this.renderEventDetail(node);
    } else {
      clear(this.detail);
      this.detail.append(el("p", "hint", `${node.kind}: ${node.name}`));
    }
  }

  /** Concepts of the event plus, when a corpus is loaded, its top videos. */
  private async renderEventDetail(node: NodeDoc): Promise<void> {
    const ticket = this.detailSeq.issue();
    const doc = await this.api.tree(node.id, 1);
    if (!this.detailSeq.isCurrent(ticket)) return;
    this.state.absorb(doc.nodes);
    clear(this.detail);
    this.detail.append(el("h3", undefined, node.name));
    const list = el("ul", "concepts");
    for (const child of doc.nodes.filter((n) => n.parent === node.id)) {
      list.append(el("li", "concept", child.name));
    }
    this.detail.append(el("h4", undefined, "concepts"), list);

    if (this.corpus) {
      const concepts = doc.nodes.filter((n) => n.parent === node.id).map((n) => n.id);
      const result = await this.api.retrieve({ corpus: this.corpus, concepts });
      if (!this.detailSeq.isCurrent(ticket)) return;
      const table = el("ul", "videos");
      for (const [videoId, score] of result.ranking.slice(0, 5)) {
        const row = el("li", "video-row");
        row.dataset.videoId = videoId;
        row.append(el("span", "video-id", videoId), " ", scoreCell(score));
        table.append(row);
      }
      this.detail.append(el("h4", undefined, "top videos"), table);
    }
  }

  render(): void {
    clearBanners(this.container);
    clear(this.container);
    const roots = [...this.state.cache.values()].filter((n) => n.parent === null);
    for (const root of roots) this.container.append(this.renderNode(root));
  }

  private renderNode(node: NodeDoc): HTMLElement {
    const item = el("div", `tree-node kind-${node.kind}`);
    item.dataset.nodeId = node.id;

    const row = el("div", "tree-row");
    if (node.kind !== "concept") {
      const toggle = el("button", "tree-toggle",
                        this.state.expanded.has(node.id) ? "−" : "+");
      toggle.addEventListener("click", () => void this.expand(node.id));
      row.append(toggle);
    }
    const label = el("span", "tree-label", node.name);
    if (this.state.selected === node.id) label.classList.add("selected");
    label.addEventListener("click", () => void this.select(node.id));
    row.append(label);
    item.append(row);

    if (this.state.expanded.has(node.id)) {
      const childBox = el("div", "tree-children");
      for (const childId of node.children) {
        const child = this.state.cache.get(childId);
        if (child) childBox.append(this.renderNode(child));
      }
      item.append(childBox);
    }
    return item;
  }
}
