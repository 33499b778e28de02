// Retrieval and recounting panels. The retrieval panel ranks the loaded
// corpus for the console's current query; clicking a video recounts it
// (top-5 concepts as evidence). Numbers are rendered verbatim from the
// service responses; stale responses are dropped by sequence number.

import { ApiClient, ApiError } from "./api.js";
import { QuerySession, RequestSequencer } from "./state.js";
import { banner, clear, clearBanners, el, scoreCell } from "./render.js";

export class RetrievalPanel {
  private readonly seq = new RequestSequencer();
  onVideoSelected: ((videoId: string) => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly session: QuerySession,
  ) {}

  async run(): Promise<void> {
    if (!this.session.corpus) {
      banner(this.root, "info", "no corpus loaded server-side");
      return;
    }
    const request = {
      corpus: this.session.corpus,
      query: this.session.matchRequest(),
    };
    const ticket = this.seq.issue();
    try {
      const result = await this.api.retrieve(request);
      if (!this.seq.isCurrent(ticket)) return;
      this.session.lastRetrieval = { request, result };
      this.render();
    } catch (err) {
      if (!this.seq.isCurrent(ticket)) return;
      this.render();
      const message =
        err instanceof ApiError ? `${err.code}: ${err.message}` : (err as Error).message;
      banner(this.root, "error", `retrieval failed: ${message}`, () => void this.run());
    }
  }

  render(): void {
    clearBanners(this.root);
    clear(this.root);
    const head = el("div", "panel-head");
    head.append(el("h3", undefined, "retrieval"));
    const run = el("button", "run-retrieve", "rank corpus");
    run.addEventListener("click", () => void this.run());
    head.append(run);
    this.root.append(head);

    const outcome = this.session.lastRetrieval;
    if (!outcome) return;
    this.root.append(
      el("p", "note", `corpus ${outcome.result.corpus}, query "${outcome.request.query.text}"`),
    );
    const list = el("ol", "ranking");
    for (const [videoId, score] of outcome.result.ranking) {
      const row = el("li", "ranked-video");
      row.dataset.videoId = videoId;
      const link = el("button", "video-link", videoId);
      link.addEventListener("click", () => this.onVideoSelected?.(videoId));
      row.append(link, " ", scoreCell(score));
      list.append(row);
    }
    this.root.append(list);
  }
}

export class RecountPanel {
  private readonly seq = new RequestSequencer();
  topN = 5;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly session: QuerySession,
  ) {}

  async show(videoId: string): Promise<void> {
    if (!this.session.corpus) return;
    const request = { corpus: this.session.corpus, video_id: videoId, top_n: this.topN };
    const ticket = this.seq.issue();
    try {
      const result = await this.api.recount(request);
      if (!this.seq.isCurrent(ticket)) return;
      this.session.lastRecount = { request, result };
      this.render();
    } catch (err) {
      if (!this.seq.isCurrent(ticket)) return;
      this.render();
      const message =
        err instanceof ApiError ? `${err.code}: ${err.message}` : (err as Error).message;
      banner(this.root, "error", `recount failed: ${message}`);
    }
  }

  render(): void {
    clearBanners(this.root);
    clear(this.root);
    this.root.append(el("h3", undefined, "recounting"));
    const outcome = this.session.lastRecount;
    if (!outcome) {
      this.root.append(el("p", "hint", "pick a video from the ranking"));
      return;
    }
    this.root.append(el("p", "note", `top concepts detected in ${outcome.result.video_id}`));
    const list = el("ul", "recount");
    for (const entry of outcome.result.entries) {
      const row = el("li", "recount-entry");
      row.dataset.conceptId = entry.concept_id;
      row.append(
        el("span", "name", entry.concept_name),
        el("span", "event", ` (event: ${entry.event_name}) `),
        scoreCell(entry.score),
      );
      list.append(row);
    }
    this.root.append(list);
  }
}
