// Wires the explorer, match console and result panels onto the page.
// Configuration: service base URL via ?api=<url> (default localhost:8000).

import { ApiClient } from "./api.js";
import { MatchConsole } from "./console.js";
import { RecountPanel, RetrievalPanel } from "./panels.js";
import { TreeExplorer } from "./tree.js";

export interface App {
  explorer: TreeExplorer;
  console: MatchConsole;
  retrieval: RetrievalPanel;
  recount: RecountPanel;
}

export async function mountApp(document: Document, baseUrl: string): Promise<App> {
  const api = new ApiClient(baseUrl);
  const byId = (id: string) => {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing #${id} container`);
    return node as HTMLElement;
  };

  const matchConsole = new MatchConsole(api, byId("console"));
  const explorer = new TreeExplorer(api, byId("tree"), byId("detail"));
  const retrieval = new RetrievalPanel(api, byId("retrieval"), matchConsole.session);
  const recount = new RecountPanel(api, byId("recount"), matchConsole.session);

  const health = await api.health();
  if (health.corpora.length > 0) {
    matchConsole.session.corpus = health.corpora[0];
    explorer.setCorpus(health.corpora[0]);
  }
  const status = byId("status");
  status.textContent =
    `${health.ontology.event_count} events / ${health.ontology.concept_count} concepts` +
    (matchConsole.session.corpus ? `, corpus: ${matchConsole.session.corpus}` : ", no corpus");

  retrieval.onVideoSelected = (videoId) => void recount.show(videoId);
  matchConsole.onMatched = () => retrieval.render();

  await matchConsole.boot();
  await explorer.boot();
  retrieval.render();
  recount.render();
  return { explorer, console: matchConsole, retrieval, recount };
}

declare global {
  interface Window {
    videxApp?: Promise<App>;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined"
    && document.getElementById("console")) {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("api") ?? "http://127.0.0.1:8000";
  window.videxApp = mountApp(document, baseUrl);
}
