/** App wiring: fetch payloads, keep one ViewState, route clicks between the
 * landscape, trend panel, graph filter, and search. */

import { ApiClient, ApiError } from "./api.js";
import { buildLandscapeModel, renderErrorBanner, renderLandscape } from "./landscape.js";
import { renderGraph } from "./graphView.js";
import { renderHits, renderValidation, validateQuery } from "./searchPanel.js";
import { renderTrendPanel } from "./trendPanel.js";
import { SequenceGate } from "./seq.js";
import {
  initialState,
  selectCluster,
  setK,
  setQueryText,
  setTauView,
  switchDomain,
  type ViewState,
} from "./state.js";
import type {
  ClustersPayload,
  GraphPayload,
  PointsPayload,
  SchemaError,
  TrendsPayload,
} from "./types.js";

interface Elements {
  landscape: HTMLElement;
  trend: HTMLElement;
  graph: HTMLElement;
  hits: HTMLElement;
  domainSelect: HTMLSelectElement;
  queryInput: HTMLInputElement;
  kSlider: HTMLInputElement;
  tauSlider: HTMLInputElement;
  searchButton: HTMLButtonElement;
}

export class ExplorerApp {
  private state: ViewState;
  private points: PointsPayload | null = null;
  private clusters: ClustersPayload | null = null;
  private trends: TrendsPayload | null = null;
  private graphDoc: GraphPayload | null = null;
  private highlighted = new Set<string>();
  private recenterOn: string | null = null;
  private searchGate = new SequenceGate();
  private landscapeGate = new SequenceGate();

  constructor(
    private readonly api: ApiClient,
    private readonly el: Elements,
    defaultDomain: string,
  ) {
    this.state = initialState(defaultDomain, 0);
  }

  async start(): Promise<void> {
    this.el.searchButton.addEventListener("click", () => void this.runSearch());
    this.el.kSlider.addEventListener("change", () => {
      this.state = setK(this.state, Number(this.el.kSlider.value));
      void this.runSearch();
    });
    this.el.tauSlider.addEventListener("input", () => {
      this.state = setTauView(this.state, Number(this.el.tauSlider.value));
      this.renderGraphView();
    });
    this.el.domainSelect.addEventListener("change", () => {
      this.state = switchDomain(this.state, this.el.domainSelect.value);
      void this.loadDomain();
    });
    await this.loadDomain();
    await this.loadGraph();
  }

  async loadDomain(): Promise<void> {
    const token = this.landscapeGate.begin();
    try {
      const [points, clusters, trends] = await Promise.all([
        this.api.points(this.state.activeDomain),
        this.api.clusters(this.state.activeDomain),
        this.api.trends(this.state.activeDomain),
      ]);
      if (!this.landscapeGate.isCurrent(token)) return; // stale response
      this.points = points;
      this.clusters = clusters;
      this.trends = trends;
      this.highlighted = new Set();
      this.recenterOn = null;
      this.renderLandscapeView();
      renderTrendPanel(this.el.trend, null);
    } catch (err) {
      if (!this.landscapeGate.isCurrent(token)) return;
      renderErrorBanner(this.el.landscape, this.describe(err));
    }
  }

  async loadGraph(): Promise<void> {
    try {
      this.graphDoc = await this.api.graph();
      this.state = setTauView(this.state, this.graphDoc.tau);
      this.el.tauSlider.min = "-1";
      this.el.tauSlider.max = "1";
      this.el.tauSlider.step = "0.01";
      this.el.tauSlider.value = String(this.graphDoc.tau);
      this.renderGraphView();
    } catch (err) {
      renderErrorBanner(this.el.graph, this.describe(err));
    }
  }

  renderLandscapeView(): void {
    if (!this.points || !this.clusters) return;
    const model = buildLandscapeModel(this.points, this.clusters);
    renderLandscape(
      this.el.landscape,
      model,
      { onSelectCluster: (c) => this.onSelectCluster(c) },
      this.highlighted,
      this.recenterOn,
    );
  }

  renderGraphView(): void {
    if (!this.graphDoc) return;
    renderGraph(this.el.graph, this.graphDoc, this.state.graphTauView);
  }

  onSelectCluster(cluster: number): void {
    const delivered = (this.clusters?.clusters ?? []).map((c) => c.cluster_index);
    this.state = selectCluster(this.state, cluster, delivered);
    const panel =
      this.trends?.report.clusters.find((p) => p.cluster_index === cluster) ?? null;
    renderTrendPanel(this.el.trend, panel);
  }

  async runSearch(): Promise<void> {
    this.state = setQueryText(this.state, this.el.queryInput.value);
    const problem = validateQuery(this.state.queryText);
    if (problem !== null) {
      renderValidation(this.el.hits, problem); // no request leaves the browser
      return;
    }
    const token = this.searchGate.begin();
    try {
      const payload = await this.api.search(
        this.state.queryText,
        this.state.k,
        this.state.activeDomain,
      );
      if (!this.searchGate.isCurrent(token)) return; // stale response
      renderHits(this.el.hits, payload.hits, {
        onPickHit: (paperId) => {
          this.recenterOn = paperId;
          this.renderLandscapeView();
        },
      });
      this.highlighted = new Set(payload.hits.map((h) => h.paper_id));
      this.renderLandscapeView();
    } catch (err) {
      if (!this.searchGate.isCurrent(token)) return;
      renderValidation(this.el.hits, this.describe(err));
    }
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) {
      return `Server said (${err.status}): ${err.message}`;
    }
    if ((err as SchemaError)?.name === "SchemaError") {
      return `Payload schema mismatch: ${(err as Error).message}`;
    }
    return `Unexpected error: ${String(err)}`;
  }
}

export function mount(root: Document, baseUrl: string, domain: string): ExplorerApp {
  const byId = (id: string) => {
    const node = root.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node;
  };
  const app = new ExplorerApp(
    new ApiClient(baseUrl),
    {
      landscape: byId("landscape"),
      trend: byId("trend-panel"),
      graph: byId("graph-view"),
      hits: byId("search-hits"),
      domainSelect: byId("domain-select") as HTMLSelectElement,
      queryInput: byId("query-input") as HTMLInputElement,
      kSlider: byId("k-slider") as HTMLInputElement,
      tauSlider: byId("tau-slider") as HTMLInputElement,
      searchButton: byId("search-button") as HTMLButtonElement,
    },
    domain,
  );
  void app.start();
  return app;
}
