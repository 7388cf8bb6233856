import { SocketLike, WorkbenchClient } from "./client.js";
import {
  AnalysisResultDoc,
  HistogramBody,
  ModeName,
  SelectionBody,
  comboKey,
} from "./protocol.js";
import { ViewState } from "./state.js";
import { TdrView } from "./views/tdr.js";
import { FcView } from "./views/fc.js";
import { HcView } from "./views/hc.js";
import { PmView } from "./views/pm.js";
import { SiView } from "./views/si.js";

const MODES: ModeName[] = ["time", "instance", "variable"];

/**
 * The workbench: five linked views over one server session. Two embedding
 * panels (one per combo of the active point mode), a contribution chart
 * under each, shared histogram, mapping and auxiliary views below.
 */
export class App {
  readonly state = new ViewState();
  readonly client: WorkbenchClient;
  readonly tdr: [TdrView, TdrView];
  fc: [FcView, FcView];
  readonly hc: HcView;
  readonly pm: PmView;
  readonly si: SiView;
  readonly root: HTMLElement;
  private status: HTMLElement;
  private fcSlots: [HTMLElement, HTMLElement];

  constructor(doc: Document, socket: SocketLike) {
    this.client = new WorkbenchClient(socket);
    this.root = doc.createElement("div");
    this.root.className = "workbench";

    const toolbar = doc.createElement("div");
    toolbar.className = "toolbar";
    const modeSel = doc.createElement("select");
    for (const m of MODES) {
      const opt = doc.createElement("option");
      opt.value = m;
      opt.textContent = m;
      if (m === this.state.pointMode) opt.selected = true;
      modeSel.append(opt);
    }
    modeSel.addEventListener("change", () => {
      this.requestResults(modeSel.value as ModeName);
    });
    this.status = doc.createElement("span");
    this.status.className = "status";
    toolbar.append(modeSel, this.status);

    this.tdr = [new TdrView(doc, this.state), new TdrView(doc, this.state)];
    this.fc = [new FcView(doc, ""), new FcView(doc, "")];
    this.hc = new HcView(doc);
    this.pm = new PmView(doc);
    this.si = new SiView(doc);

    const row = doc.createElement("div");
    row.className = "row";
    this.fcSlots = [doc.createElement("div"), doc.createElement("div")];
    for (const side of [0, 1] as const) {
      const col = doc.createElement("div");
      this.fcSlots[side].append(this.fc[side].root);
      col.append(this.tdr[side].root, this.fcSlots[side]);
      row.append(col);
    }
    const bottom = doc.createElement("div");
    bottom.className = "row";
    bottom.append(this.hc.root, this.pm.root, this.si.root);
    this.root.append(toolbar, row, bottom);

    for (const side of [0, 1] as const) {
      this.tdr[side].onSelect = (ids) =>
        this.client.send("select_cluster", { point_ids: ids });
    }
    this.bindClient();
  }

  private bindClient(): void {
    this.client.onProgress((fraction) => {
      this.status.textContent = `computing ${(fraction * 100).toFixed(0)}%`;
    });
    this.client.onError((frame) => {
      this.status.textContent = `error: ${frame.payload.message}`;
    });
    this.client.onResult("load_dataset", (body) => {
      this.state.setDataset(body);
      this.status.textContent = `${body.name} ${body.shape.join("x")}`;
      this.requestResults(this.state.pointMode);
    });
    this.client.onResult("request_results", (body) => {
      this.status.textContent = "";
      this.state.setResults(body.point_mode, body.results);
      this.showResults(body.results);
    });
    this.client.onResult("select_cluster", (body: SelectionBody) => {
      this.state.applySelection(body.clusters, body.contributions);
      for (const view of this.fc) view.setContributions(body.contributions);
      this.si.update(
        this.state.siVariant,
        this.state.pointLabels(),
        this.state.clusters,
      );
      for (const view of this.tdr) view.draw();
    });
    this.client.onResult("remove_cluster", (body: SelectionBody) => {
      this.state.applySelection(body.clusters, body.contributions);
      for (const view of this.fc) view.setContributions(body.contributions);
    });
    this.client.onResult("request_histograms", (body: HistogramBody) => {
      this.hc.setHistograms(body);
    });
  }

  load(path: string): void {
    this.client.send("load_dataset", { path });
  }

  requestResults(pointMode: ModeName, config?: Record<string, unknown>): void {
    this.client.send("request_results", {
      point_mode: pointMode,
      ...(config ? { config } : {}),
    });
  }

  private showResults(results: AnalysisResultDoc[]): void {
    const doc = this.root.ownerDocument;
    results.slice(0, 2).forEach((r, side) => {
      const s = side as 0 | 1;
      this.tdr[s].setResult(r);
      // FC panels are keyed by combo; rebuild when the combo changes
      const key = comboKey(r.combo);
      if (this.fc[s].comboKey !== key) {
        const fresh = new FcView(doc, key);
        fresh.chartType = this.state.defaultFcType(r.combo.second);
        fresh.onFeatureClick = (j) => this.inspectFeature(key, j, r);
        this.fcSlots[s].replaceChildren(fresh.root);
        this.fc[s] = fresh;
      }
      this.pm.setMapping(
        r.compressed.w,
        r.compressed.quality,
        r.combo.first !== "time",
      );
    });
  }

  inspectFeature(key: string, j: number, r: AnalysisResultDoc): void {
    this.state.selectFeature(key, j);
    for (const view of this.fc) {
      view.highlightFeature = view.comboKey === key ? j : null;
      view.draw();
    }
    this.client.send("request_histograms", {
      feature_index: j,
      first: r.combo.first,
      second: r.combo.second,
    });
  }
}

export function mount(doc: Document, host: HTMLElement, url: string): App {
  const socket = new WebSocket(url) as unknown as SocketLike;
  const app = new App(doc, socket);
  host.append(app.root);
  return app;
}
