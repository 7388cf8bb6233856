import {
  AnalysisResultDoc,
  ClusterDoc,
  ContributionEntry,
  DatasetSummary,
  ModeName,
} from "./protocol.js";
import { colorIndexFor } from "./palette.js";

export type FcChartType = "line" | "bar";
export type SiVariant = "time-strip" | "label-list";

/**
 * Shared state behind the five linked views.
 *
 * One instance is the single source of truth: panels read from it and every
 * server reply is folded into it, so cluster colors and the selected
 * feature stay consistent everywhere. Holds no DOM.
 */
export class ViewState {
  dataset: DatasetSummary | null = null;
  pointMode: ModeName = "instance";
  results: AnalysisResultDoc[] = [];
  clusters: ClusterDoc[] = [];
  // contributions[cluster_id][combo_key]
  contributions = new Map<number, Map<string, ContributionEntry>>();
  fcChartType: [FcChartType, FcChartType] = ["line", "line"];
  // the FC feature whose histograms are on display, bound to one combo
  selectedFeature: { comboKey: string; index: number } | null = null;
  private listeners: (() => void)[] = [];

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  get siVariant(): SiVariant {
    // calendar strip for temporal points, plain label list otherwise
    return this.pointMode === "time" ? "time-strip" : "label-list";
  }

  setDataset(summary: DatasetSummary): void {
    this.dataset = summary;
    this.results = [];
    this.clusters = [];
    this.contributions.clear();
    this.selectedFeature = null;
    this.emit();
  }

  setResults(pointMode: ModeName, results: AnalysisResultDoc[]): void {
    this.pointMode = pointMode;
    this.results = results;
    const sel = this.selectedFeature;
    if (sel !== null && !this.featureValid(sel.comboKey, sel.index)) {
      this.selectedFeature = null;
    }
    this.emit();
  }

  // Feature indices address Y columns, i.e. the combo's second mode.
  featureValid(comboKey: string, index: number): boolean {
    return this.results.some(
      (r) =>
        `${r.combo.first}-${r.combo.second}` === comboKey &&
        index >= 0 &&
        index < r.compressed.shape[1],
    );
  }

  selectFeature(comboKey: string, index: number): void {
    if (!this.featureValid(comboKey, index)) {
      throw new Error(`feature ${index} out of range for combo ${comboKey}`);
    }
    this.selectedFeature = { comboKey, index };
    this.emit();
  }

  applySelection(clusters: ClusterDoc[], entries: ContributionEntry[]): void {
    for (const c of clusters) {
      if (c.color_index !== colorIndexFor(c.cluster_id)) {
        throw new Error(
          `server color_index ${c.color_index} breaks the palette rule for cluster ${c.cluster_id}`,
        );
      }
    }
    this.clusters = clusters;
    this.contributions.clear();
    for (const e of entries) {
      const per = this.contributions.get(e.cluster_id) ?? new Map();
      per.set(e.combo, e);
      this.contributions.set(e.cluster_id, per);
    }
    this.emit();
  }

  clusterOf(pointId: number): ClusterDoc | null {
    for (const c of this.clusters) {
      if (c.member_rows.includes(pointId)) return c;
    }
    return null;
  }

  setFcChartType(panel: 0 | 1, t: FcChartType): void {
    this.fcChartType[panel] = t;
    this.emit();
  }

  pointLabels(): string[] {
    if (!this.dataset) return [];
    if (this.pointMode === "time") return this.dataset.time_labels;
    if (this.pointMode === "instance") return this.dataset.instance_labels;
    return this.dataset.variable_labels;
  }

  // Default per the charting convention: contributions over time features
  // read as curves, everything else as bars. FC entries index Y's columns,
  // which is the combo's second mode.
  defaultFcType(comboSecond: ModeName): FcChartType {
    return comboSecond === "time" ? "line" : "bar";
  }
}
