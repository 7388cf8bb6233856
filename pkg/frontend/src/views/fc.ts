import { ContributionEntry } from "../protocol.js";
import { Scale, linearScale } from "../scales.js";
import { PALETTE } from "../palette.js";
import { FcChartType } from "../state.js";

const MARGIN = { top: 8, right: 8, bottom: 18, left: 30 };

/**
 * Feature-contribution chart for one combo. Contributions are scaled to
 * max |a| = 1 upstream, so the y axis is pinned to [-1, 1]; a full-height
 * peak therefore always means "the most discriminating feature".
 */
export class FcView {
  readonly root: HTMLElement;
  readonly canvas: HTMLCanvasElement;
  private legend: HTMLElement;
  private series = new Map<number, ContributionEntry>(); // cluster_id -> entry
  private hidden = new Set<number>();
  chartType: FcChartType = "bar";
  highlightFeature: number | null = null;
  onFeatureClick: ((featureIndex: number) => void) | null = null;
  onTypeToggle: ((t: FcChartType) => void) | null = null;
  private nFeatures = 0;

  constructor(doc: Document, public readonly comboKey: string) {
    this.root = doc.createElement("div");
    this.root.className = "fc-panel";
    const bar = doc.createElement("div");
    bar.className = "fc-toolbar";
    const toggle = doc.createElement("button");
    toggle.textContent = "line/bar";
    toggle.addEventListener("click", () => {
      this.chartType = this.chartType === "line" ? "bar" : "line";
      this.onTypeToggle?.(this.chartType);
      this.draw();
    });
    bar.append(toggle);
    this.legend = doc.createElement("div");
    this.legend.className = "fc-legend";
    this.canvas = doc.createElement("canvas");
    this.canvas.width = 420;
    this.canvas.height = 160;
    this.canvas.addEventListener("click", (ev: MouseEvent) => {
      const j = this.featureAt(ev.offsetX);
      if (j !== null) this.onFeatureClick?.(j);
    });
    this.root.append(bar, this.canvas, this.legend);
  }

  // Fixed by the scaling contract, independent of the data on display.
  yDomain(): [number, number] {
    return [-1, 1];
  }

  get yScale(): Scale {
    return linearScale(this.yDomain(), [
      this.canvas.height - MARGIN.bottom,
      MARGIN.top,
    ]);
  }

  get xScale(): Scale {
    return linearScale(
      [0, Math.max(1, this.nFeatures - 1)],
      [MARGIN.left, this.canvas.width - MARGIN.right],
    );
  }

  setContributions(entries: ContributionEntry[]): void {
    this.series.clear();
    for (const e of entries) {
      if (e.combo !== this.comboKey) continue;
      this.series.set(e.cluster_id, e);
      this.nFeatures = Math.max(this.nFeatures, e.fc.a.length);
    }
    if (this.series.size === 0) this.nFeatures = 0;
    this.rebuildLegend();
    this.draw();
  }

  visibleSeries(): ContributionEntry[] {
    return [...this.series.values()].filter(
      (e) => !this.hidden.has(e.cluster_id),
    );
  }

  setVisible(clusterId: number, visible: boolean): void {
    if (visible) this.hidden.delete(clusterId);
    else this.hidden.add(clusterId);
    this.draw();
  }

  featureAt(px: number): number | null {
    if (this.nFeatures === 0) return null;
    const j = Math.round(this.xScale.invert(px));
    return j >= 0 && j < this.nFeatures ? j : null;
  }

  private rebuildLegend(): void {
    const doc = this.root.ownerDocument;
    this.legend.textContent = "";
    for (const e of this.series.values()) {
      const label = doc.createElement("label");
      const box = doc.createElement("input");
      box.type = "checkbox";
      box.checked = !this.hidden.has(e.cluster_id);
      box.addEventListener("change", () =>
        this.setVisible(e.cluster_id, box.checked),
      );
      const swatch = doc.createElement("span");
      swatch.className = "swatch";
      swatch.style.background = PALETTE[(e.cluster_id - 1) % PALETTE.length];
      label.append(box, swatch, doc.createTextNode(`Cluster ${e.cluster_id}`));
      this.legend.append(label);
    }
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const sy = this.yScale;
    const sx = this.xScale;
    // zero line plus the +-1 bounds the data can touch but never cross
    ctx.strokeStyle = "#ccc";
    for (const v of [-1, 0, 1]) {
      ctx.beginPath();
      ctx.moveTo(MARGIN.left, sy(v));
      ctx.lineTo(width - MARGIN.right, sy(v));
      ctx.stroke();
    }
    const entries = this.visibleSeries();
    const slot = (sx(1) - sx(0)) / Math.max(1, entries.length + 1);
    entries.forEach((e, k) => {
      const color = PALETTE[(e.cluster_id - 1) % PALETTE.length];
      if (this.chartType === "line") {
        ctx.strokeStyle = color;
        ctx.beginPath();
        e.fc.a.forEach((v, j) => {
          const x = sx(j);
          const y = sy(v);
          j === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
        });
        ctx.stroke();
      } else {
        ctx.fillStyle = color;
        e.fc.a.forEach((v, j) => {
          const x = sx(j) + (k - entries.length / 2) * slot;
          ctx.fillRect(x, Math.min(sy(0), sy(v)), Math.max(1, slot - 1), Math.abs(sy(v) - sy(0)));
        });
      }
    });
    if (this.highlightFeature !== null) {
      ctx.strokeStyle = "#e75480"; // pink marker on the inspected feature
      ctx.beginPath();
      ctx.moveTo(sx(this.highlightFeature), MARGIN.top);
      ctx.lineTo(sx(this.highlightFeature), height - MARGIN.bottom);
      ctx.stroke();
    }
  }
}
