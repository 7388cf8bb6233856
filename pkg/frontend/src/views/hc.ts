import { HistogramBody } from "../protocol.js";
import { Scale, linearScale } from "../scales.js";
import { PALETTE, REMAINDER } from "../palette.js";

const MARGIN = { top: 8, right: 8, bottom: 18, left: 30 };

/**
 * Overlaid relative-frequency histograms of one Y column: one series per
 * selected cluster plus a gray one for the unselected remainder. Bin edges
 * and the y ceiling come from the payload so overlays stay comparable.
 */
export class HcView {
  readonly root: HTMLElement;
  readonly canvas: HTMLCanvasElement;
  private title: HTMLElement;
  private body: HistogramBody | null = null;

  constructor(doc: Document) {
    this.root = doc.createElement("div");
    this.root.className = "hc-panel";
    this.title = doc.createElement("div");
    this.title.className = "hc-title";
    this.canvas = doc.createElement("canvas");
    this.canvas.width = 420;
    this.canvas.height = 160;
    this.root.append(this.title, this.canvas);
  }

  setHistograms(body: HistogramBody): void {
    this.body = body;
    this.title.textContent = `feature ${body.feature_index}`;
    this.draw();
  }

  // Payload-driven: the ceiling is the server's y_max, never recomputed,
  // so the same selection renders identically everywhere.
  yLimit(): number {
    return this.body ? this.body.y_max : 1;
  }

  get yScale(): Scale {
    return linearScale([0, this.yLimit()], [
      this.canvas.height - MARGIN.bottom,
      MARGIN.top,
    ]);
  }

  get xScale(): Scale {
    const edges = this.body?.bin_edges ?? [0, 1];
    return linearScale(
      [edges[0], edges[edges.length - 1]],
      [MARGIN.left, this.canvas.width - MARGIN.right],
    );
  }

  // Series in draw order: clusters by id, remainder last (when present).
  seriesColors(): string[] {
    if (!this.body) return [];
    const out: string[] = this.body.clusters.map(
      (c) => PALETTE[(c.cluster_id - 1) % PALETTE.length],
    );
    if (this.body.remainder !== null) out.push(REMAINDER);
    return out;
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || !this.body) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const sx = this.xScale;
    const sy = this.yScale;
    const edges = this.body.bin_edges;
    const paint = (freqs: number[], color: string) => {
      ctx.globalAlpha = 0.55;
      ctx.fillStyle = color;
      freqs.forEach((f, i) => {
        const x0 = sx(edges[i]);
        const x1 = sx(edges[i + 1]);
        ctx.fillRect(x0, sy(f), x1 - x0 - 0.5, sy(0) - sy(f));
      });
      ctx.globalAlpha = 1;
    };
    for (const c of this.body.clusters) {
      paint(c.frequencies, PALETTE[(c.cluster_id - 1) % PALETTE.length]);
    }
    if (this.body.remainder !== null) paint(this.body.remainder, REMAINDER);
    ctx.strokeStyle = "#888";
    ctx.strokeRect(MARGIN.left, MARGIN.top, width - MARGIN.left - MARGIN.right, height - MARGIN.top - MARGIN.bottom);
  }
}
