import { AnalysisResultDoc, comboKey, decodeZ } from "../protocol.js";
import { Scale, extent, linearScale, padded } from "../scales.js";
import { Lasso, Pt, pointsInside } from "../lasso.js";
import { PALETTE, UNSELECTED } from "../palette.js";
import { ViewState } from "../state.js";

const POINT_RADIUS = 2.5;
const MIN_LASSO_POINTS = 2;

/**
 * One scatterplot panel of the embedding. Canvas-backed so tens of
 * thousands of points stay interactive; zoom with the wheel, pan by
 * dragging, hold shift (or use the toolbar toggle) to lasso a cluster.
 */
export class TdrView {
  readonly root: HTMLElement;
  readonly canvas: HTMLCanvasElement;
  private caption: HTMLElement;
  private note: HTMLElement;
  private state: ViewState;
  private result: AnalysisResultDoc | null = null;
  private xs = new Float64Array(0);
  private ys = new Float64Array(0);
  private sx: Scale = linearScale([0, 1], [0, 1]);
  private sy: Scale = linearScale([0, 1], [0, 1]);
  private zoom = 1;
  private panX = 0;
  private panY = 0;
  private lasso = new Lasso();
  lassoMode = false;
  onSelect: ((pointIds: number[]) => void) | null = null;

  constructor(doc: Document, state: ViewState) {
    this.state = state;
    this.root = doc.createElement("div");
    this.root.className = "tdr-panel";
    this.caption = doc.createElement("div");
    this.caption.className = "tdr-caption";
    this.canvas = doc.createElement("canvas");
    this.canvas.width = 420;
    this.canvas.height = 360;
    this.note = doc.createElement("div");
    this.note.className = "tdr-note";
    this.root.append(this.caption, this.canvas, this.note);
    this.bindPointer();
    state.onChange(() => this.draw());
  }

  setResult(result: AnalysisResultDoc): void {
    this.result = result;
    const z = decodeZ(result.embedding);
    const n = z.length / 2;
    this.xs = new Float64Array(n);
    this.ys = new Float64Array(n);
    for (let i = 0; i < n; i++) {
      this.xs[i] = z[2 * i];
      this.ys[i] = z[2 * i + 1];
    }
    this.zoom = 1;
    this.panX = 0;
    this.panY = 0;
    this.rescale();
    const trust = result.embedding.trustworthiness;
    this.caption.textContent =
      `${comboKey(result.combo)} (${n} points` +
      (trust === null ? ")" : `, trustworthiness ${trust.toFixed(2)})`);
    this.note.textContent = "";
    this.draw();
  }

  get comboKey(): string {
    return this.result ? comboKey(this.result.combo) : "";
  }

  private rescale(): void {
    const ex = padded(extent(this.xs));
    const ey = padded(extent(this.ys));
    const cx = (ex[0] + ex[1]) / 2 + this.panX;
    const cy = (ey[0] + ey[1]) / 2 + this.panY;
    const hx = ((ex[1] - ex[0]) / 2) / this.zoom;
    const hy = ((ey[1] - ey[0]) / 2) / this.zoom;
    this.sx = linearScale([cx - hx, cx + hx], [0, this.canvas.width]);
    // y flipped: data up is screen up
    this.sy = linearScale([cy - hy, cy + hy], [this.canvas.height, 0]);
  }

  screenXY(i: number): Pt {
    return { x: this.sx(this.xs[i]), y: this.sy(this.ys[i]) };
  }

  zoomBy(factor: number): void {
    this.zoom = Math.min(200, Math.max(0.1, this.zoom * factor));
    this.rescale();
    this.draw();
  }

  panBy(dxPx: number, dyPx: number): void {
    const one = this.sx.invert(1) - this.sx.invert(0);
    this.panX -= dxPx * one;
    this.panY += dyPx * one;
    this.rescale();
    this.draw();
  }

  // Lasso path in screen coordinates; called by pointer handlers and tests.
  lassoComplete(poly: Pt[]): void {
    const px = new Float64Array(this.xs.length);
    const py = new Float64Array(this.ys.length);
    for (let i = 0; i < this.xs.length; i++) {
      px[i] = this.sx(this.xs[i]);
      py[i] = this.sy(this.ys[i]);
    }
    const ids = pointsInside(poly, px, py);
    if (ids.length < MIN_LASSO_POINTS) {
      // below the session minimum: complain locally, send nothing
      this.note.textContent = "select at least 2 points";
      return;
    }
    this.note.textContent = "";
    this.onSelect?.(ids);
  }

  private bindPointer(): void {
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    this.canvas.addEventListener("mousedown", (ev: MouseEvent) => {
      if (this.lassoMode || ev.shiftKey) {
        this.lasso.start({ x: ev.offsetX, y: ev.offsetY });
      } else {
        dragging = true;
        lastX = ev.offsetX;
        lastY = ev.offsetY;
      }
    });
    this.canvas.addEventListener("mousemove", (ev: MouseEvent) => {
      if (this.lasso.active) {
        this.lasso.extend({ x: ev.offsetX, y: ev.offsetY });
        this.draw();
      } else if (dragging) {
        this.panBy(ev.offsetX - lastX, ev.offsetY - lastY);
        lastX = ev.offsetX;
        lastY = ev.offsetY;
      }
    });
    this.canvas.addEventListener("mouseup", () => {
      if (this.lasso.active) {
        this.lassoComplete(this.lasso.finish());
        this.draw();
      }
      dragging = false;
    });
    this.canvas.addEventListener("wheel", (ev: WheelEvent) => {
      ev.preventDefault();
      this.zoomBy(ev.deltaY < 0 ? 1.15 : 1 / 1.15);
    });
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || !this.result) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    for (let i = 0; i < this.xs.length; i++) {
      const cluster = this.state.clusterOf(i);
      ctx.fillStyle =
        cluster === null ? UNSELECTED : PALETTE[cluster.color_index];
      ctx.beginPath();
      ctx.arc(this.sx(this.xs[i]), this.sy(this.ys[i]), POINT_RADIUS, 0, 2 * Math.PI);
      ctx.fill();
    }
    if (this.lasso.active && this.lasso.polygon.length > 1) {
      ctx.strokeStyle = "#444";
      ctx.setLineDash([4, 3]);
      ctx.beginPath();
      const poly = this.lasso.polygon;
      ctx.moveTo(poly[0].x, poly[0].y);
      for (const p of poly.slice(1)) ctx.lineTo(p.x, p.y);
      ctx.stroke();
      ctx.setLineDash([]);
    }
  }

  get inlineNote(): string {
    return this.note.textContent ?? "";
  }
}
