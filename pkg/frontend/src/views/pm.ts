import { Scale, extent, linearScale, padded } from "../scales.js";

const MARGIN = { top: 20, right: 8, bottom: 18, left: 30 };

/**
 * Parametric-mapping view: the stage-1 weight vector drawn in black with
 * the compression quality printed at the top right.
 */
export class PmView {
  readonly root: HTMLElement;
  readonly canvas: HTMLCanvasElement;
  private qualityEl: HTMLElement;
  private w: number[] = [];
  asBars = false;

  constructor(doc: Document) {
    this.root = doc.createElement("div");
    this.root.className = "pm-panel";
    this.qualityEl = doc.createElement("div");
    this.qualityEl.className = "pm-quality";
    this.canvas = doc.createElement("canvas");
    this.canvas.width = 420;
    this.canvas.height = 120;
    this.root.append(this.qualityEl, this.canvas);
  }

  setMapping(w: number[], quality: number, asBars = false): void {
    this.w = w;
    this.asBars = asBars;
    this.qualityEl.textContent = `explained variance: ${formatQuality(quality)}`;
    this.draw();
  }

  get qualityText(): string {
    return this.qualityEl.textContent ?? "";
  }

  get yScale(): Scale {
    return linearScale(padded(extent(this.w)), [
      this.canvas.height - MARGIN.bottom,
      MARGIN.top,
    ]);
  }

  draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || this.w.length === 0) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    const sx = linearScale(
      [0, Math.max(1, this.w.length - 1)],
      [MARGIN.left, width - MARGIN.right],
    );
    const sy = this.yScale;
    ctx.fillStyle = "#000";
    ctx.strokeStyle = "#000";
    if (this.asBars) {
      const slot = (sx(1) - sx(0)) * 0.8;
      this.w.forEach((v, j) => {
        ctx.fillRect(sx(j) - slot / 2, Math.min(sy(0), sy(v)), Math.max(1, slot), Math.abs(sy(v) - sy(0)));
      });
    } else {
      ctx.beginPath();
      this.w.forEach((v, j) => {
        j === 0 ? ctx.moveTo(sx(j), sy(v)) : ctx.lineTo(sx(j), sy(v));
      });
      ctx.stroke();
    }
  }
}

// 0.45 renders as "0.45"; trailing noise is clipped, integers keep one form.
export function formatQuality(q: number): string {
  const rounded = Math.round(q * 100) / 100;
  return String(rounded);
}
