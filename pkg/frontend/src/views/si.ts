import { ClusterDoc } from "../protocol.js";
import { PALETTE, UNSELECTED } from "../palette.js";
import { SiVariant } from "../state.js";

/**
 * Auxiliary-information view for the selected points. Two generic
 * variants: a strip of calendar-ordered ticks colored by cluster (time
 * points) or labels listed per cluster (anything else).
 */
export class SiView {
  readonly root: HTMLElement;
  variant: SiVariant = "label-list";

  constructor(private doc: Document) {
    this.root = doc.createElement("div");
    this.root.className = "si-panel";
  }

  update(variant: SiVariant, labels: string[], clusters: ClusterDoc[]): void {
    this.variant = variant;
    this.root.textContent = "";
    if (variant === "time-strip") this.renderStrip(labels, clusters);
    else this.renderList(labels, clusters);
  }

  private clusterOf(pointId: number, clusters: ClusterDoc[]): ClusterDoc | null {
    for (const c of clusters) {
      if (c.member_rows.includes(pointId)) return c;
    }
    return null;
  }

  private renderStrip(labels: string[], clusters: ClusterDoc[]): void {
    const strip = this.doc.createElement("div");
    strip.className = "si-strip";
    labels.forEach((label, i) => {
      const tick = this.doc.createElement("span");
      tick.className = "si-tick";
      tick.title = label;
      const c = this.clusterOf(i, clusters);
      tick.style.background =
        c === null ? UNSELECTED : PALETTE[c.color_index];
      strip.append(tick);
    });
    this.root.append(strip);
  }

  private renderList(labels: string[], clusters: ClusterDoc[]): void {
    for (const c of clusters) {
      const group = this.doc.createElement("div");
      group.className = "si-group";
      const head = this.doc.createElement("b");
      head.textContent = c.label;
      head.style.color = PALETTE[c.color_index];
      const list = this.doc.createElement("span");
      list.textContent = [...c.member_rows]
        .sort((a, b) => a - b)
        .map((i) => labels[i] ?? String(i))
        .join(", ");
      group.append(head, this.doc.createTextNode(": "), list);
      this.root.append(group);
    }
  }
}
