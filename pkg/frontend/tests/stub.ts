// Scripted stand-in for the analysis server: records outbound frames and
// lets tests reply with handcrafted server frames.

import { SocketLike } from "../src/client.js";
import {
  AnalysisResultDoc,
  ClientFrame,
  ClusterDoc,
  ContributionEntry,
} from "../src/protocol.js";

export class StubSocket implements SocketLike {
  sent: ClientFrame[] = [];
  closed = false;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: ((ev: unknown) => void) | null = null;

  send(text: string): void {
    this.sent.push(JSON.parse(text));
  }

  close(): void {
    this.closed = true;
  }

  lastSent(): ClientFrame {
    if (this.sent.length === 0) throw new Error("nothing sent");
    return this.sent[this.sent.length - 1];
  }

  sentOf(kind: string): ClientFrame[] {
    return this.sent.filter((f) => f.kind === kind);
  }

  reply(frame: unknown): void {
    this.onmessage?.({ data: JSON.stringify(frame) });
  }

  result(requestId: string, answers: string, body: unknown): void {
    this.reply({
      kind: "result",
      request_id: requestId,
      payload: { answers, body },
    });
  }

  progress(requestId: string, fraction: number): void {
    this.reply({ kind: "progress", request_id: requestId, payload: { fraction } });
  }

  error(requestId: string, message: string, code = "invalid_request"): void {
    this.reply({
      kind: "error",
      request_id: requestId,
      payload: { message, code },
    });
  }
}

// Fixture builders matching the wire format of the analysis server.

export function gridResult(
  first: "time" | "instance" | "variable",
  second: "time" | "instance" | "variable",
  n = 12,
  quality = 0.45,
): AnalysisResultDoc {
  // points on a ring so every lasso target sits at a known screen spot
  const z: number[][] = [];
  for (let i = 0; i < n; i++) {
    const t = (2 * Math.PI * i) / n;
    z.push([Math.cos(t), Math.sin(t)]);
  }
  const modes = { time: "time", instance: "instance", variable: "variable" } as const;
  const pointMode = (["time", "instance", "variable"] as const).find(
    (m) => m !== first && m !== second,
  )!;
  const cols = 6;
  return {
    combo: { first: modes[first], second: modes[second] },
    compressed: {
      dataset: "stub",
      combo: { first, second },
      method: "pca",
      quality,
      w: [0.1, -0.4, 0.8, 0.2, -0.1, 0.35],
      shape: [n, cols],
      Y: new Array(n * cols).fill(0),
    },
    embedding: {
      z,
      method: "neighbor",
      combo: { first, second },
      params: { n_neighbors: 5, min_dist: 0.1, epochs: 10 },
      seed: 0,
      trustworthiness: 0.93,
      trustworthiness_k: 5,
      warning: null,
    },
    point_mode: pointMode,
  };
}

export function clusterDoc(id: number, rows: number[]): ClusterDoc {
  return {
    cluster_id: id,
    member_rows: rows,
    color_index: (id - 1) % 10,
    label: `Cluster ${id}`,
  };
}

export function fcEntry(
  clusterId: number,
  combo: string,
  a: number[],
): ContributionEntry {
  return {
    cluster_id: clusterId,
    combo,
    fc: { a, cluster_id: clusterId, alpha: 1.0, flipped: false, warning: null },
  };
}

export function datasetSummary(n = 12) {
  return {
    name: "stub",
    shape: [4, n, 6] as [number, number, number],
    time_labels: ["w1", "w2", "w3", "w4"],
    instance_labels: Array.from({ length: n }, (_, i) => `s${i}`),
    variable_labels: ["pm25", "pm10", "so2", "no2", "co", "o3"],
  };
}
