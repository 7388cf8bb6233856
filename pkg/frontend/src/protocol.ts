// Wire types for the analysis server protocol. Frames are JSON text
// documents {kind, request_id, payload} in both directions; result payloads
// carry the request kind they answer plus a kind-specific body.

export type ModeName = "time" | "instance" | "variable";

export interface ComboDoc {
  first: ModeName;
  second: ModeName;
}

export interface ConfigPayload {
  method1?: "pca" | "mean";
  method2?: "linear" | "neighbor";
  neighbors?: number;
  min_dist?: number;
  epochs?: number;
  seed?: number;
  standardize?: boolean;
  bins?: number;
}

export type ClientKind =
  | "load_dataset"
  | "request_results"
  | "select_cluster"
  | "remove_cluster"
  | "request_histograms"
  | "request_baselines";

export interface ClientFrame {
  kind: ClientKind;
  request_id: string;
  payload: Record<string, unknown>;
}

export interface ProgressFrame {
  kind: "progress";
  request_id: string;
  payload: { fraction: number };
}

export interface ResultFrame {
  kind: "result";
  request_id: string;
  payload: { answers: ClientKind; body: any };
}

export interface ErrorFrame {
  kind: "error";
  request_id: string;
  payload: { message: string; code: string };
}

export type ServerFrame = ProgressFrame | ResultFrame | ErrorFrame;

// Result bodies the views consume.

export interface DatasetSummary {
  name: string;
  shape: [number, number, number];
  time_labels: string[];
  instance_labels: string[];
  variable_labels: string[];
}

export interface EmbeddingDoc {
  z: number[][] | { encoding: "base64"; dtype: string; shape: number[]; data: string };
  method: string;
  combo: ComboDoc | null;
  params: Record<string, number>;
  seed: number | null;
  trustworthiness: number | null;
  trustworthiness_k: number | null;
  warning: string | null;
}

export interface CompressedDoc {
  dataset: string;
  combo: ComboDoc;
  method: string;
  quality: number;
  w: number[];
  shape: [number, number];
  Y: number[];
}

export interface AnalysisResultDoc {
  combo: ComboDoc;
  compressed: CompressedDoc;
  embedding: EmbeddingDoc;
  point_mode: ModeName;
}

export interface ClusterDoc {
  cluster_id: number;
  member_rows: number[];
  color_index: number;
  label: string;
}

export interface FcDoc {
  a: number[];
  cluster_id: number;
  alpha: number;
  flipped: boolean;
  warning: string | null;
}

export interface ContributionEntry {
  cluster_id: number;
  combo: string; // "first-second" key
  fc: FcDoc;
}

export interface SelectionBody {
  cluster: ClusterDoc;
  clusters: ClusterDoc[];
  contributions: ContributionEntry[];
}

export interface HistogramBody {
  feature_index: number;
  bin_edges: number[];
  clusters: { cluster_id: number; frequencies: number[] }[];
  remainder: number[] | null;
  y_max: number;
}

export function comboKey(c: ComboDoc): string {
  return `${c.first}-${c.second}`;
}

export function makeFrame(
  kind: ClientKind,
  requestId: string,
  payload: Record<string, unknown>,
): string {
  return JSON.stringify({ kind, request_id: requestId, payload });
}

export function parseServerFrame(text: string): ServerFrame {
  const doc = JSON.parse(text);
  if (
    typeof doc !== "object" ||
    doc === null ||
    typeof doc.request_id !== "string" ||
    !["progress", "result", "error"].includes(doc.kind)
  ) {
    throw new Error(`malformed server frame: ${text.slice(0, 120)}`);
  }
  return doc as ServerFrame;
}

// z arrays above 10,000 points arrive base64-packed (little-endian f8).
export function decodeZ(doc: EmbeddingDoc): Float64Array {
  if (Array.isArray(doc.z)) {
    const out = new Float64Array(doc.z.length * 2);
    doc.z.forEach(([x, y], i) => {
      out[2 * i] = x;
      out[2 * i + 1] = y;
    });
    return out;
  }
  const raw = atob(doc.z.data);
  const bytes = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) bytes[i] = raw.charCodeAt(i);
  return new Float64Array(bytes.buffer);
}
