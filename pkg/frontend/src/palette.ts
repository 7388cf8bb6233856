// Categorical palette shared by every view. Ten slots, matching the
// server's color_index = (cluster_id - 1) mod 10 assignment, so a cluster
// keeps one color everywhere regardless of which view draws it first.

export const PALETTE = [
  "#1f77b4", // blue
  "#ff7f0e", // orange
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
] as const;

export const UNSELECTED = "#b0b0b0";
export const REMAINDER = "#9a9a9a";

export function colorIndexFor(clusterId: number): number {
  if (!Number.isInteger(clusterId) || clusterId < 1) {
    throw new Error(`cluster ids start at 1, got ${clusterId}`);
  }
  return (clusterId - 1) % PALETTE.length;
}

export function colorForCluster(clusterId: number): string {
  return PALETTE[colorIndexFor(clusterId)];
}
