export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
  invert(px: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1; // degenerate domains map to the range start
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  scale.invert = (px: number) => d0 + ((px - r0) / (r1 - r0 || 1)) * span;
  return scale;
}

export function extent(values: ArrayLike<number>): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (let i = 0; i < values.length; i++) {
    const v = values[i];
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  return [lo, hi];
}

export function padded(e: [number, number], frac = 0.05): [number, number] {
  const pad = (e[1] - e[0]) * frac || 0.5;
  return [e[0] - pad, e[1] + pad];
}

export function ticks(domain: [number, number], count = 5): number[] {
  const span = domain[1] - domain[0];
  if (span <= 0) return [domain[0]];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const inc = step * mult;
  const start = Math.ceil(domain[0] / inc) * inc;
  const out: number[] = [];
  for (let v = start; v <= domain[1] + inc * 1e-9; v += inc) {
    out.push(Math.round(v / inc) * inc);
  }
  return out;
}
