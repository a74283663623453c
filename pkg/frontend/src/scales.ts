/** Minimal linear/log axis scales with tick generation for SVG rendering. */

export interface Scale {
  (x: number): number;
  ticks(): number[];
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const f = ((x: number) => r0 + ((x - d0) / (d1 - d0 || 1)) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.ticks = () => {
    const span = d1 - d0;
    const step = Math.pow(10, Math.floor(Math.log10(span / 5 || 1)));
    const mult = span / step > 25 ? 5 : span / step > 10 ? 2 : 1;
    const s = step * mult;
    const out: number[] = [];
    for (let v = Math.ceil(d0 / s) * s; v <= d1 + 1e-12 * span; v += s) out.push(v);
    return out;
  };
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale domain must be positive, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const [r0, r1] = range;
  const f = ((x: number) => r0 + ((Math.log10(x) - l0) / (l1 - l0 || 1)) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  f.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
      out.push(Math.pow(10, e));
    }
    if (out.length < 2) {
      out.length = 0;
      out.push(d0, d1);
    }
    return out;
  };
  return f;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const e = Math.floor(Math.log10(Math.abs(v)));
  if (e >= -2 && e <= 3) {
    return Number(v.toPrecision(3)).toString();
  }
  return v.toExponential(0).replace("e+", "e");
}
