/** Least-squares decay fits used for annotations when no fits CSV is given. */

export function leastSquaresSlope(x: number[], y: number[]): number {
  const n = x.length;
  const mx = x.reduce((a, b) => a + b, 0) / n;
  const my = y.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) ** 2;
  }
  return num / (den || 1);
}

/** Exponent of value ~ (1+t)^p over the positive samples. */
export function powerExponent(t: number[], v: number[]): number {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (v[i] > 0 && Number.isFinite(v[i])) {
      xs.push(Math.log(1 + t[i]));
      ys.push(Math.log(v[i]));
    }
  }
  if (xs.length < 2) throw new Error("need at least two positive samples to fit");
  return leastSquaresSlope(xs, ys);
}

/** Rate c of value ~ exp(-c t); positive means decay. */
export function exponentialRate(t: number[], v: number[]): number {
  const xs: number[] = [];
  const ys: number[] = [];
  for (let i = 0; i < t.length; i++) {
    if (v[i] > 0 && Number.isFinite(v[i])) {
      xs.push(t[i]);
      ys.push(Math.log(v[i]));
    }
  }
  if (xs.length < 2) throw new Error("need at least two positive samples to fit");
  return -leastSquaresSlope(xs, ys);
}
