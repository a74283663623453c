/**
 * Decay figures: selected diagnostics columns against 1+t on log-log axes
 * (or t on semilog axes), with dashed reference slopes and per-series
 * annotations carrying the fitted exponents.
 */

import { readDiagnostics, readFits, SchemaError, type FitRow } from "./csv.js";
import { exponentialRate, powerExponent } from "./fit.js";
import { linearScale, logScale } from "./scales.js";
import { axes, document as svgDocument, PALETTE, polyline, text } from "./svg.js";
import type { DecaySpec } from "./spec.js";

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 64, right: 16, top: 18, bottom: 46 };

export class EmptySeriesError extends Error {}

interface Series {
  name: string;
  t: number[];
  v: number[];
  annotation: string;
}

function pickFit(fits: FitRow[], quantity: string): FitRow | undefined {
  return fits.find((f) => f.quantity === quantity);
}

export function renderDecay(spec: DecaySpec): string {
  const table = readDiagnostics(spec.diagnostics);
  const missing = spec.quantities.filter((q) => !table.columns.includes(q));
  if (missing.length) {
    throw new SchemaError(
      `missing columns ${missing.join(", ")}; available: ${table.columns.join(", ")}`,
    );
  }
  const fits = spec.fits ? readFits(spec.fits) : [];
  const tAll = table.data.get("t")!;

  const series: Series[] = [];
  for (const q of spec.quantities) {
    const raw = table.data.get(q)!;
    const t: number[] = [];
    const v: number[] = [];
    for (let i = 0; i < tAll.length; i++) {
      if (raw[i] > 0 && Number.isFinite(raw[i])) {
        t.push(tAll[i]);
        v.push(raw[i]);
      }
    }
    if (t.length === 0) {
      throw new EmptySeriesError(`series '${q}' has no positive samples`);
    }
    const fit = pickFit(fits, q);
    let annotation: string;
    if (fit) {
      annotation =
        fit.kind === "exponential"
          ? `${q}: rate ${fit.value.toFixed(2)}`
          : `${q}: exponent ${fit.value.toFixed(2)}`;
    } else if (spec.scale === "semilog") {
      annotation = `${q}: rate ${exponentialRate(t, v).toFixed(2)}`;
    } else {
      annotation = `${q}: exponent ${powerExponent(t, v).toFixed(2)}`;
    }
    series.push({ name: q, t, v, annotation });
  }

  const vmin = Math.min(...series.map((s) => Math.min(...s.v)));
  const vmax = Math.max(...series.map((s) => Math.max(...s.v)));
  const tmin = Math.min(...series.map((s) => Math.min(...s.t)));
  const tmax = Math.max(...series.map((s) => Math.max(...s.t)));

  const xRange: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
  const yRange: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];
  const yScale = logScale([vmin * 0.5, vmax * 2.0], yRange);
  const xScale =
    spec.scale === "loglog"
      ? logScale([1 + tmin, (1 + tmax) * 1.05], xRange)
      : linearScale([tmin, tmax * 1.02], xRange);
  const xOf = (t: number) => (spec.scale === "loglog" ? xScale(1 + t) : xScale(t));

  const body: string[] = [];
  body.push(
    axes(
      xScale,
      yScale,
      spec.scale === "loglog" ? "1 + t" : "t",
      "norm",
    ),
  );

  series.forEach((s, i) => {
    const pts = s.t.map((tk, j) => [xOf(tk), yScale(s.v[j])] as [number, number]);
    body.push(polyline(pts, PALETTE[i % PALETTE.length]));
    body.push(
      text(MARGIN.left + 10, MARGIN.top + 14 + 14 * i, s.annotation, {
        color: PALETTE[i % PALETTE.length],
      }),
    );
  });

  // dashed reference guides anchored at the first point of the first series
  const anchor = series[0];
  const t0 = anchor.t[0];
  const v0 = anchor.v[0];
  for (const [k, ref] of (spec.references ?? []).entries()) {
    const pts: Array<[number, number]> = [];
    for (const tk of anchor.t) {
      let val: number;
      if (ref.rate !== undefined) {
        val = v0 * Math.exp(-ref.rate * (tk - t0));
      } else if (ref.slope !== undefined) {
        val = v0 * Math.pow((1 + tk) / (1 + t0), ref.slope);
        if (ref.lnCorrected) {
          val *= Math.sqrt(Math.log(2 + tk) / Math.log(2 + t0));
        }
      } else {
        continue;
      }
      if (val > 0 && val >= yScale.domain[0] && val <= yScale.domain[1]) {
        pts.push([xOf(tk), yScale(val)]);
      }
    }
    if (pts.length > 1) {
      body.push(polyline(pts, "#555", { dash: "6 4", width: 1.0 }));
      const label =
        ref.rate !== undefined
          ? `exp(-${ref.rate} t)`
          : `slope ${ref.slope}${ref.lnCorrected ? " (ln-corrected)" : ""}`;
      body.push(text(pts[pts.length - 1][0] - 4, pts[pts.length - 1][1] - 5, label, {
        anchor: "end",
        color: "#555",
      }));
    }
  }

  return svgDocument(WIDTH, HEIGHT, body.join("\n"));
}
