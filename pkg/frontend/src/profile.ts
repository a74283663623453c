/**
 * Two-panel wave-profile figure: density against the similarity variable,
 * and its derivative overlaid with the Gaussian fit recorded in the CSV
 * header (amplitude C * delta, decay constant c0, and the fit residual).
 */

import { readProfile } from "./csv.js";
import { linearScale } from "./scales.js";
import { axes, document as svgDocument, PALETTE, polyline, text } from "./svg.js";
import type { ProfileSpec } from "./spec.js";

const WIDTH = 640;
const PANEL_H = 280;
const MARGIN = { left: 64, right: 16, top: 24, bottom: 44 };

export function renderProfile(spec: ProfileSpec): string {
  const table = readProfile(spec.profile);
  const { xi, rho, drho, params } = table;
  const delta = params.delta ?? 0;

  const xRange: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
  const body: string[] = [];

  // top panel: density profile
  {
    const y0 = PANEL_H - MARGIN.bottom;
    const yRange: [number, number] = [y0, MARGIN.top];
    const rmin = Math.min(...rho);
    const rmax = Math.max(...rho);
    const pad = Math.max(1e-12, 0.1 * (rmax - rmin));
    const xS = linearScale([xi[0], xi[xi.length - 1]], xRange);
    const yS = linearScale([rmin - pad, rmax + pad], yRange);
    body.push(axes(xS, yS, "similarity variable", "density"));
    body.push(polyline(xi.map((x, i) => [xS(x), yS(rho[i])]), PALETTE[0]));
    body.push(text(MARGIN.left + 10, MARGIN.top + 2, `wave profile (delta = ${delta.toPrecision(3)})`));
  }

  // bottom panel: derivative with the Gaussian fit overlay
  {
    const shift = PANEL_H;
    const y0 = shift + PANEL_H - MARGIN.bottom;
    const yRange: [number, number] = [y0, shift + MARGIN.top];
    const dmin = Math.min(...drho, 0);
    const dmax = Math.max(...drho, 0);
    const pad = Math.max(1e-15, 0.1 * (dmax - dmin));
    const xS = linearScale([xi[0], xi[xi.length - 1]], xRange);
    const yS = linearScale([dmin - pad, dmax + pad], yRange);
    body.push(axes(xS, yS, "similarity variable", "derivative"));
    body.push(polyline(xi.map((x, i) => [xS(x), yS(drho[i])]), PALETTE[1]));
    if (delta > 0 && params.gauss_c0 > 0) {
      const model = xi.map(
        (x) => params.gauss_C * delta * Math.exp(-params.gauss_c0 * x * x),
      );
      body.push(
        polyline(xi.map((x, i) => [xS(x), yS(model[i])]), "#333", { dash: "5 4", width: 1.0 }),
      );
      body.push(
        text(
          MARGIN.left + 10,
          shift + MARGIN.top + 2,
          `gaussian fit: c0 = ${params.gauss_c0.toFixed(3)}, residual ${params.gauss_resid.toExponential(2)}`,
        ),
      );
    } else {
      body.push(text(MARGIN.left + 10, shift + MARGIN.top + 2, "flat profile (no wave)"));
    }
  }

  return svgDocument(WIDTH, 2 * PANEL_H, body.join("\n"));
}
