import { existsSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readFits, SchemaError } from "../src/csv.js";
import { EmptySeriesError, renderDecay } from "../src/decay.js";
import { runCli } from "../src/main.js";
import {
  tempDir,
  writeSyntheticDiagnostics,
  writeSyntheticFits,
} from "./helpers.js";

function powerRows(exponent: number, n = 60): Array<Record<string, number>> {
  const rows = [];
  for (let i = 0; i < n; i++) {
    const t = (200 * i) / (n - 1);
    rows.push({
      t,
      linf_pert_bar: Math.pow(1 + t, exponent),
      nonzero_h1: Math.exp(-0.8 * t) + 1e-300,
    });
  }
  return rows;
}

describe("decay figure", () => {
  it("annotates the fitted exponent matching the fits CSV to two decimals", () => {
    const dir = tempDir();
    const diag = writeSyntheticDiagnostics(dir, powerRows(-0.5));
    const fits = writeSyntheticFits(dir, [
      { quantity: "linf_pert_bar", kind: "power", value: -0.5012 },
    ]);
    const svg = renderDecay({
      kind: "decay",
      diagnostics: diag,
      fits,
      quantities: ["linf_pert_bar"],
      scale: "loglog",
      references: [{ slope: -0.5 }],
      output: "decay.svg",
    });
    const fitValue = readFits(fits)[0].value;
    expect(svg).toContain(`exponent ${fitValue.toFixed(2)}`);
    expect(svg).toContain("exponent -0.50");
    expect(svg).toContain("slope -0.5");
  });

  it("computes its own annotation when no fits CSV is given", () => {
    const dir = tempDir();
    const diag = writeSyntheticDiagnostics(dir, powerRows(-0.5));
    const svg = renderDecay({
      kind: "decay",
      diagnostics: diag,
      quantities: ["linf_pert_bar"],
      scale: "loglog",
      output: "decay.svg",
    });
    expect(svg).toContain("exponent -0.50");
  });

  it("renders a straight semilog line with a rate annotation", () => {
    const dir = tempDir();
    const diag = writeSyntheticDiagnostics(dir, powerRows(-0.5));
    const svg = renderDecay({
      kind: "decay",
      diagnostics: diag,
      quantities: ["nonzero_h1"],
      scale: "semilog",
      references: [{ rate: 0.8 }],
      output: "decay.svg",
    });
    expect(svg).toContain("rate 0.80");
    // straight line in semilog: interior points lie on the chord
    const match = svg.match(/<polyline points="([^"]+)" fill="none" stroke="#1f6fb3"/);
    expect(match).not.toBeNull();
    const pts = match![1].split(" ").map((p) => p.split(",").map(Number));
    const [x0, y0] = pts[0];
    const [x1, y1] = pts[pts.length - 1];
    for (const [x, y] of pts) {
      const yChord = y0 + ((x - x0) / (x1 - x0)) * (y1 - y0);
      expect(Math.abs(y - yChord)).toBeLessThan(1.0); // pixels
    }
  });

  it("rejects missing columns naming the available ones", () => {
    const dir = tempDir();
    const diag = writeSyntheticDiagnostics(dir, powerRows(-0.5));
    expect(() =>
      renderDecay({
        kind: "decay",
        diagnostics: diag,
        quantities: ["no_such_column"],
        scale: "loglog",
        output: "x.svg",
      }),
    ).toThrowError(/no_such_column.*available.*linf_pert_bar/s);
  });

  it("errors on an empty series and writes no file", () => {
    const dir = tempDir();
    const rows = powerRows(-0.5).map((r) => ({ ...r, linf_pert_bar: 0 }));
    const diag = writeSyntheticDiagnostics(dir, rows);
    const specPath = join(dir, "fig.json");
    writeFileSync(
      specPath,
      JSON.stringify({
        kind: "decay",
        diagnostics: diag,
        quantities: ["linf_pert_bar"],
        scale: "loglog",
        output: "empty.svg",
      }),
    );
    const rc = runCli([specPath, "--out", dir]);
    expect(rc).toBe(1);
    expect(existsSync(join(dir, "empty.svg"))).toBe(false);
  });

  it("cli renders a figure end to end", () => {
    const dir = tempDir();
    const diag = writeSyntheticDiagnostics(dir, powerRows(-0.75));
    const specPath = join(dir, "fig.json");
    writeFileSync(
      specPath,
      JSON.stringify({
        kind: "decay",
        diagnostics: diag,
        quantities: ["linf_pert_bar"],
        scale: "loglog",
        references: [{ slope: -0.75, lnCorrected: true }],
        output: "decay.svg",
      }),
    );
    const rc = runCli([specPath, "--out", dir]);
    expect(rc).toBe(0);
    const svg = readFileSync(join(dir, "decay.svg"), "utf8");
    expect(svg).toContain("<svg");
    expect(svg).toContain("ln-corrected");
  });

  it("rejects a foreign schema", () => {
    const dir = tempDir();
    const path = join(dir, "bad.csv");
    writeFileSync(path, "# schema=другое.v1\n# t,x\n0,1\n");
    expect(() =>
      renderDecay({
        kind: "decay",
        diagnostics: path,
        quantities: ["x"],
        scale: "loglog",
        output: "x.svg",
      }),
    ).toThrowError(SchemaError);
  });
});
