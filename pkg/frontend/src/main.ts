#!/usr/bin/env node
/**
 * plots <fig-spec-file> --out <dir>
 *
 * Renders the figure described by a JSON spec file from the simulation's
 * CSV artifacts.  Exit codes: 0 ok, 1 bad data (schema/columns/empty),
 * 2 bad usage or spec.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname, isAbsolute, join } from "node:path";

import { SchemaError } from "./csv.js";
import { EmptySeriesError, renderDecay } from "./decay.js";
import { renderProfile } from "./profile.js";
import { parseFigureSpec, SpecError } from "./spec.js";

export function runCli(argv: string[]): number {
  const args = [...argv];
  let outDir = ".";
  const outIdx = args.indexOf("--out");
  if (outIdx >= 0) {
    if (outIdx + 1 >= args.length) {
      console.error("--out needs a directory");
      return 2;
    }
    outDir = args[outIdx + 1];
    args.splice(outIdx, 2);
  }
  if (args.length !== 1) {
    console.error("usage: plots <fig-spec-file> --out <dir>");
    return 2;
  }
  try {
    const spec = parseFigureSpec(args[0]);
    const svg = spec.kind === "decay" ? renderDecay(spec) : renderProfile(spec);
    const target = isAbsolute(spec.output) ? spec.output : join(outDir, spec.output);
    mkdirSync(dirname(target), { recursive: true });
    writeFileSync(target, svg);
    console.log(`wrote ${target}`);
    return 0;
  } catch (err) {
    if (err instanceof SpecError) {
      console.error(`spec error: ${err.message}`);
      return 2;
    }
    if (err instanceof SchemaError || err instanceof EmptySeriesError) {
      console.error(`data error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const self = process.argv[1] ?? "";
if (self.endsWith("main.js") || self.endsWith("main.ts")) {
  process.exit(runCli(process.argv.slice(2)));
}
