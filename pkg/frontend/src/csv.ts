/**
 * Readers for the versioned CSV artifacts written by the simulation side.
 * Every file opens with `# schema=<name>` followed by a `# col,col,...`
 * header line; the schema is checked before any column is trusted.
 */

import { readFileSync } from "node:fs";

export const DIAGNOSTICS_SCHEMA = "entwave.diagnostics.v1";
export const FITS_SCHEMA = "entwave.fits.v1";
export const PROFILE_SCHEMA = "entwave.profile.v1";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  data: Map<string, number[]>;
}

function splitHeader(path: string, text: string): { schema: string; lines: string[] } {
  const lines = text.split(/\r?\n/);
  if (lines.length < 2 || !lines[0].startsWith("# schema=")) {
    throw new SchemaError(`${path}: missing schema header line`);
  }
  const schema = lines[0].slice("# schema=".length).split(",")[0].trim();
  return { schema, lines };
}

export function readDiagnostics(path: string): Table {
  const { schema, lines } = splitHeader(path, readFileSync(path, "utf8"));
  if (schema !== DIAGNOSTICS_SCHEMA) {
    throw new SchemaError(
      `${path}: schema ${schema} unsupported (want ${DIAGNOSTICS_SCHEMA})`,
    );
  }
  const columns = lines[1].replace(/^#\s*/, "").split(",").map((c) => c.trim());
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (const line of lines.slice(2)) {
    if (!line.trim() || line.startsWith("#")) continue;
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `${path}: row has ${parts.length} fields, header names ${columns.length}`,
      );
    }
    parts.forEach((v, j) => data.get(columns[j])!.push(Number(v)));
  }
  return { columns, data };
}

export interface FitRow {
  experiment: string;
  quantity: string;
  kind: string;
  value: number;
  confidence: number;
  windowLo: number;
  windowHi: number;
  residual: number;
  passed: string;
}

export function readFits(path: string): FitRow[] {
  const { schema, lines } = splitHeader(path, readFileSync(path, "utf8"));
  if (schema !== FITS_SCHEMA) {
    throw new SchemaError(`${path}: schema ${schema} unsupported (want ${FITS_SCHEMA})`);
  }
  const out: FitRow[] = [];
  for (const line of lines.slice(2)) {
    if (!line.trim() || line.startsWith("#")) continue;
    const p = line.split(",");
    out.push({
      experiment: p[0],
      quantity: p[1],
      kind: p[2],
      value: Number(p[3]),
      confidence: Number(p[4]),
      windowLo: Number(p[5]),
      windowHi: Number(p[6]),
      residual: Number(p[7]),
      passed: p[9],
    });
  }
  return out;
}

export interface ProfileTable {
  params: Record<string, number>;
  xi: number[];
  rho: number[];
  drho: number[];
}

export function readProfile(path: string): ProfileTable {
  const { schema, lines } = splitHeader(path, readFileSync(path, "utf8"));
  if (schema !== PROFILE_SCHEMA) {
    throw new SchemaError(
      `${path}: schema ${schema} unsupported (want ${PROFILE_SCHEMA})`,
    );
  }
  const params: Record<string, number> = {};
  for (const item of lines[0].split(",").slice(1)) {
    const [key, val] = item.split("=").map((s) => s.trim());
    if (key && val !== undefined) params[key] = Number(val);
  }
  const xi: number[] = [];
  const rho: number[] = [];
  const drho: number[] = [];
  for (const line of lines.slice(2)) {
    if (!line.trim() || line.startsWith("#")) continue;
    const p = line.split(",").map(Number);
    xi.push(p[0]);
    rho.push(p[1]);
    drho.push(p[2]);
  }
  if (xi.length === 0) throw new SchemaError(`${path}: no profile rows`);
  return { params, xi, rho, drho };
}
