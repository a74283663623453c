/** Figure specification files: JSON describing what to draw from which CSVs. */

import { readFileSync } from "node:fs";

export interface ReferenceSpec {
  slope?: number;          // algebraic reference in log-log
  lnCorrected?: boolean;   // multiply the slope reference by sqrt(log(2+t))
  rate?: number;           // exponential reference in semilog
}

export interface DecaySpec {
  kind: "decay";
  diagnostics: string;
  fits?: string;
  quantities: string[];
  scale: "loglog" | "semilog";
  references?: ReferenceSpec[];
  output: string;
}

export interface ProfileSpec {
  kind: "profile";
  profile: string;
  output: string;
}

export type FigureSpec = DecaySpec | ProfileSpec;

export class SpecError extends Error {}

export function parseFigureSpec(path: string): FigureSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (err) {
    throw new SpecError(`${path}: not valid JSON (${(err as Error).message})`);
  }
  const obj = raw as Record<string, unknown>;
  if (obj.kind === "decay") {
    for (const key of ["diagnostics", "quantities", "scale", "output"]) {
      if (!(key in obj)) throw new SpecError(`${path}: decay spec missing '${key}'`);
    }
    if (!Array.isArray(obj.quantities) || obj.quantities.length === 0) {
      throw new SpecError(`${path}: 'quantities' must be a non-empty array`);
    }
    if (obj.scale !== "loglog" && obj.scale !== "semilog") {
      throw new SpecError(`${path}: 'scale' must be loglog or semilog`);
    }
    return obj as unknown as DecaySpec;
  }
  if (obj.kind === "profile") {
    for (const key of ["profile", "output"]) {
      if (!(key in obj)) throw new SpecError(`${path}: profile spec missing '${key}'`);
    }
    return obj as unknown as ProfileSpec;
  }
  throw new SpecError(`${path}: 'kind' must be decay or profile`);
}
