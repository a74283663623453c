import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "entwave-plots-"));
}

const DIAG_COLUMNS = [
  "t",
  "linf_pert_bar",
  "l2_pert_bar",
  "dx1_l2_pert_bar",
  "linf_pert_ansatz",
  "l2_pert_ansatz",
  "nonzero_h1",
  "nonzero_linf",
  "anti_linf",
  "Etilde0", "Etilde1", "Etilde2",
  "E0", "E1", "E2",
  "K0", "K1", "K2",
  "G0", "G1", "G2",
  "w_vt_tilde",
  "w_b1_tilde", "w_b2_tilde", "w_b3_tilde",
  "poin_lhs",
  "poin_rhs",
  "boundary_monitor",
  "mass",
  "tail_flag",
];

export function writeSyntheticDiagnostics(
  dir: string,
  rows: Array<Record<string, number>>,
): string {
  const lines = ["# schema=entwave.diagnostics.v1", "# " + DIAG_COLUMNS.join(",")];
  for (const row of rows) {
    lines.push(DIAG_COLUMNS.map((c) => String(row[c] ?? 1.0)).join(","));
  }
  const path = join(dir, "diagnostics.csv");
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

export function writeSyntheticFits(
  dir: string,
  rows: Array<{ quantity: string; kind: string; value: number }>,
): string {
  const header = [
    "# schema=entwave.fits.v1",
    "# experiment,quantity,kind,value,confidence,window_lo,window_hi,residual,n_samples,passed",
  ];
  for (const r of rows) {
    header.push(
      `synthetic,${r.quantity},${r.kind},${r.value},0.01,10.0,100.0,0.01,50,pass`,
    );
  }
  const path = join(dir, "fits.csv");
  writeFileSync(path, header.join("\n") + "\n");
  return path;
}

export function writeSyntheticProfile(dir: string, delta = 0.05): string {
  const lines = [
    `# schema=entwave.profile.v1, delta=${delta}, gamma=1.6666666666666667, ` +
      `kappa=0.3, a=0.18, rho_minus=1.0, theta_minus=1.0, rho_plus=${1 + delta / 2}, ` +
      "residual=1e-12, gauss_C=0.34, gauss_c0=1.39, gauss_resid=0.004",
    "# xi,rho_bar,drho_bar",
  ];
  for (let i = 0; i <= 200; i++) {
    const xi = -12 + (24 * i) / 200;
    const rho = 1 + (delta / 2) * 0.5 * (1 + Math.tanh(1.2 * xi));
    const drho = 0.34 * delta * Math.exp(-1.39 * xi * xi);
    lines.push(`${xi},${rho},${drho}`);
  }
  const path = join(dir, "profile.csv");
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}
