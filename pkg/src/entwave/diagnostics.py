"""Per-time diagnostics recorded during a run.

Each observation computes the primitive perturbations against both the
plain wave and the corrected ansatz, their zero/non-zero mode norms, the
anti-derivative energies of the transformed characteristic system, the
weighted dissipations, and the densities feeding the time-integrated
Poincare-type diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import TildeAnsatz
from .fd import deriv1_line, trapz_line
from .gas import EndStates, GasParams
from .grid import ConservedField, transverse_matrices
from .modes import (
    antiderive,
    diagonalize,
    energies,
    mode_split,
    transform,
    weighted_norm,
)
from .profile import ProfileTable, gaussian_fit_derivative, sample_wave

SCHEMA_VERSION = "entwave.diagnostics.v1"

COLUMNS = [
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
]


@dataclass
class DiagnosticsSeries:
    """Column store of the recorded rows."""

    data: dict = field(default_factory=lambda: {c: [] for c in COLUMNS})

    def append(self, row: dict) -> None:
        for c in COLUMNS:
            self.data[c].append(row.get(c, np.nan))

    def column(self, name: str) -> np.ndarray:
        return np.asarray(self.data[name], dtype=float)

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    def __len__(self) -> int:
        return len(self.data["t"])


class DiagnosticsRecorder:
    """Observer callable computing the full diagnostics row per snapshot."""

    def __init__(
        self,
        ansatz: TildeAnsatz,
        profile: ProfileTable,
        ends: EndStates,
        gas: GasParams,
        delta: float,
        kernel_c: float = 0.125,
        c0_tilde: float | None = None,
        dissipation_const: float = 1.0,
        cross_const: float = 0.05,
        tail_tol: float = 1e-8,
    ):
        self.ansatz = ansatz
        self.profile = profile
        self.ends = ends
        self.gas = gas
        self.delta = delta
        self.kernel_c = kernel_c
        if c0_tilde is None:
            if ends.delta > 0:
                _, c0, _ = gaussian_fit_derivative(profile)
            else:
                c0 = ends.rho_minus / (4.0 * profile.a_coeff)
            c0_tilde = 0.5 * c0
        self.c0_tilde = c0_tilde
        self.dissipation_const = dissipation_const
        self.cross_const = cross_const
        self.tail_tol = tail_tol
        self.series = DiagnosticsSeries()
        self.identity_errors: list[float] = []

    def __call__(self, state: ConservedField) -> None:
        self.series.append(self.observe(state))

    # -- helpers ---------------------------------------------------------

    def _primitive_perturbations(self, state: ConservedField, ref_line: np.ndarray):
        """(5, n1, n2, n3) perturbations of (rho, u1, u2, u3, theta)."""
        U = state.U
        rho = U[0]
        u = U[1:4] / rho
        theta = U[4] / rho - 0.5 * (u[0] ** 2 + u[1] ** 2 + u[2] ** 2)
        ref_rho = ref_line[0]
        ref_u = ref_line[1:4] / ref_rho
        ref_th = ref_line[4] / ref_rho - 0.5 * np.einsum("ij,ij->j", ref_u, ref_u)
        pert = np.empty_like(U)
        pert[0] = rho - ref_rho[:, None, None]
        pert[1:4] = u - ref_u[:, :, None, None]
        pert[4] = theta - ref_th[:, None, None]
        return pert

    def observe(self, state: ConservedField) -> dict:
        grid = state.grid
        x1 = grid.x1
        t = state.t
        h = grid.dx1
        gas = self.gas

        tilde = self.ansatz.at(x1, t)
        shift = self.ansatz.coeffs.shift
        bar = sample_wave(self.profile, self.ends, gas, x1 - shift, t)
        bar_line = np.stack(
            [bar.rho_bar, bar.m1_bar, np.zeros_like(bar.rho_bar), np.zeros_like(bar.rho_bar), bar.energy_bar]
        )
        bar_drho = self.profile.drho((x1 - shift) / np.sqrt(1.0 + t)) / np.sqrt(1.0 + t)

        pert_bar = self._primitive_perturbations(state, bar_line)
        split_bar = mode_split(pert_bar)
        pert_ans = self._primitive_perturbations(state, tilde.conserved)
        split_ans = mode_split(pert_ans)

        row: dict = {"t": t}
        edges = state.U[:, [0, -1]]
        ref_edges = tilde.conserved[:, [0, -1]]
        row["boundary_monitor"] = float(
            np.max(np.abs(edges - ref_edges[:, :, None, None]))
        )
        row["mass"] = float(h * state.U[0].mean(axis=(1, 2)).sum())

        zb = split_bar.zero
        row["linf_pert_bar"] = float(np.max(np.abs(zb)))
        row["l2_pert_bar"] = float(np.sqrt(np.sum(trapz_line(zb**2, h))))
        row["dx1_l2_pert_bar"] = float(
            np.sqrt(np.sum(trapz_line(deriv1_line(zb, h) ** 2, h)))
        )
        za = split_ans.zero
        row["linf_pert_ansatz"] = float(np.max(np.abs(za)))
        row["l2_pert_ansatz"] = float(np.sqrt(np.sum(trapz_line(za**2, h))))

        nz = split_ans.nonzero
        row["nonzero_linf"] = float(np.max(np.abs(nz)))
        row["nonzero_h1"] = self._h1_norm(nz, grid)

        # anti-derivative pipeline against the ansatz (conserved variables)
        cons_pert = state.U.mean(axis=(2, 3)) - tilde.conserved
        tail = float(np.max(np.abs(cons_pert[:, 0])))
        row["tail_flag"] = float(tail > self.tail_tol)
        anti = antiderive(cons_pert, x1, t, tail_tol=np.inf)
        row["anti_linf"] = float(np.max(np.abs(anti.stacked())))
        tv = transform(anti, tilde)
        diag = diagonalize(tv, tilde, gas)
        self.identity_errors.append(max(diag.identity_error, diag.diagonality_error))

        rho_ring = state.U[0].mean(axis=(1, 2))
        for k in range(3):
            ek = energies(
                diag, tv, anti, tilde,
                bar.rho_bar, bar_drho, self.ends.rho_plus, gas,
                k, self.delta,
                dissipation_const=self.dissipation_const,
                cross_const=self.cross_const,
                rho_ring=rho_ring,
            )
            row[f"Etilde{k}"] = ek["Etilde"]
            row[f"E{k}"] = ek["E"]
            row[f"K{k}"] = ek["K"]
            row[f"G{k}"] = ek["G"]

        row["w_vt_tilde"] = sum(
            weighted_norm(v, x1, "omega_tilde", 0.5, t, self.c0_tilde) for v in tv.V
        )
        for i in range(3):
            row[f"w_b{i+1}_tilde"] = weighted_norm(
                diag.B[i], x1, "omega_tilde", 0.5, t, self.c0_tilde
            )

        # densities for the time-integrated Poincare-type diagnostic
        row["poin_lhs"] = sum(
            weighted_norm(v, x1, "omega", 1.0, t, self.kernel_c) for v in np.vstack([tv.Phi_t[None], tv.Psi_t, tv.W_t[None]])
        )
        d1 = deriv1_line(np.vstack([tv.Phi_t[None], tv.Psi_t, tv.W_t[None]]), h)
        d2 = deriv1_line(d1, h)
        row["poin_rhs"] = float(np.sum(trapz_line(d1**2, h)) + np.sum(trapz_line(d2**2, h)))
        return row

    def _h1_norm(self, fields: np.ndarray, grid) -> float:
        """H^1(Omega) norm of the stacked non-zero-mode fields."""
        n2, n3 = fields.shape[-2], fields.shape[-1]
        dv = grid.dx1 / (n2 * n3)
        total = float(np.sum(fields**2))
        dx1 = deriv1_line(fields, grid.dx1, axis=1)
        total += float(np.sum(dx1**2))
        if n2 > 1 or n3 > 1:
            D2a, _, D3a, _ = transverse_matrices(n2, n3)
            dy = np.einsum("ab,cxbk->cxak", D2a, fields)
            dz = np.einsum("ab,cxkb->cxka", D3a, fields)
            total += float(np.sum(dy**2) + np.sum(dz**2))
        return float(np.sqrt(total * dv))
