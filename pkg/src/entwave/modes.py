"""Zero/non-zero mode split, anti-derivatives, the key transformation,
characteristic diagonalization, and the weighted energies.

The zero mode of a channel field is its transverse torus mean; the
remainder carries the non-zero Fourier modes.  Stability diagnostics work
on the anti-derivatives (cumulative x1 integrals) of the zero-mode
conserved perturbations, transformed so that both structural conditions
hold, and diagonalized into characteristic components b1, b2, b3 whose
acoustic channels feel the wave's monotone density gradient as an
intrinsic dissipation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import TildeState
from .fd import cumtrapz_line, deriv1_line, invert_cumtrapz, trapz_line
from .gas import GasParams


class ModeError(ValueError):
    pass


@dataclass
class ModeSplit:
    """Transverse mean and mean-free remainder of a channel field."""

    zero: np.ndarray
    nonzero: np.ndarray


def mode_split(field: np.ndarray) -> ModeSplit:
    """Split (..., n1, n2, n3) data into zero and non-zero transverse modes."""
    field = np.asarray(field, dtype=float)
    zero = field.mean(axis=(-2, -1))
    nonzero = field - zero[..., None, None]
    return ModeSplit(zero, nonzero)


@dataclass
class AntiDerivs:
    """Cumulative x1 integrals of the zero-mode conserved perturbations."""

    x1: np.ndarray
    t: float
    Phi: np.ndarray
    Psi: np.ndarray  # (3, n1)
    W: np.ndarray

    @property
    def h(self) -> float:
        return float(self.x1[1] - self.x1[0])

    def stacked(self) -> np.ndarray:
        return np.vstack([self.Phi[None, :], self.Psi, self.W[None, :]])


def antiderive(
    pert_zero: np.ndarray, x1: np.ndarray, t: float, tail_tol: float = 1e-10
) -> AntiDerivs:
    """Anti-derivatives of the (rho, m, E) zero-mode perturbations.

    pert_zero is (5, n1).  The perturbation must decay at the left end of
    the line (otherwise the anti-derivatives depend on the truncation and
    the ansatz does not match the data).
    """
    pert_zero = np.asarray(pert_zero, dtype=float)
    left = float(np.max(np.abs(pert_zero[:, 0])))
    if left > tail_tol:
        raise ModeError(
            f"zero-mode perturbation does not decay at the left boundary "
            f"(|edge| = {left:.3e} > {tail_tol:.1e}); ansatz mismatch"
        )
    h = float(x1[1] - x1[0])
    anti = cumtrapz_line(pert_zero, h)
    return AntiDerivs(x1, t, anti[0], anti[1:4], anti[4])


def antiderivative_roundtrip_error(anti: AntiDerivs, pert_zero: np.ndarray) -> float:
    """Max error of the exact discrete derivative of the anti-derivatives."""
    errs = []
    stacked = anti.stacked()
    for row, pert in zip(stacked, pert_zero):
        rec = invert_cumtrapz(row, anti.h, left_value=pert[0])
        errs.append(np.max(np.abs(rec - pert)))
    return float(max(errs))


@dataclass
class TransformedVars:
    """Anti-derivatives in the transformed (structure-restoring) variables."""

    x1: np.ndarray
    t: float
    Phi_t: np.ndarray
    Psi_t: np.ndarray  # (3, n1)
    W_t: np.ndarray

    @property
    def h(self) -> float:
        return float(self.x1[1] - self.x1[0])

    @property
    def V(self) -> np.ndarray:
        """The planar triple (Phi_t, Psi_t1, W_t) the diagonalization acts on."""
        return np.vstack([self.Phi_t, self.Psi_t[0], self.W_t])


def transform(anti: AntiDerivs, tilde: TildeState) -> TransformedVars:
    """Map (Phi, Psi, W) to the variables in which both structural
    conditions of the degenerate field hold:

        Phi_t = theta~ Phi,   Psi_t = Psi - u~ Phi,
        W_t  = W - u~ . Psi_t - (theta~ + |u~|^2/2) Phi.
    """
    theta = tilde.theta
    if np.min(theta) <= 0.0:
        raise ModeError("ansatz temperature must be positive on the line")
    u = tilde.u
    Phi_t = theta * anti.Phi
    Psi_t = anti.Psi - u * anti.Phi
    W_t = (
        anti.W
        - np.einsum("ij,ij->j", u, Psi_t)
        - (theta + 0.5 * np.einsum("ij,ij->j", u, u)) * anti.Phi
    )
    return TransformedVars(anti.x1, anti.t, Phi_t, Psi_t, W_t)


def inverse_transform(vars: TransformedVars, tilde: TildeState) -> AntiDerivs:
    theta = tilde.theta
    u = tilde.u
    Phi = vars.Phi_t / theta
    Psi = vars.Psi_t + u * Phi
    W = (
        vars.W_t
        + np.einsum("ij,ij->j", u, vars.Psi_t)
        + (theta + 0.5 * np.einsum("ij,ij->j", u, u)) * Phi
    )
    return AntiDerivs(vars.x1, vars.t, Phi, Psi, W)


def eigen_matrices(theta: np.ndarray, gas: GasParams):
    """Pointwise left/right eigenvector matrices of the transformed system.

    Returns (lam1, L, R) with L, R of shape (n, 3, 3); the middle row of L
    and middle column of R are constants (both structural conditions hold).
    """
    g = gas.gamma
    theta = np.asarray(theta, dtype=float)
    lam1 = -np.sqrt(g * (g - 1.0) * theta)
    s2g = np.sqrt(2.0 * g)
    n = theta.size
    L = np.empty((n, 3, 3))
    R = np.empty((n, 3, 3))
    L[:, 0, 0] = 1.0 / s2g
    L[:, 0, 1] = lam1 / ((g - 1.0) * s2g)
    L[:, 0, 2] = 1.0 / s2g
    L[:, 1, 0] = np.sqrt((g - 1.0) / g)
    L[:, 1, 1] = 0.0
    L[:, 1, 2] = -1.0 / np.sqrt(g * (g - 1.0))
    L[:, 2, 0] = 1.0 / s2g
    L[:, 2, 1] = -lam1 / ((g - 1.0) * s2g)
    L[:, 2, 2] = 1.0 / s2g

    R[:, 0, 0] = 1.0 / s2g
    R[:, 0, 1] = np.sqrt((g - 1.0) / g)
    R[:, 0, 2] = 1.0 / s2g
    R[:, 1, 0] = lam1 / (s2g * theta)
    R[:, 1, 1] = 0.0
    R[:, 1, 2] = -lam1 / (s2g * theta)
    R[:, 2, 0] = (g - 1.0) / s2g
    R[:, 2, 1] = -np.sqrt((g - 1.0) / g)
    R[:, 2, 2] = (g - 1.0) / s2g
    return lam1, L, R


def coefficient_matrix(theta: np.ndarray, gas: GasParams) -> np.ndarray:
    """Advection matrix of the transformed planar system."""
    g = gas.gamma
    n = np.asarray(theta).size
    A = np.zeros((n, 3, 3))
    A[:, 0, 1] = theta
    A[:, 1, 0] = g - 1.0
    A[:, 1, 2] = g - 1.0
    A[:, 2, 1] = (g - 1.0) * theta
    return A


@dataclass
class Diagonalized:
    """Characteristic components and the pointwise eigen matrices."""

    x1: np.ndarray
    t: float
    B: np.ndarray  # (3, n1)
    lam1: np.ndarray
    L: np.ndarray
    R: np.ndarray
    identity_error: float
    diagonality_error: float


def diagonalize(
    vars: TransformedVars, tilde: TildeState, gas: GasParams, check_tol: float = 1e-10
) -> Diagonalized:
    """B = L~ (Phi_t, Psi_t1, W_t); verifies L~ R~ = I and L~ A R~ diagonal."""
    theta = tilde.theta
    lam1, L, R = eigen_matrices(theta, gas)
    ident = np.einsum("nij,njk->nik", L, R)
    id_err = float(np.max(np.abs(ident - np.eye(3))))
    A = coefficient_matrix(theta, gas)
    D = np.einsum("nij,njk,nkl->nil", L, A, R)
    offdiag = D.copy()
    offdiag[:, [0, 1, 2], [0, 1, 2]] = 0.0
    diag_err = float(np.max(np.abs(offdiag)))
    # the middle eigenvalue is structurally zero
    diag_err = max(diag_err, float(np.max(np.abs(D[:, 1, 1]))))
    if id_err > check_tol or diag_err > check_tol:
        raise ModeError(
            f"eigen-matrix identities violated: |LR-I|={id_err:.3e}, "
            f"offdiag={diag_err:.3e}"
        )
    B = np.einsum("nij,jn->in", L, vars.V)
    return Diagonalized(vars.x1, vars.t, B, lam1, L, R, id_err, diag_err)


def transformed_structural_conditions(
    gas: GasParams, theta_grid: np.ndarray
) -> tuple[float, float]:
    """Structural-condition size for the degenerate field of the transformed
    system: variation of the middle left row and middle right column across
    the coefficient range, per unit theta (identically zero analytically)."""
    _, L, R = eigen_matrices(np.asarray(theta_grid, dtype=float), gas)
    span = float(np.ptp(theta_grid))
    if span == 0.0:
        raise ValueError("theta_grid must span a nonzero range")
    l2_var = float(np.ptp(L[:, 1, :], axis=0).max()) / span
    r2_var = float(np.ptp(R[:, :, 1], axis=0).max()) / span
    return l2_var, r2_var


def mass_weight_exponent(delta: float) -> int:
    """Exponent n = 4 floor(delta^{-1/2}) + 1 of the characteristic weight."""
    if delta < 1e-6:
        raise ValueError(
            f"wave strength {delta} too small: the weight exponent overflows; "
            "use a larger delta"
        )
    return 4 * int(np.floor(delta**-0.5)) + 1


def energies(
    diag: Diagonalized,
    vars: TransformedVars,
    anti: AntiDerivs,
    tilde: TildeState,
    bar_rho: np.ndarray,
    bar_drho: np.ndarray,
    rho_plus: float,
    gas: GasParams,
    k: int,
    delta: float,
    dissipation_const: float = 1.0,
    cross_const: float = 0.05,
    rho_ring: np.ndarray | None = None,
) -> dict:
    """Order-k weighted energies of the diagnostics hierarchy.

    Etilde_k carries the v1^n characteristic weights (v1 = bar density over
    its right value); K_k is the plain (k+1)-derivative energy of the
    transformed variables; G_k is the wave-gradient dissipation of the
    acoustic channels; E_k adds the transverse channels and the small
    cross term controlled by cross_const.
    """
    if k < 0 or k > 2:
        raise ValueError(f"k must be 0, 1, or 2, got {k}")
    h = vars.h
    n_exp = mass_weight_exponent(delta)
    v1 = bar_rho / rho_plus

    def dk(f, order):
        out = f
        for _ in range(order):
            out = deriv1_line(out, h)
        return out

    b1k, b2k, b3k = (dk(diag.B[i], k) for i in range(3))
    w = v1**n_exp
    Et = 0.5 * trapz_line(w * b1k**2 + b2k**2 + b3k**2 / w, h)

    Vfull = np.vstack([vars.Phi_t[None, :], vars.Psi_t, vars.W_t[None, :]])
    Kk = float(np.sum(trapz_line(dk(Vfull, k + 1) ** 2, h)))

    # single-signedness of the wave gradient underlies the dissipation sign
    # (values below 1e-9 of the peak are interpolation-tail noise)
    orient = np.sign(np.sum(bar_drho))
    peak = np.max(np.abs(bar_drho))
    if peak > 0:
        core = np.abs(bar_drho) > 1e-9 * peak
        if not np.all(orient * bar_drho[core] >= 0):
            raise ModeError("wave density gradient is not single-signed")
    Gk = dissipation_const * delta**-0.5 * float(
        trapz_line(orient * bar_drho * (b1k**2 + b3k**2), h)
    )

    if rho_ring is None:
        rho_ring = tilde.rho + deriv1_line(anti.Phi, h)
    phi_tk1 = dk(vars.Phi_t, k + 1)
    psi2k = dk(vars.Psi_t[1], k)
    psi3k = dk(vars.Psi_t[2], k)
    mu_tot = gas.lam + 2.0 * gas.mu
    cross = trapz_line(
        phi_tk1 * dk(vars.Psi_t[0], k)
        + mu_tot / (2.0 * tilde.rho * tilde.theta) * phi_tk1**2
        - mu_tot * deriv1_line(anti.Phi, h) * phi_tk1**2 / (2.0 * rho_ring * tilde.rho),
        h,
    )
    Ek = Et + trapz_line(psi2k**2 + psi3k**2, h) + cross_const * cross
    return {"Etilde": float(Et), "K": Kk, "G": Gk, "E": float(Ek), "n_exponent": n_exp}


def weighted_norm(
    field: np.ndarray,
    x1: np.ndarray,
    kernel: str,
    alpha: float,
    t: float,
    c: float,
    lam1: float | None = None,
    lam3: float | None = None,
) -> float:
    """Quadrature of |field|^2 against a Gaussian space-time kernel.

    kernel 'omega': (1+t)^-alpha exp(-c x^2/(1+t));
    kernel 'D': same but summed over the three wave centers (0 and the two
    acoustic rays, which require lam1/lam3);
    kernel 'omega_tilde': alpha forced to 1/2 with c the reduced constant.
    """
    if c <= 0.0:
        raise ValueError(f"kernel constant must be positive, got {c}")
    x1 = np.asarray(x1, dtype=float)
    h = x1[1] - x1[0]
    s = 1.0 + t
    if kernel == "omega":
        w = s**-alpha * np.exp(-c * x1**2 / s)
    elif kernel == "omega_tilde":
        w = s**-0.5 * np.exp(-c * x1**2 / s)
    elif kernel == "D":
        if lam1 is None or lam3 is None:
            raise ValueError("kernel 'D' requires lam1 and lam3")
        w = s**-alpha * (
            np.exp(-c * x1**2 / s)
            + np.exp(-c * (x1 - lam1 * s) ** 2 / s)
            + np.exp(-c * (x1 - lam3 * s) ** 2 / s)
        )
    else:
        raise ValueError(f"unknown kernel {kernel!r}")
    return float(trapz_line(np.abs(field) ** 2 * w, h))


def poincare_fit(
    times: np.ndarray,
    lhs_density: np.ndarray,
    rhs_density: np.ndarray,
    c1_grid: np.ndarray | None = None,
) -> dict:
    """Smallest (C0, C1) on a grid with
    integral(lhs) <= C0 + C1 integral(rhs) at every recorded time.

    C1 is the smallest grid value at or above the largest increment slope
    of the cumulative integrals; C0 then absorbs the remainder.
    """
    times = np.asarray(times, dtype=float)
    lhs = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(times) * (lhs_density[1:] + lhs_density[:-1]))])
    rhs = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(times) * (rhs_density[1:] + rhs_density[:-1]))])
    if c1_grid is None:
        c1_grid = np.logspace(-4, 4, 129)
    mask = rhs > 0
    if not mask.any():
        return {"C0": float(lhs.max(initial=0.0)), "C1": 0.0, "lhs": lhs, "rhs": rhs}
    slope = float(np.max(lhs[mask] / rhs[mask]))
    above = c1_grid[c1_grid >= slope]
    c1 = float(above[0]) if above.size else float(c1_grid[-1])
    c0 = float(max(0.0, np.max(lhs - c1 * rhs)))
    return {"C0": c0, "C1": c1, "lhs": lhs, "rhs": rhs, "raw_slope": slope}
