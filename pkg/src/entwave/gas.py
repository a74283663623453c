"""Ideal polytropic gas: thermodynamics, 1-d flux Jacobian, eigenstructure.

Works with the conserved triple (rho, m1, E) of the planar system, where
m1 is the x1 momentum density and E the total energy density.  The gas
constant is normalized to R = gamma - 1, so the specific internal energy
equals the temperature and p = R rho theta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class StateError(ValueError):
    """Raised when a gas state leaves the admissible region."""


@dataclass(frozen=True)
class GasParams:
    """Physical constants of the fluid (all order one, nondimensional)."""

    gamma: float = 5.0 / 3.0
    mu: float = 0.15
    lam: float = 0.0
    kappa: float = 0.3
    entropy_const: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.mu > 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.mu + self.lam < 0.0:
            raise ValueError(f"mu + lam must be nonnegative, got {self.mu + self.lam}")
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @property
    def gas_const(self) -> float:
        """R = gamma - 1 (normalization used throughout)."""
        return self.gamma - 1.0

    @property
    def diffusion_coeff(self) -> float:
        """Coefficient a = kappa / gamma of the wave profile equation."""
        return self.kappa / self.gamma


@dataclass(frozen=True)
class EndStates:
    """Far-field constant states joined by the entropy wave.

    Pressure matches across the wave: R rho_plus theta_plus = R rho_minus
    theta_minus, and the far-field velocity is zero.
    """

    rho_minus: float
    theta_minus: float
    rho_plus: float
    theta_plus: float
    delta: float = field(init=False)

    def __post_init__(self):
        for name in ("rho_minus", "theta_minus", "rho_plus", "theta_plus"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        p_m = self.rho_minus * self.theta_minus
        p_p = self.rho_plus * self.theta_plus
        if abs(p_p - p_m) > 1e-12 * max(p_m, p_p):
            raise ValueError(
                f"pressure mismatch across the wave: rho*theta = {p_m} vs {p_p}"
            )
        object.__setattr__(
            self,
            "delta",
            abs(self.rho_plus - self.rho_minus) + abs(self.theta_plus - self.theta_minus),
        )

    def pressure(self, gas: GasParams) -> float:
        return gas.gas_const * self.rho_minus * self.theta_minus

    def energy_minus(self, gas: GasParams) -> float:
        """Total energy density of the left rest state (= rho theta at rest)."""
        return self.rho_minus * self.theta_minus

    def energy_plus(self, gas: GasParams) -> float:
        return self.rho_plus * self.theta_plus

    def sound_speed_minus(self, gas: GasParams) -> float:
        return np.sqrt(gas.gamma * gas.gas_const * self.theta_minus)

    def sound_speed_plus(self, gas: GasParams) -> float:
        return np.sqrt(gas.gamma * gas.gas_const * self.theta_plus)

    def lambda1_minus(self, gas: GasParams) -> float:
        """First characteristic speed of the left end state (negative)."""
        return -self.sound_speed_minus(gas)

    def lambda3_plus(self, gas: GasParams) -> float:
        """Third characteristic speed of the right end state (positive)."""
        return self.sound_speed_plus(gas)

    def r1_minus(self, gas: GasParams) -> np.ndarray:
        lam = self.lambda1_minus(gas)
        return np.array([1.0, lam, lam * lam / gas.gas_const])

    def r3_plus(self, gas: GasParams) -> np.ndarray:
        lam = self.lambda3_plus(gas)
        return np.array([1.0, lam, lam * lam / gas.gas_const])


def solve_endstates(rho_minus: float, theta_minus: float, rho_plus: float) -> EndStates:
    """Complete the right state from the pressure-match relation."""
    if min(rho_minus, theta_minus, rho_plus) <= 0.0:
        raise ValueError("end-state densities and temperatures must be positive")
    theta_plus = rho_minus * theta_minus / rho_plus
    return EndStates(rho_minus, theta_minus, rho_plus, theta_plus)


@dataclass(frozen=True)
class StatePoint:
    """Conserved state at a point: density, momentum, total energy density."""

    rho: float
    m1: float
    m2: float = 0.0
    m3: float = 0.0
    energy: float = 1.0

    def as_planar(self) -> np.ndarray:
        return np.array([self.rho, self.m1, self.energy])


def primitive_from_conserved(state: StatePoint, gas: GasParams):
    """Velocity, temperature, and pressure of a conserved state.

    Raises :class:`StateError` when density or temperature is nonpositive.
    """
    if not state.rho > 0.0:
        raise StateError(f"nonpositive density: rho = {state.rho}")
    u = np.array([state.m1, state.m2, state.m3]) / state.rho
    theta = state.energy / state.rho - 0.5 * float(u @ u)
    if not theta > 0.0:
        raise StateError(f"nonpositive temperature: theta = {theta} at rho = {state.rho}")
    p = gas.gas_const * state.rho * theta
    return u, theta, p


def conserved_from_primitive(rho: float, u, theta: float, gas: GasParams) -> StatePoint:
    """Inverse of :func:`primitive_from_conserved`."""
    u = np.asarray(u, dtype=float)
    m = rho * u
    energy = rho * (theta + 0.5 * float(u @ u))
    return StatePoint(rho, m[0], m[1], m[2], energy)


def flux_1d(q: np.ndarray, gas: GasParams) -> np.ndarray:
    """Flux of the planar system in the conserved triple (rho, m1, E)."""
    g = gas.gamma
    rho, m1, E = q[..., 0], q[..., 1], q[..., 2]
    return np.stack(
        [
            m1,
            (g - 1.0) * E + 0.5 * (3.0 - g) * m1 * m1 / rho,
            g * m1 * E / rho - 0.5 * (g - 1.0) * m1**3 / rho**2,
        ],
        axis=-1,
    )


def flux_jacobian_1d(state: StatePoint, gas: GasParams) -> np.ndarray:
    """Jacobian of the planar flux with respect to (rho, m1, E)."""
    if not state.rho > 0.0:
        raise StateError(f"nonpositive density: rho = {state.rho}")
    g = gas.gamma
    rho, m1, E = state.rho, state.m1, state.energy
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [
                -0.5 * (3.0 - g) * m1 * m1 / rho**2,
                (3.0 - g) * m1 / rho,
                g - 1.0,
            ],
            [
                -g * m1 * E / rho**2 + (g - 1.0) * m1**3 / rho**3,
                g * E / rho - 1.5 * (g - 1.0) * m1 * m1 / rho**2,
                g * m1 / rho,
            ],
        ]
    )


@dataclass(frozen=True)
class EigenStructure:
    """Eigenvalues and biorthonormal left/right eigenvectors of the flux Jacobian.

    Right eigenvectors are columns of ``right``, normalized so their density
    component equals one; ``left`` rows satisfy left @ right = identity.
    """

    lambdas: np.ndarray
    left: np.ndarray
    right: np.ndarray


def eigenstructure_1d(state: StatePoint, gas: GasParams) -> EigenStructure:
    """Characteristic decomposition of the planar flux Jacobian.

    Eigenvalues are u - c, u, u + c with c the sound speed; the entropy
    field (index 2 of 1..3) carries r2 = (1, u, u^2/2).
    """
    if not state.rho > 0.0:
        raise StateError(f"nonpositive density: rho = {state.rho}")
    g = gas.gamma
    rho, m1, E = state.rho, state.m1, state.energy
    u = m1 / rho
    theta = E / rho - 0.5 * u * u
    if not theta > 0.0:
        raise StateError(f"nonpositive temperature: theta = {theta}")
    c = np.sqrt(g * (g - 1.0) * theta)
    p = (g - 1.0) * rho * theta
    H = (E + p) / rho
    lambdas = np.array([u - c, u, u + c])
    right = np.array(
        [
            [1.0, 1.0, 1.0],
            [u - c, u, u + c],
            [H - u * c, 0.5 * u * u, H + u * c],
        ]
    )
    left = np.linalg.inv(right)
    return EigenStructure(lambdas, left, right)


def _normalized_vectors(q: np.ndarray, gas: GasParams, k: int):
    eig = eigenstructure_1d(StatePoint(q[0], q[1], energy=q[2]), gas)
    return eig.left[k], eig.right[:, k]


def structural_conditions(
    state: StatePoint,
    gas: GasParams,
    field_index: int,
    step: float = 1e-5,
) -> tuple[np.ndarray, np.ndarray]:
    """Directional derivatives of the eigenvector fields along themselves.

    Returns (grad_l . r, grad_r . r) for the requested characteristic field
    (1-based index), each a 3-component array: the derivative of the
    normalized left row and right column in the direction of the right
    eigenvector, by 4th-order central differences in state space.
    """
    if not 1 <= field_index <= 3:
        raise ValueError(f"field_index must be in 1..3, got {field_index}")
    if not 1e-7 <= step <= 1e-3:
        raise ValueError(f"step must lie in [1e-7, 1e-3], got {step}")
    k = field_index - 1
    q0 = state.as_planar()
    _, r0 = _normalized_vectors(q0, gas, k)

    ls, rs = [], []
    for offset in (-2.0, -1.0, 1.0, 2.0):
        l, r = _normalized_vectors(q0 + offset * step * r0, gas, k)
        if np.dot(r, r0) < 0.0:
            raise StateError(
                "eigenvector orientation flipped across the difference stencil"
            )
        ls.append(l)
        rs.append(r)

    def central4(vm2, vm1, vp1, vp2):
        return (vm2 - 8.0 * vm1 + 8.0 * vp1 - vp2) / (12.0 * step)

    grad_l_dot_r = central4(ls[0], ls[1], ls[2], ls[3])
    grad_r_dot_r = central4(rs[0], rs[1], rs[2], rs[3])
    return grad_l_dot_r, grad_r_dot_r
