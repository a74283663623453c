"""Channel grid and conserved state containers.

The channel is [-L, L] x T^2 with a node-centered uniform grid in x1 and
equispaced periodic points on the unit torus in x2, x3.  Conserved fields
are stored as a single (5, n1, n2, n3) array ordered
(rho, m1, m2, m3, E) with E the total energy density.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fd import fourier_diff_matrix
from .gas import GasParams, StateError

GHOST = 3

FIELD_NAMES = ("rho", "m1", "m2", "m3", "energy")


@dataclass(frozen=True)
class ChannelGrid:
    """Truncated channel grid; n1 points span [-L, L] inclusive."""

    L: float
    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        if self.n1 < 128:
            raise ValueError(f"n1 must be at least 128, got {self.n1}")
        for name in ("n2", "n3"):
            n = getattr(self, name)
            # n == 1 is the collapsed zero-mode line representation.
            if n != 1 and (n < 4 or (n & (n - 1)) != 0):
                raise ValueError(f"{name} must be a power of two >= 4, got {n}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")

    @property
    def dx1(self) -> float:
        return 2.0 * self.L / (self.n1 - 1)

    @property
    def x1(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.n1)

    @property
    def x2(self) -> np.ndarray:
        return np.arange(self.n2) / self.n2

    @property
    def x3(self) -> np.ndarray:
        return np.arange(self.n3) / self.n3

    def x1_ghost(self, side: str) -> np.ndarray:
        """Coordinates of the three ghost nodes beyond one end."""
        h = self.dx1
        if side == "left":
            return -self.L - h * np.arange(GHOST, 0, -1)
        if side == "right":
            return self.L + h * np.arange(1, GHOST + 1)
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")

    def horizon_ok(self, t_end: float) -> bool:
        """Whether the domain satisfies the sizing rule L >= 10 sqrt(1+t_end)."""
        return self.L >= 10.0 * np.sqrt(1.0 + t_end)

    def cell_volume(self) -> float:
        return self.dx1 / (self.n2 * self.n3)


def transverse_matrices(n2: int, n3: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """First and second Fourier differentiation matrices for both torus axes."""
    D2a = fourier_diff_matrix(n2, 1.0, 1)
    D2b = fourier_diff_matrix(n2, 1.0, 2)
    D3a = fourier_diff_matrix(n3, 1.0, 1)
    D3b = fourier_diff_matrix(n3, 1.0, 2)
    return D2a, D2b, D3a, D3b


@dataclass
class ConservedField:
    """Solver state: conserved arrays over the grid plus a time stamp."""

    grid: ChannelGrid
    U: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.U = np.ascontiguousarray(self.U, dtype=float)
        expect = (5, self.grid.n1, self.grid.n2, self.grid.n3)
        if self.U.shape != expect:
            raise ValueError(f"state shape {self.U.shape} != {expect}")

    def copy(self) -> "ConservedField":
        return ConservedField(self.grid, self.U.copy(), self.t)

    @property
    def rho(self) -> np.ndarray:
        return self.U[0]

    @property
    def m(self) -> np.ndarray:
        return self.U[1:4]

    @property
    def energy(self) -> np.ndarray:
        return self.U[4]

    def velocity(self) -> np.ndarray:
        return self.U[1:4] / self.U[0]

    def temperature(self) -> np.ndarray:
        u = self.velocity()
        return self.U[4] / self.U[0] - 0.5 * (u[0] ** 2 + u[1] ** 2 + u[2] ** 2)

    def pressure(self, gas: GasParams) -> np.ndarray:
        return gas.gas_const * self.U[0] * self.temperature()

    def validate(self) -> None:
        """Raise StateError (with a cell index) on invariant violations."""
        if not np.isfinite(self.U).all():
            idx = np.unravel_index(
                np.argmin(np.isfinite(self.U).view(np.int8)), self.U.shape
            )
            raise StateError(f"non-finite value in field {FIELD_NAMES[idx[0]]} at cell {idx[1:]}")
        rho = self.U[0]
        if rho.min() <= 0.0:
            idx = np.unravel_index(np.argmin(rho), rho.shape)
            raise StateError(f"nonpositive density {rho[idx]} at cell {idx}")
        theta = self.temperature()
        if theta.min() <= 0.0:
            idx = np.unravel_index(np.argmin(theta), theta.shape)
            raise StateError(f"nonpositive temperature {theta[idx]} at cell {idx}")


def constant_state(grid: ChannelGrid, rho: float, theta: float, gas: GasParams) -> ConservedField:
    """Rest state at uniform density and temperature."""
    U = np.zeros((5, grid.n1, grid.n2, grid.n3))
    U[0] = rho
    U[4] = rho * theta
    return ConservedField(grid, U)
