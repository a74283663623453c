"""Discrete derivative stencils shared by the solver and the diagnostics.

All x1 derivatives in the package use the same 4th-order central stencils
(with one-sided closures at line ends) so that energies and residuals are
evaluated with the discretization the solver actually integrates.
Transverse (periodic) derivatives use exact Fourier differentiation
matrices, which for the small torus resolutions used here are both exact
on band-limited data and faster than FFTs.
"""

from __future__ import annotations

import numpy as np

# 4th-order central first derivative: (f[i-2] - 8 f[i-1] + 8 f[i+1] - f[i+2]) / (12 h)
D1_COEFFS = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
# 4th-order central second derivative: (-f[i-2] + 16 f[i-1] - 30 f[i] + 16 f[i+1] - f[i+2]) / (12 h^2)
D2_COEFFS = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0

# One-sided 4th-order first-derivative closures for the two cells nearest
# each end of a line (used only by diagnostics; the solver uses ghosts).
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def deriv1_line(f: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """First derivative of a line field, 4th order, one-sided at the ends."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, -1)
    n = f.shape[-1]
    if n < 5:
        raise ValueError(f"need at least 5 points for the 4th-order stencil, got {n}")
    out = np.empty_like(f)
    out[..., 2:-2] = (
        D1_COEFFS[0] * f[..., :-4]
        + D1_COEFFS[1] * f[..., 1:-3]
        + D1_COEFFS[3] * f[..., 3:-1]
        + D1_COEFFS[4] * f[..., 4:]
    ) / h
    out[..., 0] = np.tensordot(f[..., 0:5], _EDGE0, axes=(-1, 0)) / h
    out[..., 1] = np.tensordot(f[..., 0:5], _EDGE1, axes=(-1, 0)) / h
    out[..., -2] = -np.tensordot(f[..., -5:][..., ::-1], _EDGE1, axes=(-1, 0)) / h
    out[..., -1] = -np.tensordot(f[..., -5:][..., ::-1], _EDGE0, axes=(-1, 0)) / h
    return np.moveaxis(out, -1, axis)


def deriv1_periodic(f: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """First derivative of a periodic field with the central 4th-order stencil."""
    f = np.asarray(f, dtype=float)
    out = np.zeros_like(f)
    for k, c in zip((-2, -1, 1, 2), (D1_COEFFS[0], D1_COEFFS[1], D1_COEFFS[3], D1_COEFFS[4])):
        out += c * np.roll(f, -k, axis=axis)
    return out / h


def cumtrapz_line(f: np.ndarray, h: float) -> np.ndarray:
    """Cumulative trapezoid integral along the last axis, zero at the left end."""
    f = np.asarray(f, dtype=float)
    out = np.zeros_like(f)
    np.cumsum(0.5 * h * (f[..., 1:] + f[..., :-1]), axis=-1, out=out[..., 1:])
    return out


def trapz_line(f: np.ndarray, h: float) -> np.ndarray | float:
    """Trapezoid quadrature along the last axis."""
    f = np.asarray(f, dtype=float)
    return h * (f[..., 1:-1].sum(axis=-1) + 0.5 * (f[..., 0] + f[..., -1]))


def invert_cumtrapz(F: np.ndarray, h: float, left_value: float = 0.0) -> np.ndarray:
    """Exact discrete inverse of :func:`cumtrapz_line` for a 1-d array.

    Reconstructs f from its cumulative trapezoid given f at the left end.
    Amplifies roundoff linearly in n, which is fine for verification use.
    """
    F = np.asarray(F, dtype=float)
    f = np.empty_like(F)
    f[0] = left_value
    for i in range(1, F.size):
        f[i] = 2.0 * (F[i] - F[i - 1]) / h - f[i - 1]
    return f


def fourier_diff_matrix(n: int, period: float = 1.0, order: int = 1) -> np.ndarray:
    """Real Fourier differentiation matrix on n equispaced periodic points.

    Exact for trigonometric polynomials resolvable on the grid.  For odd
    derivatives the Nyquist mode is dropped (standard choice keeping the
    matrix real and antisymmetric).
    """
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=period / n)
    if order % 2 == 1:
        sym = (1j * k) ** order
        if n % 2 == 0:
            sym[n // 2] = 0.0
    else:
        sym = (1j * k) ** order
    eye = np.eye(n)
    D = np.fft.ifft(sym[:, None] * np.fft.fft(eye, axis=0), axis=0).real
    # Remove the roundoff leak of the constant mode so constants map to
    # exactly zero (row sums vanish analytically).
    D -= D.sum(axis=1, keepdims=True) / n
    return np.ascontiguousarray(D)
