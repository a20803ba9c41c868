"""Driscoll-Healy sampling theorem: weights, forward, inverse, integration.

The forward transform is the explicit quadrature

    f_lm = sum_t sum_p q(theta_t) f(theta_t, phi_p) conj(Y_lm)

evaluated by separation of variables: length ``2L`` FFTs over longitude,
then weighted contractions against normalized Legendre profiles over the
``2L`` latitude rows, for an ``O(L**3)`` total.  The quadrature weights

    q(theta_t) = (2 pi / L**2) sin(theta_t)
                 sum_{k<L} sin((2k+1) theta_t) / (2k+1)

satisfy ``sum_t q(theta_t) P_l(cos theta_t) = (2 pi / L) delta_{l0}`` for
every ``l < 2L``, which makes the rule exact for signals band-limited at
``L``.  The pole row has zero weight, so the forward transform ignores it;
the inverse still synthesizes it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .samples import (
    GridDescriptor,
    GridKind,
    GridMismatchError,
    HarmonicCoeffs,
    SphereSignal,
    check_bandlimit,
    contract,
    expand,
    make_grid,
    theta_nodes,
)
from .wigner import norm_legendre_tables, ylm_matrix

__all__ = [
    "DhWeights",
    "dh_weights",
    "dh_forward",
    "dh_inverse",
    "dh_integrate",
    "dh_forward_direct",
    "dh_inverse_direct",
    "dh_sample_weights",
]


@dataclass(frozen=True)
class DhWeights:
    """Per-latitude-row quadrature weights ``q(theta_t)``, ``t < 2L``."""

    L: int
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        if q.shape != (2 * self.L,):
            raise ValueError(f"expected {2 * self.L} weights, got shape {q.shape}")
        q = q.copy()
        q.flags.writeable = False
        object.__setattr__(self, "q", q)


def dh_weights(L: int) -> DhWeights:
    """Quadrature weights for the DH grid at band-limit ``L``."""
    L = check_bandlimit(L)
    theta = np.pi * np.arange(2 * L) / (2 * L)
    k = 2 * np.arange(L) + 1
    # sum_k sin((2k+1) theta) / (2k+1), one row per theta
    s = (np.sin(np.outer(theta, k)) / k).sum(axis=1)
    q = (2 * np.pi / L**2) * np.sin(theta) * s
    return DhWeights(L, q)


def _check_grid(signal: SphereSignal) -> GridDescriptor:
    if signal.grid.kind is not GridKind.DH:
        raise GridMismatchError(f"expected DH grid, got {signal.grid.kind}")
    return signal.grid


def _coeff_rows(L: int, m: int) -> np.ndarray:
    ells = np.arange(m, L)
    return ells * ells + ells + m


def dh_forward(signal: SphereSignal) -> HarmonicCoeffs:
    """Harmonic coefficients of a DH-sampled band-limited signal.

    Exact (to rounding) for signals band-limited at the grid's ``L``.
    """
    grid = _check_grid(signal)
    L = grid.L
    n_phi = grid.n_phi
    f = expand(signal)
    g = np.fft.fft(f, axis=1)  # column m holds sum_p f e^{-i m phi_p}
    wq = dh_weights(L).q
    wg = wq[:, None] * g
    tables = norm_legendre_tables(L, np.cos(theta_nodes(grid)))
    coeffs = np.zeros(L * L, dtype=np.complex128)
    for m in range(L):
        coeffs[_coeff_rows(L, m)] = tables[m] @ wg[:, m]
        if m > 0:
            coeffs[_coeff_rows(L, m) - 2 * m] = (-1) ** m * (
                tables[m] @ wg[:, n_phi - m]
            )
    return HarmonicCoeffs(L, coeffs)


def dh_inverse(coeffs: HarmonicCoeffs, L: int | None = None) -> SphereSignal:
    """Synthesize the band-limited expansion at every DH node."""
    if L is None:
        L = coeffs.L
    if L != coeffs.L:
        raise GridMismatchError(f"coefficients have L={coeffs.L}, requested {L}")
    grid = make_grid(GridKind.DH, L)
    tables = norm_legendre_tables(L, np.cos(theta_nodes(grid)))
    h = np.zeros((grid.n_theta, grid.n_phi), dtype=np.complex128)
    for m in range(L):
        h[:, m] = tables[m].T @ coeffs.values[_coeff_rows(L, m)]
        if m > 0:
            h[:, grid.n_phi - m] = (-1) ** m * (
                tables[m].T @ coeffs.values[_coeff_rows(L, m) - 2 * m]
            )
    f = np.fft.ifft(h, axis=1) * grid.n_phi
    return SphereSignal(grid, contract(grid, f))


def dh_sample_weights(grid: GridDescriptor) -> np.ndarray:
    """Quadrature weight attached to each stored sample (pole ring folded)."""
    if grid.kind is not GridKind.DH:
        raise GridMismatchError(f"expected DH grid, got {grid.kind}")
    q = dh_weights(grid.L).q
    w = np.empty(grid.n_samples)
    w[0] = q[0] * grid.n_phi
    w[1:] = np.repeat(q[1:], grid.n_phi)
    return w


def dh_integrate(signal: SphereSignal) -> complex:
    """Integral of a band-limited signal over the sphere via the DH rule.

    Equals ``sqrt(4 pi) f_00`` whenever the signal is band-limited at the
    grid's ``L``.
    """
    grid = _check_grid(signal)
    return complex(dh_sample_weights(grid) @ signal.values)


def dh_forward_direct(signal: SphereSignal) -> HarmonicCoeffs:
    """Reference forward path: one dense quadrature sum per coefficient.

    O(L**4); kept as an independent check on the separated transform.
    """
    grid = _check_grid(signal)
    w = dh_sample_weights(grid)
    coeffs = ylm_matrix(grid).conj().T @ (w * signal.values)
    return HarmonicCoeffs(grid.L, coeffs)


def dh_inverse_direct(coeffs: HarmonicCoeffs, L: int | None = None) -> SphereSignal:
    """Reference inverse path: dense synthesis matrix applied to coefficients."""
    if L is None:
        L = coeffs.L
    if L != coeffs.L:
        raise GridMismatchError(f"coefficients have L={coeffs.L}, requested {L}")
    grid = make_grid(GridKind.DH, L)
    return SphereSignal(grid, ylm_matrix(grid) @ coeffs.values)
