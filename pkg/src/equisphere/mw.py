"""McEwen-Wiaux sampling theorem: FFT chain through the torus.

The forward transform runs, in order:

1. ``G_m(theta_t)``: length ``2L - 1`` FFTs over longitude with a
   ``2 pi / (2L - 1)`` prefactor (``e^{-i m phi}`` convention).
2. Periodic extension of each ``G_m`` to colatitudes covering ``[0, 2 pi)``
   with the parity factor ``(-1)**m``; the reflection uses rows
   ``theta_{2L-2-t}`` so the pole row is never duplicated.
3. ``F_{mm'}``: FFTs over the extended colatitude axis.  The nodes sit at
   ``theta_t = 2 pi (t + 1/2) / (2L - 1)``, so each frequency picks up a
   half-sample phase ``e^{-i pi m' / (2L - 1)}``.
4. ``G_{mm'} = 2 pi sum_{m''} F_{mm''} w(m'' - m')`` where ``w`` is the
   exact integral of ``sin(theta) e^{i m' theta}`` over ``[0, pi]``.
5. The Delta contraction
   ``f_lm = i**m sqrt((2l+1)/(4 pi)) sum_{m'} D^l_{m'm} D^l_{m'0} G_{mm'}``.

Every step is exact for band-limited inputs, so the whole chain is an
exact forward transform at ``O(L**3)`` cost.  The inverse runs the same
factorization in reverse and ends with an inverse FFT onto the sample
grid.  Only spin zero (scalar) signals are supported.
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
    expand,
    make_grid,
)
from .wigner import cached_delta_table, ylm_matrix

__all__ = [
    "MwWeights",
    "TorusSpectrum",
    "mw_weights",
    "mw_torus_spectrum",
    "mw_forward",
    "mw_inverse",
    "mw_integrate",
    "mw_inverse_direct",
    "mw_sample_weights",
]

# Construction must fail loudly if q picks up imaginary residue beyond this.
_IMAG_TOL = 1e-12

_I_POW = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


def _ipow(m: np.ndarray) -> np.ndarray:
    """Exact ``i**m`` for integer ``m`` (any sign)."""
    return _I_POW[np.asarray(m) % 4]


def _weight_fn(mp: np.ndarray) -> np.ndarray:
    # w(m') = int_0^pi sin(theta) e^{i m' theta} dtheta
    mp = np.asarray(mp)
    w = np.zeros(mp.shape, dtype=np.complex128)
    even = mp % 2 == 0
    w[even] = 2.0 / (1.0 - mp[even].astype(np.float64) ** 2)
    w[mp == 1] = 0.5j * np.pi
    w[mp == -1] = -0.5j * np.pi
    return w


@dataclass(frozen=True)
class MwWeights:
    """Convolution weights ``w``, their transform ``v``, and the row rule ``q``.

    ``w`` spans ``m' = -2(L-1) .. 2(L-1)`` (entry ``m' + 2(L-1)``), ``v``
    covers the ``2L - 1`` extended colatitude nodes, and ``q`` holds the
    explicit per-row quadrature weights for the ``L`` sphere rows.
    """

    L: int
    w: np.ndarray
    v: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        for name, n, dtype in (
            ("w", 4 * self.L - 3, np.complex128),
            ("v", 2 * self.L - 1, np.complex128),
            ("q", self.L, np.float64),
        ):
            arr = np.asarray(getattr(self, name), dtype=dtype)
            if arr.shape != (n,):
                raise ValueError(f"{name} must have shape ({n},), got {arr.shape}")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def weight(self, mp: int) -> complex:
        """``w(m')`` for ``|m'| <= 2(L-1)``."""
        if abs(mp) > 2 * (self.L - 1):
            raise ValueError(f"m'={mp} outside tabulated range for L={self.L}")
        return complex(self.w[mp + 2 * (self.L - 1)])


def mw_weights(L: int) -> MwWeights:
    """Quadrature data for the MW grid at band-limit ``L``.

    ``q(theta_t) = (2 pi / (2L-1)) [v(theta_t) + (1 - delta_{t,L-1})
    v(theta_{2L-2-t})]`` where ``v`` is the inverse DFT of the reflected
    weights ``w(-m')`` over ``|m'| < L``.
    """
    L = check_bandlimit(L)
    n = 2 * L - 1
    w = _weight_fn(np.arange(-2 * (L - 1), 2 * (L - 1) + 1))
    mp = np.arange(-(L - 1), L)
    theta_ext = np.pi * (2 * np.arange(n) + 1) / n
    v = np.exp(1j * np.outer(theta_ext, mp)) @ _weight_fn(-mp) / n
    q = np.array(
        [
            (2 * np.pi / n) * (v[t] + (0 if t == L - 1 else v[2 * L - 2 - t]))
            for t in range(L)
        ]
    )
    if np.abs(q.imag).max() > _IMAG_TOL:
        raise ValueError(
            f"MW weights have imaginary residue {np.abs(q.imag).max():.3e} "
            f"above {_IMAG_TOL:.0e}; convention error likely"
        )
    return MwWeights(L, w, v, q.real)


@dataclass(frozen=True)
class TorusSpectrum:
    """Intermediate Fourier data of the forward chain.

    ``g`` has shape ``(L, 2L-1)`` with rows indexed by ``t`` and columns by
    centered order ``m`` (entry ``m + L - 1``); ``g_ext`` extends the rows
    to the ``2L - 1`` torus nodes; ``f_mm`` and ``g_mm`` are indexed
    ``[m + L - 1, m' + L - 1]``.
    """

    L: int
    g: np.ndarray
    g_ext: np.ndarray
    f_mm: np.ndarray
    g_mm: np.ndarray

    def __post_init__(self):
        L, n = self.L, 2 * self.L - 1
        # Extension symmetry is dictated by the construction; a violation
        # means rows and parity got out of step somewhere upstream.
        par = (-1.0) ** np.abs(np.arange(-(L - 1), L))
        for t in range(L - 1):
            if not np.array_equal(self.g_ext[2 * L - 2 - t], par * self.g_ext[t]):
                raise AssertionError("periodic extension symmetry violated")


def _check_grid(signal: SphereSignal) -> GridDescriptor:
    if signal.grid.kind is not GridKind.MW:
        raise GridMismatchError(f"expected MW grid, got {signal.grid.kind}")
    return signal.grid


def mw_torus_spectrum(signal: SphereSignal) -> TorusSpectrum:
    """Run steps 1-4 of the forward chain and keep the intermediates."""
    grid = _check_grid(signal)
    L = grid.L
    n = 2 * L - 1
    f = expand(signal)
    g = (2 * np.pi / n) * np.fft.fftshift(np.fft.fft(f, axis=1), axes=1)
    par = (-1.0) ** np.abs(np.arange(-(L - 1), L))
    g_ext = np.vstack([g, par[None, :] * g[L - 2 :: -1]]) if L > 1 else g.copy()
    # FFT over the extended colatitude axis; half-sample node offset.
    mp = np.arange(-(L - 1), L)
    farr = np.fft.fftshift(np.fft.fft(g_ext, axis=0), axes=0)  # [m', m]
    f_mm = farr.T * np.exp(-1j * np.pi * mp / n)[None, :] / (2 * np.pi * n)
    wrev = _weight_fn(2 * (L - 1) - np.arange(4 * L - 3))
    g_mm = 2 * np.pi * np.vstack(
        [np.convolve(f_mm[i], wrev, mode="valid") for i in range(n)]
    )
    return TorusSpectrum(L, g, g_ext, f_mm, g_mm)


def mw_forward(signal: SphereSignal) -> HarmonicCoeffs:
    """Harmonic coefficients of an MW-sampled band-limited signal.

    Exact (to rounding) for signals band-limited at the grid's ``L``.
    """
    spectrum = mw_torus_spectrum(signal)
    L = spectrum.L
    delta = cached_delta_table(L)
    coeffs = np.zeros(L * L, dtype=np.complex128)
    for el in range(L):
        D = delta.slice(el)
        weighted = D * D[:, el][:, None]  # Delta_{m'm} Delta_{m'0}
        block = spectrum.g_mm[L - 1 - el : L + el, L - 1 - el : L + el]
        s = np.einsum("am,ma->m", weighted, block)
        marr = np.arange(-el, el + 1)
        coeffs[el * el + el + marr] = (
            _ipow(marr) * np.sqrt((2 * el + 1) / (4 * np.pi)) * s
        )
    return HarmonicCoeffs(L, coeffs)


def mw_inverse(coeffs: HarmonicCoeffs, L: int | None = None) -> SphereSignal:
    """Synthesize the band-limited expansion at every MW node."""
    if L is None:
        L = coeffs.L
    if L != coeffs.L:
        raise GridMismatchError(f"coefficients have L={coeffs.L}, requested {L}")
    grid = make_grid(GridKind.MW, L)
    n = 2 * L - 1
    delta = cached_delta_table(L)
    f_mm = np.zeros((n, n), dtype=np.complex128)  # [m, m']
    for el in range(L):
        D = delta.slice(el)
        weighted = D * D[:, el][:, None]
        marr = np.arange(-el, el + 1)
        vals = (
            np.sqrt((2 * el + 1) / (4 * np.pi))
            * _ipow(-marr)
            * coeffs.values[el * el + el + marr]
        )
        f_mm[L - 1 - el : L + el, L - 1 - el : L + el] += np.einsum(
            "m,am->ma", vals, weighted
        )
    mp = np.arange(-(L - 1), L)
    f_mm = f_mm * np.exp(1j * np.pi * mp / n)[None, :]
    torus = np.fft.ifft2(np.fft.ifftshift(f_mm.T)) * n * n  # [t, p]
    full = torus[:L, :]
    out = np.empty(grid.n_samples, dtype=np.complex128)
    out[: grid.n_samples - 1] = full[: L - 1, :].ravel()
    out[-1] = full[L - 1, 0]
    return SphereSignal(grid, out)


def mw_sample_weights(grid: GridDescriptor) -> np.ndarray:
    """Quadrature weight attached to each stored sample (pole ring folded)."""
    if grid.kind is not GridKind.MW:
        raise GridMismatchError(f"expected MW grid, got {grid.kind}")
    q = mw_weights(grid.L).q
    w = np.empty(grid.n_samples)
    w[: grid.n_samples - 1] = np.repeat(q[: grid.L - 1], grid.n_phi)
    w[-1] = q[grid.L - 1] * grid.n_phi
    return w


def mw_integrate(signal: SphereSignal) -> complex:
    """Integral of a band-limited signal over the sphere via the MW rule.

    Equals ``sqrt(4 pi) f_00`` whenever the signal is band-limited at the
    grid's ``L``.
    """
    grid = _check_grid(signal)
    return complex(mw_sample_weights(grid) @ signal.values)


def mw_inverse_direct(coeffs: HarmonicCoeffs, L: int | None = None) -> SphereSignal:
    """Reference inverse path: dense synthesis matrix applied to coefficients."""
    if L is None:
        L = coeffs.L
    if L != coeffs.L:
        raise GridMismatchError(f"coefficients have L={coeffs.L}, requested {L}")
    grid = make_grid(GridKind.MW, L)
    return SphereSignal(grid, ylm_matrix(grid) @ coeffs.values)
