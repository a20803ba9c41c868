"""Associated Legendre functions, spherical harmonics, and Wigner d at pi/2.

Spherical harmonics follow the Condon-Shortley phase convention with the
``(-1)**m`` factor folded into the associated Legendre functions:

    Y_lm(theta, phi) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)
                       P_l^m(cos theta) exp(i m phi)

and ``Y_{l,-m} = (-1)**m conj(Y_lm)``.  Normalized theta profiles are
produced by an upward recurrence in degree from the sectoral seed, which
is stable over the whole supported range; unnormalized ``(l-m)!/(l+m)!``
factors are never materialized.

Wigner small-d values at ``beta = pi/2`` (the Delta matrices) are built by
composing spin one-half plane rotations, two half-steps per degree.  All
entries stay bounded by one, so no rescaling is needed at the band-limits
this package targets (tested through L = 128, stable well past L = 1024).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .samples import GridDescriptor, check_bandlimit, flat_index, node_angles

__all__ = [
    "legendre",
    "ylm",
    "DeltaTable",
    "build_delta_table",
    "norm_legendre_tables",
    "ylm_matrix",
    "cached_delta_table",
    "cached_ylm_matrix",
]

_INV_SQRT_4PI = 0.5 / math.sqrt(math.pi)


def legendre(el: int, m: int, x: float) -> float:
    """Associated Legendre function ``P_l^m(x)`` with Condon-Shortley phase.

    Args:
        el: Degree, ``el >= 0``.
        m: Order, ``0 <= m <= el``.
        x: Argument in ``[-1, 1]``.

    Returns:
        ``P_l^m(x)`` including the ``(-1)**m`` factor.
    """
    if el < 0 or not 0 <= m <= el:
        raise ValueError(f"invalid Legendre index (el={el}, m={m})")
    if not -1.0 <= x <= 1.0:
        raise ValueError(f"Legendre argument must lie in [-1, 1], got {x!r}")
    # P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}, then upward in degree.
    pmm = 1.0
    if m > 0:
        s = math.sqrt((1.0 - x) * (1.0 + x))
        for k in range(1, m + 1):
            pmm *= -(2 * k - 1) * s
    if el == m:
        return pmm
    pm1 = x * (2 * m + 1) * pmm
    if el == m + 1:
        return pm1
    for ell in range(m + 2, el + 1):
        pm1, pmm = (
            (x * (2 * ell - 1) * pm1 - (ell + m - 1) * pmm) / (ell - m),
            pm1,
        )
    return pm1


def _norm_theta_profile(el: int, m: int, x: float) -> float:
    # sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(x) for m >= 0, via the
    # normalized recurrence (no factorials).
    s = math.sqrt((1.0 - x) * (1.0 + x))
    pmm = _INV_SQRT_4PI
    for k in range(1, m + 1):
        pmm *= -math.sqrt((2 * k + 1) / (2.0 * k)) * s
    if el == m:
        return pmm
    pm1 = x * math.sqrt(2.0 * m + 3.0) * pmm
    if el == m + 1:
        return pm1
    for ell in range(m + 2, el + 1):
        a = math.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
        b = math.sqrt(((ell - 1.0) ** 2 - m * m) / (4.0 * (ell - 1.0) ** 2 - 1.0))
        pm1, pmm = a * (x * pm1 - b * pmm), pm1
    return pm1


def ylm(el: int, m: int, theta: float, phi: float) -> complex:
    """Spherical harmonic ``Y_lm`` at a point, any ``|m| <= el``.

    Negative orders use ``Y_{l,-m} = (-1)**m conj(Y_lm)``.
    """
    if el < 0 or abs(m) > el:
        raise ValueError(f"invalid harmonic index (el={el}, m={m})")
    am = abs(m)
    profile = _norm_theta_profile(el, am, math.cos(theta))
    phase = complex(math.cos(am * phi), math.sin(am * phi))
    val = profile * phase
    if m < 0:
        val = (-1) ** am * np.conj(val)
    return complex(val)


def norm_legendre_tables(L: int, x: np.ndarray) -> list[np.ndarray]:
    """Normalized theta profiles for all degrees below ``L`` at nodes ``x``.

    Args:
        L: Band-limit.
        x: Vector of ``cos(theta)`` values.

    Returns:
        List indexed by order ``m``; entry ``m`` is an array of shape
        ``(L - m, len(x))`` whose row ``j`` holds
        ``sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(x)`` for ``l = m + j``.
    """
    L = check_bandlimit(L)
    x = np.asarray(x, dtype=np.float64)
    s = np.sqrt((1.0 - x) * (1.0 + x))
    tables: list[np.ndarray] = []
    pmm = np.full_like(x, _INV_SQRT_4PI)
    for m in range(L):
        if m > 0:
            pmm = pmm * (-math.sqrt((2 * m + 1) / (2.0 * m))) * s
        tab = np.empty((L - m, x.size))
        tab[0] = pmm
        if L - m > 1:
            tab[1] = x * math.sqrt(2.0 * m + 3.0) * pmm
        for ell in range(m + 2, L):
            a = math.sqrt((4.0 * ell * ell - 1.0) / (ell * ell - m * m))
            b = math.sqrt(
                ((ell - 1.0) ** 2 - m * m) / (4.0 * (ell - 1.0) ** 2 - 1.0)
            )
            tab[ell - m] = a * (x * tab[ell - m - 1] - b * tab[ell - m - 2])
        tables.append(tab)
    return tables


def ylm_matrix(grid: GridDescriptor) -> np.ndarray:
    """Dense synthesis matrix ``Y[i, flat_index(l, m)] = Y_lm(node_i)``.

    Multiplying a flat coefficient vector by this matrix evaluates the
    band-limited expansion at every stored sample, which is the inverse
    transform written as a single dense operator.  Intended for reference
    paths and for the inpainting solver at desk-scale band-limits.
    """
    L = grid.L
    th, ph = node_angles(grid)
    tables = norm_legendre_tables(L, np.cos(th))
    mat = np.empty((grid.n_samples, L * L), dtype=np.complex128)
    for m in range(L):
        phase = np.exp(1j * m * ph)
        ells = np.arange(m, L)
        cols_pos = ells * ells + ells + m
        mat[:, cols_pos] = (tables[m] * phase[None, :]).T
        if m > 0:
            cols_neg = ells * ells + ells - m
            mat[:, cols_neg] = ((-1) ** m) * (tables[m] * np.conj(phase)[None, :]).T
    return mat


@dataclass(frozen=True)
class DeltaTable:
    """Wigner small-d values at ``beta = pi/2`` for all degrees below ``L``.

    ``slice(el)`` has shape ``(2 el + 1, 2 el + 1)`` and is indexed by
    ``[m + el, n + el]``.
    """

    L: int
    _slices: tuple

    def slice(self, el: int) -> np.ndarray:
        if not 0 <= el < self.L:
            raise ValueError(f"degree {el} outside table range [0, {self.L})")
        return self._slices[el]

    def value(self, el: int, m: int, n: int) -> float:
        if abs(m) > el or abs(n) > el:
            raise ValueError(f"invalid orders (m={m}, n={n}) for degree {el}")
        return float(self.slice(el)[m + el, n + el])


def _half_step(old: np.ndarray) -> np.ndarray:
    # One spin one-half rotation composed into the table: degree j - 1/2 to
    # degree j at beta = pi/2, where cos(beta/2) = sin(beta/2) = 1/sqrt(2).
    n = old.shape[0]  # n = 2j, old holds 2j values per axis
    c = 1.0 / math.sqrt(2.0)
    k = np.arange(1, n + 1, dtype=np.float64)
    root = np.sqrt(k)
    rootc = np.sqrt(k[::-1])  # sqrt(2j - k) for k = 0 .. n-1
    new = np.zeros((n + 1, n + 1))
    new[1:, 1:] += np.outer(root, root) * old
    new[1:, :n] -= np.outer(root, rootc) * old
    new[:n, 1:] += np.outer(rootc, root) * old
    new[:n, :n] += np.outer(rootc, rootc) * old
    new *= c / n
    return new


def build_delta_table(L: int) -> DeltaTable:
    """All ``d^l_{mn}(pi/2)`` for ``l < L`` by half-step rotation composition.

    Each degree is reached from the previous one through two half-integer
    steps, each composing one more spin one-half factor into the matrix.
    """
    L = check_bandlimit(L)
    slices = [np.array([[1.0]])]
    cur = slices[0]
    for _ in range(1, L):
        cur = _half_step(_half_step(cur))
        slices.append(cur)
    for s in slices:
        s.flags.writeable = False
    return DeltaTable(L, tuple(slices))


@lru_cache(maxsize=8)
def cached_delta_table(L: int) -> DeltaTable:
    """Memoized :func:`build_delta_table` (tables are immutable)."""
    return build_delta_table(L)


@lru_cache(maxsize=4)
def cached_ylm_matrix(grid: GridDescriptor) -> np.ndarray:
    """Memoized read-only :func:`ylm_matrix` (grids hash by kind and L)."""
    mat = ylm_matrix(grid)
    mat.flags.writeable = False
    return mat
