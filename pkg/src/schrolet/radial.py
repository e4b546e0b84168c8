"""Logarithmic radial grids on positive frequencies and the wavelet
representation W+ of the affine group acting on L^2(R_+).

The grid is organised in geometric cells ``[2**(e + p/Q), 2**(e + (p+1)/Q)]``.
Quadrature points are Gauss-Legendre nodes inside each cell, so a dilation by
``2**(s/Q)`` maps points onto points and acts as an index shift of
``s * n_gauss``.  Dyadic bands ``[2**-q-1, 2**-q]`` are unions of whole cells,
which makes indicator-type profiles exactly representable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

try:  # optional fast path
    import finufft
except ImportError:  # pragma: no cover
    finufft = None

LN2 = float(np.log(2.0))

MEASURES = ("domega", "domega_over_omega")

_NTHREADS = 1  # single-threaded NUFFT keeps summation order, hence output, reproducible


def set_threads(n: int) -> None:
    """Thread count for the NUFFT fast paths."""
    global _NTHREADS
    if n < 1:
        raise ValueError("thread count must be positive")
    _NTHREADS = int(n)


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    omega_min_exp: int
    omega_max_exp: int
    Q: int
    n_gauss: int = 16

    def __post_init__(self):
        if self.Q < 1:
            raise ValueError("Q must be a positive integer")
        if self.omega_min_exp >= self.omega_max_exp:
            raise ValueError("omega_min_exp must be smaller than omega_max_exp")
        if self.n_gauss < 1:
            raise ValueError("n_gauss must be positive")

    # -- cell edges ("nodes") -------------------------------------------------
    @property
    def n_cells(self) -> int:
        return (self.omega_max_exp - self.omega_min_exp) * self.Q

    @cached_property
    def nodes(self) -> np.ndarray:
        """Cell edges ``2**(omega_min_exp + p/Q)``, ``p = 0..n_cells``."""
        octave = 2.0 ** (np.arange(self.Q) / self.Q)
        octs = 2.0 ** np.arange(self.omega_min_exp, self.omega_max_exp, dtype=float)
        out = (octs[:, None] * octave[None, :]).ravel()
        return np.append(out, 2.0 ** self.omega_max_exp)

    @cached_property
    def weights(self) -> np.ndarray:
        """Log-grid weights ``omega_p ln2 / Q`` attached to the edges."""
        return self.nodes * LN2 / self.Q

    # -- quadrature points ----------------------------------------------------
    @cached_property
    def _octave_rule(self):
        x, w = np.polynomial.legendre.leggauss(self.n_gauss)
        edges = 2.0 ** (np.arange(self.Q + 1) / self.Q)
        lo, hi = edges[:-1], edges[1:]
        pts = (0.5 * (hi - lo))[:, None] * x[None, :] + (0.5 * (hi + lo))[:, None]
        wts = (0.5 * (hi - lo))[:, None] * w[None, :]
        return pts.ravel(), wts.ravel()

    @cached_property
    def points(self) -> np.ndarray:
        pts, _ = self._octave_rule
        scale = 2.0 ** np.arange(self.omega_min_exp, self.omega_max_exp, dtype=float)
        return (scale[:, None] * pts[None, :]).ravel()

    @cached_property
    def point_weights(self) -> np.ndarray:
        """Quadrature weights for the measure d(omega)."""
        _, wts = self._octave_rule
        scale = 2.0 ** np.arange(self.omega_min_exp, self.omega_max_exp, dtype=float)
        return (scale[:, None] * wts[None, :]).ravel()

    @property
    def size(self) -> int:
        return self.n_cells * self.n_gauss

    @property
    def points_per_octave(self) -> int:
        return self.Q * self.n_gauss

    def measure_weights(self, measure: str = "domega") -> np.ndarray:
        if measure == "domega":
            return self.point_weights
        if measure == "domega_over_omega":
            return self.point_weights / self.points
        raise ValueError(f"unknown measure {measure!r}; expected one of {MEASURES}")

    def band_slice(self, lo_exp, hi_exp) -> slice:
        """Point indices inside ``[2**lo_exp, 2**hi_exp]`` (exponents in Z/Q).

        Parts of the band outside the grid are clipped.
        """
        lo = Fraction(lo_exp) - self.omega_min_exp
        hi = Fraction(hi_exp) - self.omega_min_exp
        c_lo, c_hi = lo * self.Q, hi * self.Q
        if c_lo.denominator != 1 or c_hi.denominator != 1:
            raise ValueError("band edges are not cell edges of this grid")
        c_lo = min(max(int(c_lo), 0), self.n_cells)
        c_hi = min(max(int(c_hi), 0), self.n_cells)
        return slice(c_lo * self.n_gauss, max(c_hi, c_lo) * self.n_gauss)

    def shift_for(self, a: float) -> int:
        """Point-index shift realising the dilation ``omega -> a * omega``."""
        s = np.log2(a) * self.Q
        si = int(round(s))
        if abs(s - si) > 1e-9:
            raise ValueError(f"dilation {a!r} is not on the lattice 2**(Z/{self.Q})")
        return si * self.n_gauss

    def header(self) -> dict:
        return {
            "omega_min_exp": self.omega_min_exp,
            "omega_max_exp": self.omega_max_exp,
            "Q": self.Q,
            "n_gauss": self.n_gauss,
        }


def make_log_grid(omega_min_exp: int, omega_max_exp: int, Q: int, n_gauss: int = 16) -> RadialGrid:
    return RadialGrid(int(omega_min_exp), int(omega_max_exp), int(Q), int(n_gauss))


@dataclass(frozen=True)
class RadialFunction:
    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} samples, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("radial function values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: RadialGrid, fn) -> "RadialFunction":
        return cls(grid, np.asarray(fn(grid.points), dtype=complex))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialFunction":
        return cls(grid, np.zeros(grid.size, dtype=complex))

    def norm_sq(self, measure: str = "domega") -> float:
        return float(np.sum(self.grid.measure_weights(measure) * np.abs(self.values) ** 2))

    def norm(self, measure: str = "domega") -> float:
        return float(np.sqrt(self.norm_sq(measure)))

    def __add__(self, other: "RadialFunction") -> "RadialFunction":
        _check_same(self.grid, other.grid)
        return RadialFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "RadialFunction") -> "RadialFunction":
        _check_same(self.grid, other.grid)
        return RadialFunction(self.grid, self.values - other.values)

    def __mul__(self, s) -> "RadialFunction":
        return RadialFunction(self.grid, self.values * s)

    __rmul__ = __mul__


def _check_same(g1: RadialGrid, g2: RadialGrid):
    if g1 != g2:
        raise GridMismatchError(f"grid mismatch: {g1} vs {g2}")


def inner(f: RadialFunction, g: RadialFunction, measure: str = "domega") -> complex:
    """``<f, g>``, conjugate-linear in ``g``."""
    _check_same(f.grid, g.grid)
    w = f.grid.measure_weights(measure)
    return complex(np.sum(w * f.values * np.conj(g.values)))


@dataclass(frozen=True)
class WplusResult:
    function: RadialFunction
    dropped_mass: float

    @property
    def truncated(self) -> bool:
        return self.dropped_mass > 0.0


def shift_values(values: np.ndarray, shift: int) -> tuple[np.ndarray, np.ndarray]:
    """out[i] = values[i + shift] (zero off-grid); also returns the mask of
    source indices that were dropped.  Works along the last axis."""
    n = values.shape[-1]
    out = np.zeros_like(values)
    used = np.zeros(n, dtype=bool)
    if shift >= 0:
        if shift < n:
            out[..., : n - shift] = values[..., shift:]
            used[shift:] = True
    else:
        s = -shift
        if s < n:
            out[..., s:] = values[..., : n - s]
            used[: n - s] = True
    return out, ~used


def wplus(b: float, j_over_Q: int, f: RadialFunction) -> WplusResult:
    """Apply ``W+(b, a)`` with ``a = 2**(j_over_Q/Q)``:
    ``omega -> a**0.5 * exp(-2 pi i b omega) * f(a omega)``."""
    grid = f.grid
    shift = int(j_over_Q) * grid.n_gauss
    moved, dropped = shift_values(f.values, shift)
    a = 2.0 ** (j_over_Q / grid.Q)
    out = np.sqrt(a) * np.exp(-2j * np.pi * b * grid.points) * moved
    lost = float(np.sum(grid.point_weights[dropped] * np.abs(f.values[dropped]) ** 2))
    return WplusResult(RadialFunction(grid, out), lost)


def band_transform(points, weighted_values, scale: float, K: int, isign: int = 1) -> np.ndarray:
    """``T[k] = sum_p weighted_values[..., p] * exp(isign * 2 pi i k scale points[p])``
    for ``k = -K..K``.  Requires ``0 <= scale * points <= 1``."""
    x = 2.0 * np.pi * scale * np.asarray(points, dtype=float)
    c = np.ascontiguousarray(weighted_values, dtype=complex)
    n_modes = 2 * K + 1
    if finufft is not None and x.size > 0 and n_modes * x.size > 20000:
        x = x - np.pi  # finufft wants [-3pi, 3pi); undo the shift via a phase
        out = finufft.nufft1d1(x, c, n_modes, isign=isign, eps=1e-14, nthreads=_NTHREADS)
        k = np.arange(-K, K + 1)
        return out * np.exp(isign * 1j * np.pi * k)
    k = np.arange(-K, K + 1)
    phase = np.exp(isign * 1j * np.outer(x, k))
    return c @ phase


def band_evaluate(points, modes: np.ndarray, scale: float, isign: int = -1) -> np.ndarray:
    """Adjoint of :func:`band_transform`:
    ``out[..., p] = sum_k modes[..., k] * exp(isign * 2 pi i k scale points[p])``."""
    modes = np.ascontiguousarray(modes, dtype=complex)
    K = (modes.shape[-1] - 1) // 2
    x = 2.0 * np.pi * scale * np.asarray(points, dtype=float)
    k = np.arange(-K, K + 1)
    if finufft is not None and x.size > 0 and modes.shape[-1] * x.size > 20000:
        shifted = modes * np.exp(isign * 1j * np.pi * k)
        return finufft.nufft1d2(x - np.pi, shifted, isign=isign, eps=1e-14, nthreads=_NTHREADS)
    return modes @ np.exp(isign * 1j * np.outer(k, x))


def band_coeffs_shannon(f: RadialFunction, j: int, K: int, profile_const: float = 1.0) -> np.ndarray:
    """``<f, W+(2**j k, 2**j) eta>`` for ``k = -K..K`` where
    ``eta = profile_const * 1_[1/2, 1]``.

    The frame vector is supported on the band ``[2**(-j-1), 2**-j]``.
    """
    grid = f.grid
    if -j - 1 < grid.omega_min_exp or -j > grid.omega_max_exp:
        raise ValueError(f"band [2^{-j-1}, 2^{-j}] lies outside the grid")
    sl = grid.band_slice(-j - 1, -j)
    pts = grid.points[sl]
    wv = grid.point_weights[sl] * f.values[sl] * profile_const * 2.0 ** (j / 2)
    return band_transform(pts, wv, 2.0 ** j, K, isign=1)
