"""Mother profiles for the radial parts of generators.

Supports are kept as unions of intervals ``[2**lo, 2**hi]`` with rational
exponents, so dilating by a power of two shifts exponents exactly and
disjointness questions are settled in exact arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import log2

import numpy as np
from scipy.interpolate import interp1d

from .radial import LN2, RadialFunction, RadialGrid

Interval = tuple[Fraction, Fraction]  # exponents (lo, hi) of [2**lo, 2**hi]


def exp2_of(alpha: float, max_den: int = 64) -> Fraction:
    """Exact rational exponent e with alpha = 2**e, or ValueError."""
    if isinstance(alpha, Fraction):
        return alpha
    if not np.isfinite(alpha) or alpha <= 0:
        raise ValueError(f"weight {alpha!r} is not a positive finite number")
    e = Fraction(log2(alpha)).limit_denominator(max_den)
    if abs(2.0 ** float(e) - alpha) > 1e-12 * alpha:
        raise ValueError(f"weight {alpha!r} is not a power 2**(p/q) with q <= {max_den}")
    return e


def shift_intervals(support, e: Fraction) -> list[Interval]:
    return [(lo + e, hi + e) for lo, hi in support]


def overlap_measure(s1, s2) -> float:
    """Lebesgue measure of the intersection of two interval unions.
    Zero exactly when no pair of intervals overlaps in more than a point."""
    total = 0.0
    for lo1, hi1 in s1:
        for lo2, hi2 in s2:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo < hi:
                total += 2.0 ** float(hi) - 2.0 ** float(lo)
    return total


@dataclass(frozen=True)
class ShannonProfile:
    """``const * 1_[1/2, 1)``."""
    const: float = 1.0

    @property
    def support(self) -> list[Interval]:
        return [(Fraction(-1), Fraction(0))]

    piecewise_constant = True
    compact = True

    def __call__(self, omega) -> np.ndarray:
        w = np.asarray(omega, dtype=float)
        return np.where((w >= 0.5) & (w < 1.0), self.const, 0.0).astype(complex)

    def scaled(self, s: float) -> "ShannonProfile":
        return ShannonProfile(self.const * s)

    def dyadic_sum_sq(self) -> float:
        """Value of sum_j |phi(2**j omega)|**2 (constant for this profile)."""
        return self.const ** 2

    def log_norm_sq(self) -> float:
        """Integral of |phi|**2 domega / omega."""
        return self.const ** 2 * LN2

    def values_on(self, grid: RadialGrid, e: Fraction) -> np.ndarray:
        """phi(2**-e omega) at the grid points, exact."""
        out = np.zeros(grid.size, dtype=complex)
        out[grid.band_slice(e - 1, e)] = self.const
        return out


@dataclass(frozen=True, eq=False)
class SampledProfile:
    """A user profile given by grid samples; support is read off the cells
    carrying non-zero samples.  Off-grid evaluation interpolates linearly in
    log(omega)."""
    function: RadialFunction
    const: float = 1.0
    zero_tol: float = 0.0
    _support: list = field(init=False, repr=False, default=None)

    piecewise_constant = False
    compact = True

    def __post_init__(self):
        g = self.function.grid
        cells = np.abs(self.function.values.reshape(g.n_cells, g.n_gauss)).max(axis=1) > self.zero_tol
        runs, start = [], None
        for c, on in enumerate(np.append(cells, False)):
            if on and start is None:
                start = c
            elif not on and start is not None:
                runs.append((Fraction(g.omega_min_exp) + Fraction(start, g.Q),
                             Fraction(g.omega_min_exp) + Fraction(c, g.Q)))
                start = None
        object.__setattr__(self, "_support", runs)

    @property
    def support(self) -> list[Interval]:
        return list(self._support)

    def __call__(self, omega) -> np.ndarray:
        g = self.function.grid
        w = np.asarray(omega, dtype=float)
        lw = np.log(np.clip(w, 1e-300, None))
        f = interp1d(np.log(g.points), self.function.values, bounds_error=False, fill_value=0.0)
        out = self.const * f(lw)
        inside = np.zeros(w.shape, dtype=bool)
        for lo, hi in self._support:
            inside |= (w >= 2.0 ** float(lo)) & (w <= 2.0 ** float(hi))
        return np.where(inside, out, 0.0)

    def scaled(self, s: float) -> "SampledProfile":
        return SampledProfile(self.function, self.const * s, self.zero_tol)

    def log_norm_sq(self) -> float:
        return self.const ** 2 * self.function.norm_sq("domega_over_omega")

    def dyadic_sum_sq(self) -> float:
        """Mean of sum_j |phi(2**j omega)|**2 over one octave of grid points."""
        g = self.function.grid
        v = np.abs(self.const * self.function.values) ** 2
        per_octave = v.reshape(-1, g.points_per_octave).sum(axis=0)
        w = g.point_weights[: g.points_per_octave] / g.points[: g.points_per_octave]
        return float(np.sum(per_octave * w) / np.sum(w))

    def values_on(self, grid: RadialGrid, e: Fraction) -> np.ndarray:
        own = self.function.grid
        if own == grid and (e * grid.Q).denominator == 1:
            from .radial import shift_values
            moved, _ = shift_values(self.function.values, -int(e * grid.Q) * grid.n_gauss)
            return self.const * moved
        return self(grid.points * 2.0 ** (-float(e)))


def normalize(profile, L: int):
    """Rescale so that sum_j |phi(2**j omega)|**2 = 1/L."""
    s = profile.dyadic_sum_sq()
    if s <= 0:
        raise ValueError("profile vanishes identically")
    return profile.scaled(np.sqrt(1.0 / (L * s)))
