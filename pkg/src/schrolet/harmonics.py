"""Spherical-harmonic spaces H_i and the rotation matrices rho_i(R).

d = 2: one label n in Z per space, basis exp(i n theta)/sqrt(2 pi), so
``rho_n(phi) = exp(-i n phi)``.
d = 3: complex harmonics Y_i^m, m = -i..i (scipy's convention), orthonormal
for the surface measure; ``rho_i(R)`` is the Wigner D-matrix acting on
coordinates, i.e. ``Y(R^-1 s) = sum_m' Y_m'(s) D_m'm(R)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, lgamma

import numpy as np
from scipy import special

from .rotation import Rotation


@dataclass(frozen=True, order=True)
class AngularLabel:
    d: int
    index: int

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError("only d = 2 and d = 3 are supported")
        if self.d == 3 and self.index < 0:
            raise ValueError("d = 3 labels are non-negative")

    @property
    def dim(self) -> int:
        return 1 if self.d == 2 else 2 * self.index + 1

    @property
    def ms(self) -> range:
        """Coordinate indices m of the basis of H_i."""
        return range(0, 1) if self.d == 2 else range(-self.index, self.index + 1)


def dim_h(d: int, i: int) -> int:
    """Dimension of the degree-i spherical harmonics on S^(d-1)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if i < 0:
        raise ValueError("degree must be non-negative")
    if i == 0:
        return 1
    if i == 1:
        return d
    return comb(d + i - 1, d - 1) - comb(d + i - 3, d - 1)


def _sph_harm(i: int, m: int, polar, azimuth):
    if hasattr(special, "sph_harm_y"):
        return special.sph_harm_y(i, m, polar, azimuth)
    return special.sph_harm(m, i, azimuth, polar)  # pragma: no cover


def sph_basis_eval(label: AngularLabel, m: int, point) -> np.ndarray:
    """Evaluate the m-th basis function of H_label.

    ``point`` is an angle (array) for d = 2 and a unit vector (array of
    shape (..., 3)) for d = 3.
    """
    if label.d == 2:
        if m != 0:
            raise ValueError("d = 2 spaces are one-dimensional; use m = 0")
        theta = np.asarray(point, dtype=float)
        return np.exp(1j * label.index * theta) / np.sqrt(2 * np.pi)
    if abs(m) > label.index:
        raise ValueError(f"|m| must not exceed {label.index}")
    p = np.asarray(point, dtype=float)
    polar = np.arccos(np.clip(p[..., 2] / np.linalg.norm(p, axis=-1), -1.0, 1.0))
    azimuth = np.arctan2(p[..., 1], p[..., 0])
    return _sph_harm(label.index, m, polar, azimuth)


@lru_cache(maxsize=None)
def _log_fact(n: int) -> float:
    return lgamma(n + 1)


def wigner_small_d(j: int, beta: float) -> np.ndarray:
    """Wigner small-d matrix ``d^j_{m'm}(beta)``, rows m', columns m, both
    ordered -j..j; explicit factorial sum with log-factorials."""
    n = 2 * j + 1
    out = np.zeros((n, n))
    cb, sb = np.cos(beta / 2), np.sin(beta / 2)
    for a, mp in enumerate(range(-j, j + 1)):
        for b, m in enumerate(range(-j, j + 1)):
            pref = 0.5 * (_log_fact(j + m) + _log_fact(j - m) + _log_fact(j + mp) + _log_fact(j - mp))
            total = 0.0
            for k in range(max(0, m - mp), min(j + m, j - mp) + 1):
                log_den = _log_fact(j + m - k) + _log_fact(k) + _log_fact(j - k - mp) + _log_fact(k - m + mp)
                sign = -1.0 if (k - m + mp) % 2 else 1.0
                total += sign * np.exp(pref - log_den) * cb ** (2 * j - 2 * k + m - mp) * sb ** (2 * k - m + mp)
            out[a, b] = total
    return out


def rho_matrix(label: AngularLabel, R: Rotation) -> np.ndarray:
    """Matrix of rho_i(R) acting on coordinates in the basis of H_i."""
    if R.d != label.d:
        raise ValueError("rotation and label dimensions differ")
    if label.d == 2:
        return np.array([[np.exp(-1j * label.index * R.angle)]])
    alpha, beta, gamma = R.euler
    ms = np.arange(-label.index, label.index + 1)
    d = wigner_small_d(label.index, beta)
    return np.exp(-1j * ms * alpha)[:, None] * d * np.exp(-1j * ms * gamma)[None, :]


def labels_2d(n_min: int, n_max: int) -> list[AngularLabel]:
    return [AngularLabel(2, n) for n in range(n_min, n_max + 1)]


def labels_3d(i_max: int) -> list[AngularLabel]:
    return [AngularLabel(3, i) for i in range(i_max + 1)]


def sphere_quadrature(n_polar: int, n_azimuth: int | None = None):
    """Product rule on S^2: Gauss-Legendre in cos(polar) times uniform
    azimuth.  Exact for harmonics of degree < min(2 n_polar, n_azimuth).
    Returns unit vectors (N, 3) and weights (N,) summing to 4 pi."""
    n_azimuth = n_azimuth or 2 * n_polar
    x, w = np.polynomial.legendre.leggauss(n_polar)
    az = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
    ct = x[:, None] * np.ones_like(az)[None, :]
    st = np.sqrt(1 - ct ** 2)
    pts = np.stack([st * np.cos(az)[None, :], st * np.sin(az)[None, :], ct], axis=-1).reshape(-1, 3)
    wts = (w[:, None] * np.full(n_azimuth, 2 * np.pi / n_azimuth)[None, :]).ravel()
    return pts, wts
