"""Rotations of R^2 and R^3 stored as orthogonal matrices.

Three-dimensional rotations expose z-y-z Euler angles (active convention,
``R = Rz(alpha) Ry(beta) Rz(gamma)``), canonicalised to
``alpha, gamma in (-pi, pi]`` and ``beta in [0, pi]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def rz(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def ry(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rx(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


@dataclass(frozen=True)
class Rotation:
    d: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError("only d = 2 and d = 3 are supported")
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (self.d, self.d):
            raise ValueError("matrix shape does not match d")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, d: int) -> "Rotation":
        return cls(d, np.eye(d))

    @classmethod
    def from_angle(cls, phi: float) -> "Rotation":
        c, s = np.cos(phi), np.sin(phi)
        return cls(2, np.array([[c, -s], [s, c]]))

    @classmethod
    def from_euler(cls, alpha: float, beta: float, gamma: float) -> "Rotation":
        return cls(3, rz(alpha) @ ry(beta) @ rz(gamma))

    @property
    def angle(self) -> float:
        if self.d != 2:
            raise ValueError("angle is only defined for d = 2")
        return float(np.arctan2(self.matrix[1, 0], self.matrix[0, 0]))

    @property
    def euler(self) -> tuple[float, float, float]:
        if self.d != 3:
            raise ValueError("Euler angles are only defined for d = 3")
        m = self.matrix
        cb = float(np.clip(m[2, 2], -1.0, 1.0))
        sb = float(np.hypot(m[0, 2], m[1, 2]))
        beta = float(np.arctan2(sb, cb))
        if sb > 1e-12:
            alpha = float(np.arctan2(m[1, 2], m[0, 2]))
            gamma = float(np.arctan2(m[2, 1], -m[2, 0]))
        elif cb > 0:  # beta = 0: only alpha + gamma is defined
            alpha, gamma = float(np.arctan2(m[1, 0], m[0, 0])), 0.0
        else:  # beta = pi: only alpha - gamma is defined
            alpha, gamma = float(np.arctan2(-m[1, 0], -m[0, 0])), 0.0
        return alpha, beta, gamma

    def __matmul__(self, other: "Rotation") -> "Rotation":
        if self.d != other.d:
            raise ValueError("dimension mismatch")
        return Rotation(self.d, self.matrix @ other.matrix)

    def inv(self) -> "Rotation":
        return Rotation(self.d, self.matrix.T.copy())

    def apply(self, pts: np.ndarray) -> np.ndarray:
        """Rotate points stored along the last axis."""
        return np.asarray(pts) @ self.matrix.T

    def close_to(self, other: "Rotation", tol: float = 1e-10) -> bool:
        return self.d == other.d and bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)


def random_rotation(d: int, rng: np.random.Generator) -> Rotation:
    if d == 2:
        return Rotation.from_angle(rng.uniform(-np.pi, np.pi))
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    m = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])
    return Rotation(3, m)
