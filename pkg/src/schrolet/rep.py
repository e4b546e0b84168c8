"""Both sides of the Schroedinger representation.

Cartesian side: signals sampled on a uniform frequency grid, acted on by
``pi_hat(b, a, R) f(xi) = a**(d/4) exp(-2 pi i b xi.xi) f(a**0.5 R^-1 xi)``;
the propagator U(b) is its pure-time part.

Sequence side: the direct sum of L^2(R_+, H_i), one radial function per
harmonic coordinate, acted on by ``pi'`` = W+ tensor rho_i.  The adapter
``to_sequence``/``from_sequence`` realises the unitaries J (polar change of
variables with omega = |xi|^2) and S (harmonic expansion) on grids; it is the
only approximate step and the sequence side never goes through it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from scipy.interpolate import CubicSpline

from .group import GroupElement
from .harmonics import AngularLabel, rho_matrix, sph_basis_eval, sphere_quadrature
from .radial import GridMismatchError, RadialGrid, RadialFunction, shift_values


class ResolutionError(ValueError):
    """The Cartesian grid cannot resolve the requested angular content."""


class OffGridError(ValueError):
    """A dilation pushes signal support off the Cartesian grid."""


# ---------------------------------------------------------------------------
# Cartesian side

@dataclass(frozen=True, eq=False)
class CartesianSignal:
    """Samples on the cell-centred grid ``xi_k = -Xi + (k + 1/2) h``,
    ``h = 2 Xi / N`` in every coordinate (symmetric about 0)."""
    d: int
    N: int
    Xi: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.shape != (self.N,) * self.d:
            raise ValueError(f"values must have shape {(self.N,) * self.d}")

    @property
    def h(self) -> float:
        return 2.0 * self.Xi / self.N

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    @staticmethod
    def axis(N: int, Xi: float) -> np.ndarray:
        h = 2.0 * Xi / N
        return -Xi + (np.arange(N) + 0.5) * h

    def coords(self) -> np.ndarray:
        """Grid points, shape (N,)*d + (d,)."""
        ax = self.axis(self.N, self.Xi)
        return np.stack(np.meshgrid(*([ax] * self.d), indexing="ij"), axis=-1)

    def phase_function(self) -> np.ndarray:
        """Phi(xi) = xi . xi."""
        return np.sum(self.coords() ** 2, axis=-1)

    @classmethod
    def from_callable(cls, d: int, N: int, Xi: float, fn) -> "CartesianSignal":
        ax = cls.axis(N, Xi)
        pts = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1)
        return cls(d, N, float(Xi), np.asarray(fn(pts), dtype=complex))

    def with_values(self, values) -> "CartesianSignal":
        return CartesianSignal(self.d, self.N, self.Xi, np.asarray(values, dtype=complex))

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.cell_volume)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def sample(self, pts: np.ndarray, order: int = 5) -> np.ndarray:
        """Spline interpolation at arbitrary points (..., d); zero outside."""
        pts = np.asarray(pts, dtype=float)
        idx = (pts + self.Xi) / self.h - 0.5
        flat = idx.reshape(-1, self.d).T
        re = ndimage.map_coordinates(self.values.real, flat, order=order, mode="constant", cval=0.0)
        im = ndimage.map_coordinates(self.values.imag, flat, order=order, mode="constant", cval=0.0)
        out = (re + 1j * im).reshape(pts.shape[:-1])
        outside = np.any(np.abs(pts) > self.Xi, axis=-1)
        out[outside] = 0.0
        return out


def propagate(f: CartesianSignal, b: float) -> CartesianSignal:
    """Free evolution U(b): multiply by exp(-2 pi i b xi.xi)."""
    return f.with_values(f.values * np.exp(-2j * np.pi * b * f.phase_function()))


def pi_hat_apply(x: GroupElement, f: CartesianSignal, order: int = 5,
                 support_tol: float = 1e-10) -> CartesianSignal:
    if x.d != f.d:
        raise ValueError("group element and signal dimensions differ")
    pts = f.coords()
    if x.a == 1.0 and np.allclose(x.R.matrix, np.eye(f.d), atol=0, rtol=0):
        moved = f.values
    else:
        src = np.sqrt(x.a) * (pts @ x.R.matrix)  # rows: R^-1 xi = R^T xi
        # the output window sees f only inside the ball of radius min(1, a**0.5) Xi
        lost = _outside_ball_mass(f, min(1.0, np.sqrt(x.a)) * f.Xi)
        if lost > support_tol * max(f.norm_sq(), 1e-300):
            raise OffGridError(f"action with a={x.a} drops mass {lost:.3g} off the grid")
        moved = f.sample(src, order=order)
    phase = np.exp(-2j * np.pi * x.b * np.sum(pts ** 2, axis=-1))
    return f.with_values(x.a ** (f.d / 4) * phase * moved)


def _outside_ball_mass(f: CartesianSignal, radius: float) -> float:
    r = np.linalg.norm(f.coords(), axis=-1)
    return float(np.sum(np.abs(f.values[r > radius]) ** 2) * f.cell_volume)


# ---------------------------------------------------------------------------
# Sequence side

@dataclass(frozen=True, eq=False)
class SequenceSignal:
    """Coordinates of a vector of the direct sum of L^2(R_+, H_i).

    ``components[label]`` has shape ``(label.dim, grid.size)``; row r holds
    the radial function of basis vector ``label.ms[r]``.
    """
    d: int
    grid: RadialGrid
    components: dict = field(repr=False)

    def __post_init__(self):
        for lab, arr in self.components.items():
            if lab.d != self.d:
                raise ValueError(f"label {lab} does not match d={self.d}")
            if arr.shape != (lab.dim, self.grid.size):
                raise ValueError(f"component {lab} has shape {arr.shape}, expected {(lab.dim, self.grid.size)}")

    @classmethod
    def zeros(cls, d: int, grid: RadialGrid, labels) -> "SequenceSignal":
        return cls(d, grid, {lab: np.zeros((lab.dim, grid.size), dtype=complex) for lab in labels})

    @property
    def labels(self) -> list[AngularLabel]:
        return sorted(self.components)

    def radial(self, label: AngularLabel, row: int = 0) -> RadialFunction:
        return RadialFunction(self.grid, self.components[label][row])

    def _aligned(self, other: "SequenceSignal") -> list[AngularLabel]:
        if other.grid != self.grid:
            raise GridMismatchError("sequence signals live on different radial grids")
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        return sorted(set(self.components) | set(other.components))

    def _get(self, lab: AngularLabel) -> np.ndarray:
        arr = self.components.get(lab)
        return np.zeros((lab.dim, self.grid.size), dtype=complex) if arr is None else arr

    def __add__(self, other: "SequenceSignal") -> "SequenceSignal":
        labs = self._aligned(other)
        return SequenceSignal(self.d, self.grid, {l: self._get(l) + other._get(l) for l in labs})

    def __sub__(self, other: "SequenceSignal") -> "SequenceSignal":
        labs = self._aligned(other)
        return SequenceSignal(self.d, self.grid, {l: self._get(l) - other._get(l) for l in labs})

    def __mul__(self, s) -> "SequenceSignal":
        return SequenceSignal(self.d, self.grid, {l: v * s for l, v in self.components.items()})

    __rmul__ = __mul__

    def norm_sq(self) -> float:
        w = self.grid.point_weights
        return float(sum(np.sum(w * np.abs(v) ** 2) for _, v in sorted(self.components.items())))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def inner(self, other: "SequenceSignal") -> complex:
        """Conjugate-linear in ``other``."""
        w = self.grid.point_weights
        total = 0.0 + 0.0j
        for lab in sorted(set(self.components) & set(other.components)):
            total += np.sum(w * self.components[lab] * np.conj(other.components[lab]))
        return complex(total)

    def project(self, labels) -> "SequenceSignal":
        """Orthogonal projection onto the listed H_i blocks."""
        keep = set(labels)
        return SequenceSignal(self.d, self.grid, {l: v for l, v in self.components.items() if l in keep})


@dataclass(frozen=True)
class ActionResult:
    signal: SequenceSignal
    dropped_mass: float


def pi_prime_apply(x: GroupElement, f: SequenceSignal) -> ActionResult:
    """``(pi'(b, a, R) f)_i(omega) = a**0.5 exp(-2 pi i b omega) rho_i(R) f_i(a omega)``."""
    if x.d != f.d:
        raise ValueError("group element and signal dimensions differ")
    grid = f.grid
    shift = grid.shift_for(x.a)
    w = grid.point_weights
    phase = np.sqrt(x.a) * np.exp(-2j * np.pi * x.b * grid.points)
    out, lost = {}, 0.0
    for lab, arr in sorted(f.components.items()):
        moved, dropped = shift_values(arr, shift)
        lost += float(np.sum(w[dropped] * np.abs(arr[:, dropped]) ** 2))
        out[lab] = rho_matrix(lab, x.R) @ (moved * phase)
    return ActionResult(SequenceSignal(f.d, grid, out), lost)


# ---------------------------------------------------------------------------
# Adapter J, S between the two sides

def _max_mode(labels) -> int:
    return max((abs(l.index) for l in labels), default=0)


def _resolution_radius(f: CartesianSignal, fraction: float) -> float:
    """Smallest radius r enclosing ``fraction`` of the energy."""
    r = np.linalg.norm(f.coords(), axis=-1).ravel()
    e = (np.abs(f.values) ** 2).ravel()
    order = np.argsort(r, kind="stable")
    cum = np.cumsum(e[order])
    if cum[-1] == 0:
        return float(f.Xi)
    k = int(np.searchsorted(cum, fraction * cum[-1], side="right"))
    return float(r[order][min(k, r.size - 1)])


def check_resolution(f: CartesianSignal, labels, samples_per_period: int = 8,
                     mass_fraction: float = 0.5) -> float:
    """At least ``samples_per_period`` grid spacings per period of the highest
    angular mode along the circle enclosing ``mass_fraction`` of the energy.
    Returns the achieved samples per period."""
    n = _max_mode(labels)
    if n == 0:
        return float("inf")
    r = _resolution_radius(f, mass_fraction)
    per_period = 2 * np.pi * r / (f.h * n)
    if per_period < samples_per_period:
        raise ResolutionError(
            f"{per_period:.2f} samples per period of mode {n} at radius {r:.4g}; need {samples_per_period}")
    return float(per_period)


def _angular_rule(d: int, labels, n_angles: int | None):
    n = _max_mode(labels)
    if d == 2:
        M = n_angles or max(64, 8 * (n + 1))
        theta = 2 * np.pi * np.arange(M) / M
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1), np.full(M, 2 * np.pi / M), theta
    n_pol = n_angles or max(16, n + 8)
    pts, wts = sphere_quadrature(n_pol, 2 * n_pol)
    return pts, wts, pts


def _basis_matrix(d: int, labels, ang) -> dict:
    return {lab: np.stack([sph_basis_eval(lab, m, ang) for m in lab.ms]) for lab in labels}


def to_sequence(f: CartesianSignal | None, labels, grid: RadialGrid, *, evaluator=None,
                n_angles: int | None = None, order: int = 5, check: bool = True) -> SequenceSignal:
    """Sequence coordinates ``(S J f)_i(omega) = omega**((d-2)/4)/sqrt 2 *
    <f(sqrt(omega) .), Y_i>``.

    ``evaluator`` (a callable on points (..., d)) replaces spline sampling of
    ``f`` by exact evaluation; then ``f`` may be ``None`` and no resolution
    check is made.
    """
    labels = sorted(labels)
    if not labels:
        raise ValueError("no labels requested")
    d = labels[0].d
    if evaluator is None:
        if f is None:
            raise ValueError("need a Cartesian signal or an evaluator")
        if check:
            check_resolution(f, labels)
    dirs, wts, ang = _angular_rule(d, labels, n_angles)
    basis = _basis_matrix(d, labels, ang)
    omega = grid.points
    r = np.sqrt(omega)
    if evaluator is None:
        inside = r <= f.Xi * np.sqrt(d)
    else:
        inside = np.ones_like(r, dtype=bool)
    comps = {lab: np.zeros((lab.dim, grid.size), dtype=complex) for lab in labels}
    idx = np.nonzero(inside)[0]
    pref = omega ** ((d - 2) / 4) / np.sqrt(2.0)
    for chunk in np.array_split(idx, max(1, idx.size * dirs.shape[0] // 400000 + 1)):
        if chunk.size == 0:
            continue
        pts = r[chunk, None, None] * dirs[None, :, :]
        vals = evaluator(pts) if evaluator is not None else f.sample(pts, order=order)
        for lab in labels:
            proj = (vals * wts[None, :]) @ np.conj(basis[lab]).T
            comps[lab][:, chunk] = (proj * pref[chunk, None]).T
    return SequenceSignal(d, grid, comps)


def from_sequence(g: SequenceSignal, N: int, Xi: float) -> CartesianSignal:
    """Inverse adapter: ``f(r s) = sqrt 2 r**(-(d-2)/2) sum_i <g_i(r^2), Y_i(s)>``,
    radial values interpolated in log(omega) by cubic splines."""
    d = g.d
    ax = CartesianSignal.axis(N, Xi)
    pts = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1)
    r = np.linalg.norm(pts, axis=-1)
    omega = r ** 2
    logw = np.log(g.grid.points)
    lo, hi = g.grid.points[0], g.grid.points[-1]
    valid = (omega >= lo) & (omega <= hi)
    out = np.zeros(pts.shape[:-1], dtype=complex)
    if d == 2:
        ang = np.arctan2(pts[..., 1], pts[..., 0])
    else:
        ang = pts
    lw = np.log(np.where(valid, omega, lo))
    for lab, arr in sorted(g.components.items()):
        for row, m in enumerate(lab.ms):
            spl = CubicSpline(logw, arr[row])
            radial = np.where(valid, spl(lw), 0.0)
            out += radial * sph_basis_eval(lab, m, ang)
    scale = np.sqrt(2.0) * np.where(valid, omega, 1.0) ** (-(d - 2) / 4)
    return CartesianSignal(d, N, float(Xi), out * scale)


def roundtrip_error(f: CartesianSignal, labels, grid: RadialGrid, **kw) -> float:
    """Relative L^2 error of from_sequence(to_sequence(f))."""
    back = from_sequence(to_sequence(f, labels, grid, **kw), f.N, f.Xi)
    return float(np.sqrt(np.sum(np.abs(back.values - f.values) ** 2) / np.sum(np.abs(f.values) ** 2)))


def disintegration_check(phi, d: int, radius: float, n_radial: int = 64,
                         n_box: int = 64, n_angles: int = 32) -> tuple[float, float]:
    """Both sides of ``int phi dxi = int (int phi dnu_omega) domega`` where
    nu_omega is ``omega**((d-2)/2)/2`` times surface measure on the sphere of
    radius sqrt(omega).  ``phi`` must vanish outside the ball of ``radius``."""
    x, w = np.polynomial.legendre.leggauss(n_box)
    # split each axis at 0 to keep the rule symmetric and smooth-friendly
    ax = np.concatenate([(x - 1) * radius / 2, (x + 1) * radius / 2])
    aw = np.concatenate([w, w]) * radius / 2
    pts = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1)
    wt = np.ones(pts.shape[:-1])
    for k in range(d):
        shape = [1] * d
        shape[k] = -1
        wt = wt * aw.reshape(shape)
    lhs = float(np.sum(wt * phi(pts)))

    xo, wo = np.polynomial.legendre.leggauss(n_radial)
    # omega = t**2 removes the omega**((d-2)/2) endpoint singularity for odd d
    t = (xo + 1) * radius / 2
    omega = t ** 2
    wom = wo * radius / 2 * 2 * t
    if d == 2:
        th = 2 * np.pi * np.arange(4 * n_angles) / (4 * n_angles)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
        sw = np.full(th.size, 2 * np.pi / th.size)
    else:
        dirs, sw = sphere_quadrature(n_angles, 2 * n_angles)
    inner_vals = np.array([np.sum(sw * phi(np.sqrt(om) * dirs)) for om in omega])
    rhs = float(np.sum(wom * 0.5 * omega ** ((d - 2) / 2) * inner_vals))
    return lhs, rhs


def j_inverse_roundtrip(d: int, exponent: float, radial=None, n: int = 512) -> float:
    """Sup relative error of J^-1 J on a radial profile when J^-1 multiplies
    by ``sqrt 2 * (xi . xi)**(-exponent)``; exponent (d-2)/4 inverts J."""
    radial = radial or (lambda r: np.exp(-r ** 2))
    r = np.linspace(0.05, 4.0, n)
    omega = r ** 2
    jf = omega ** ((d - 2) / 4) * radial(np.sqrt(omega)) / np.sqrt(2.0)
    back = np.sqrt(2.0) * (r ** 2) ** (-exponent) * jf
    ref = radial(r)
    return float(np.max(np.abs(back - ref)) / np.max(np.abs(ref)))
