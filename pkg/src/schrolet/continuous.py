"""Continuous voice transform and quadrature checks of the reproducing
identity and of the Weil constant.

Group quadrature.  With b = a u the Haar weight db da/a**2 becomes
du * (ln 2 / Q) on the lattice a = 2**(p/Q).  For fixed (a, R) the voice is a
Fourier transform in b of a function supported in an interval of length at
most 1/a, so a u-step du <= 1 samples it without aliasing; only the finite
u-window truncates, with error O(1/U) for indicator-type profiles.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .admissible import Generator
from .group import GroupElement
from .harmonics import rho_matrix
from .radial import LN2, band_transform
from .rep import SequenceSignal
from .rotation import Rotation


def voice(f: SequenceSignal, g: Generator, x: GroupElement) -> complex:
    """<f, pi'(x) eta>, with pi'(x) eta evaluated pointwise on f's grid."""
    return f.inner(g.acted(f.grid, x.b, x.a, x.R))


def rotation_rule(d: int, n: int) -> tuple[list[Rotation], np.ndarray]:
    """Normalised Haar quadrature on SO(d).

    d=2: n uniform angles.  d=3: product rule in Euler angles (alpha, beta,
    gamma) with n uniform alpha and gamma and n Gauss-Legendre nodes in
    cos(beta), which carries the sin(beta) weight."""
    if d == 2:
        rots = [Rotation.from_angle(2 * np.pi * k / n) for k in range(n)]
        return rots, np.full(n, 1.0 / n)
    x, w = np.polynomial.legendre.leggauss(n)
    rots, wts = [], []
    for a in 2 * np.pi * np.arange(n) / n:
        for cb, wb in zip(x, w):
            for c in 2 * np.pi * np.arange(n) / n:
                rots.append(Rotation.from_euler(a, float(np.arccos(cb)), c))
                wts.append(wb / 2 / n ** 2)
    return rots, np.array(wts)


@dataclass(frozen=True)
class QuadSpec:
    """Group quadrature: u in [-u_max, u_max] step du (b = a u); a = 2**(p/Q)
    for p in [p_min, p_max]; ``n_rot`` rotation nodes per Euler angle (or
    angles for d = 2)."""
    u_max: float
    du: float
    p_min: int
    p_max: int
    Q: int
    n_rot: int

    def __post_init__(self):
        if self.du <= 0 or self.u_max <= 0 or self.Q < 1 or self.n_rot < 1 or self.p_min > self.p_max:
            raise ValueError("invalid quadrature specification")

    def refined(self, factor: int = 4) -> "QuadSpec":
        """Wider u-window; the other rules are already exact."""
        return replace(self, u_max=self.u_max * factor)

    def node_weight(self) -> float:
        return self.du * LN2 / self.Q


def _voice_lines(f: SequenceSignal, g: Generator, q: QuadSpec, rots):
    """Yield (a, rotation index, b values, voice values) for every node."""
    grid = f.grid
    om, w = grid.points, grid.point_weights
    M = int(round(q.u_max / q.du))
    for p in range(q.p_min, q.p_max + 1):
        a = 2.0 ** (p / q.Q)
        radial = {s.key: np.conj(g.radial(s, a * om)) for s in g.slots}
        for r_idx, R in enumerate(rots):
            h = np.zeros(grid.size, dtype=complex)
            for s in g.slots:
                arr = f.components.get(s.label)
                if arr is None:
                    continue
                rv = rho_matrix(s.label, R) @ s.vector
                h += radial[s.key] * (np.conj(rv) @ arr)
            nz = np.nonzero(h)[0]
            if nz.size == 0:
                yield a, r_idx, None, None
                continue
            # V(a u) = a**0.5 sum_p w_p exp(2 pi i a u om_p) h_p
            vals = np.sqrt(a) * band_transform(om[nz], w[nz] * h[nz], a * q.du, M, isign=1)
            yield a, r_idx, a * q.du * np.arange(-M, M + 1), vals


def reproducing_check(f: SequenceSignal, g: Generator, q: QuadSpec) -> dict:
    """Quadrature estimate of int_G |<f, pi'(b, a, R) eta>|**2 db da/a**2 dR."""
    n2 = f.norm_sq()
    rots, rw = rotation_rule(f.d, q.n_rot)
    total = 0.0
    for a, r_idx, _, vals in _voice_lines(f, g, q, rots):
        if vals is not None:
            total += rw[r_idx] * q.node_weight() * float(np.sum(np.abs(vals) ** 2))
    return {"integral_estimate": total, "norm_sq": n2,
            "ratio": total / n2 if n2 > 0 else float("nan"),
            "nodes": (q.p_max - q.p_min + 1) * len(rots) * (2 * int(round(q.u_max / q.du)) + 1),
            # voices at |u| <= u_max oscillate up to u_max/2 times per octave
            "window_resolved": f.grid.points_per_octave >= 2 * q.u_max}


def reproducing_convergence(f: SequenceSignal, g: Generator, q: QuadSpec, levels: int = 2,
                            factor: int = 4) -> list[dict]:
    """Baseline plus ``levels`` refinements, each with the error reduction
    relative to the previous level."""
    out, prev = [], None
    for _ in range(levels + 1):
        r = reproducing_check(f, g, q)
        r["error"] = abs(r["ratio"] - 1.0)
        r["reduction"] = prev / r["error"] if prev and r["error"] > 0 else None
        r["u_max"] = q.u_max
        out.append(r)
        prev = r["error"]
        q = q.refined(factor)
    return out


def write_voice_csv(path, f: SequenceSignal, g: Generator, q: QuadSpec):
    """Rows (b, a, phi, |voice|**2); phi is the 2D angle or the Euler triple."""
    rots, _ = rotation_rule(f.d, q.n_rot)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["b", "a", "phi", "abs2"])
        for a, r_idx, bs, vals in _voice_lines(f, g, q, rots):
            if vals is None:
                continue
            R = rots[r_idx]
            phi = f"{R.angle:.17g}" if f.d == 2 else " ".join(f"{t:.17g}" for t in R.euler)
            for b, v in zip(bs, vals):
                wr.writerow([f"{b:.17g}", f"{a:.17g}", phi, f"{abs(v) ** 2:.17g}"])


# ---------------------------------------------------------------------------
# Weil constant

@dataclass(frozen=True)
class WeilQuad:
    """Composite Gauss-Legendre in log(a) on the left side and in omega on
    the right side.  [a_min, a_max] should be the support of the test
    function so that panel ends sit on its edges."""
    a_min: float
    a_max: float
    panels: int = 2
    n_gauss: int = 6
    n_rot: int = 8

    def refined(self) -> "WeilQuad":
        return replace(self, panels=self.panels * 2)


def _composite(lo: float, hi: float, panels: int, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(lo, hi, panels + 1)
    h = np.diff(edges) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    return (mid[:, None] + h[:, None] * x).ravel(), (h[:, None] * w).ravel()


def weil_constant(test_fn, q: WeilQuad, d: int = 2) -> float:
    """C in  int_H phi(a, R) da/a**2 dR = C int_0^inf int phi(1/omega, R) dR domega.

    ``test_fn(a, R)`` takes an array of dilations and one rotation."""
    rots, rw = rotation_rule(d, q.n_rot)
    t, wt = _composite(np.log(q.a_min), np.log(q.a_max), q.panels, q.n_gauss)
    a = np.exp(t)
    lhs = sum(wr * np.sum(wt * test_fn(a, R) / a) for R, wr in zip(rots, rw))  # da/a**2 = dt/a
    om, wo = _composite(1.0 / q.a_max, 1.0 / q.a_min, q.panels, q.n_gauss)
    rhs = sum(wr * np.sum(wo * test_fn(1.0 / om, R)) for R, wr in zip(rots, rw))
    scale = max(abs(lhs), abs(rhs))
    if scale < 1e-300:
        raise ValueError("degenerate test function: both sides vanish")
    if abs(rhs) < 1e-14 * scale:
        raise ValueError("right-hand side vanishes")
    return float(lhs / rhs)


def poly_bump(t, lo: float, hi: float, k: int = 4):
    """(1 - s**2)**k on [lo, hi] with s the affine coordinate in [-1, 1]."""
    s = (2 * np.asarray(t) - (lo + hi)) / (hi - lo)
    return np.where(np.abs(s) < 1, (1 - s * s) ** k, 0.0)


def weil_test_functions():
    """Test functions (name, log-a support, phi(a, R)) for the Weil constant."""
    return [
        ("separable", (-1.0, 1.0), lambda a, R: poly_bump(np.log(a), -1.0, 1.0)),
        ("rotation-weighted", (-0.5, 1.0),
         lambda a, R: poly_bump(np.log(a), -0.5, 1.0) * (2 + np.trace(R.matrix))),
        ("skewed", (-2.0, 0.5),
         lambda a, R: poly_bump(np.log(a), -2.0, 0.5, 6) * (1.5 + R.matrix[0, 0] ** 2)),
    ]
