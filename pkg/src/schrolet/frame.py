"""Discrete frames pi'(2**j k, 2**j, R_l) eta: analysis and synthesis on
truncated index sets, plus the Parseval check.

Per-slot radial coefficients are computed once per scale with a type-1
non-uniform FFT and shared across rotations via the character matrices of
the subgroup (``rho(R_l) B = B chi(R_l)``).

The k-range is scaled per j.  A slot with weight alpha has support of length
``alpha 2**(-j-1)`` inside a modulation period ``2**-j``; a signal resolved at
that support needs ``~1/alpha`` times more modulations, so the base K is
multiplied by ``2**ceil(-log2 alpha_min)`` over the slots whose scale-j support
meets the radial grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

import numpy as np

from .admissible import Generator, Slot
from .group import FiniteSubgroup
from .harmonics import rho_matrix
from .radial import RadialGrid, band_evaluate, band_transform
from .rep import SequenceSignal


class FrameMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SamplingGrid:
    j_min: int
    j_max: int
    K: int
    F: FiniteSubgroup = field(repr=False)
    k_factor: dict = field(default=None, repr=False)  # j -> multiplier of K

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise ValueError("empty j range")
        if self.K < 0:
            raise ValueError("K must be non-negative")

    @classmethod
    def for_generator(cls, g: Generator, grid: RadialGrid, j_range, K: int, scale_k: bool = True):
        j_min, j_max = j_range
        factors = {}
        for j in range(j_min, j_max + 1):
            exps = [s.alpha_exp for s in g.slots if _band(grid, s, j, g) is not None]
            if scale_k and exps:
                factors[j] = 2 ** max(0, ceil(-float(min(exps))))
            else:
                factors[j] = 1
        return cls(j_min, j_max, K, g.F, factors)

    @property
    def js(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def K_at(self, j: int) -> int:
        f = 1 if self.k_factor is None else self.k_factor.get(j, 1)
        return self.K * f

    @property
    def L(self) -> int:
        return self.F.order

    def points(self):
        """Enumerate x_{j,k,l} = (2**j k, 2**j, R_l) in (j, k, l) order."""
        for j in self.js:
            K = self.K_at(j)
            for k in range(-K, K + 1):
                for ell in range(self.L):
                    yield j, k, ell

    def size(self) -> int:
        return sum((2 * self.K_at(j) + 1) * self.L for j in self.js)


@dataclass(eq=False)
class CoefficientTable:
    """``data[j]`` has shape (L, 2 K_j + 1); column index k + K_j."""
    data: dict
    K: dict
    meta: dict = field(default_factory=dict)

    def get(self, j: int, k: int, ell: int) -> complex:
        return complex(self.data[j][ell, k + self.K[j]])

    def sum_sq(self) -> float:
        return float(sum(np.sum(np.abs(self.data[j]) ** 2) for j in sorted(self.data)))

    def inner(self, other: "CoefficientTable") -> complex:
        return complex(sum(np.sum(self.data[j] * np.conj(other.data[j])) for j in sorted(self.data)))

    def rows(self):
        """(j, k, l, value) in lexicographic order."""
        for j in sorted(self.data):
            arr, K = self.data[j], self.K[j]
            for col in range(arr.shape[1]):
                for ell in range(arr.shape[0]):
                    yield j, col - K, ell, complex(arr[ell, col])

    @classmethod
    def zeros(cls, s: SamplingGrid, meta=None) -> "CoefficientTable":
        return cls({j: np.zeros((s.L, 2 * s.K_at(j) + 1), dtype=complex) for j in s.js},
                   {j: s.K_at(j) for j in s.js}, dict(meta or {}))


def _band(grid: RadialGrid, slot: Slot, j: int, g: Generator):
    """Grid slice holding supp phi_slot(2**j .), or None if empty."""
    lo = min(l for l, _ in g.profile.support) + slot.alpha_exp - j
    hi = max(h for _, h in g.profile.support) + slot.alpha_exp - j
    lo_c = max(Fraction(lo), Fraction(grid.omega_min_exp))
    hi_c = min(Fraction(hi), Fraction(grid.omega_max_exp))
    if lo_c >= hi_c:
        return None
    # round outward to cell edges; profile values vanish outside the support
    q = grid.Q
    lo_c = Fraction(int(np.floor(lo_c * q)), q)
    hi_c = Fraction(int(np.ceil(hi_c * q)), q)
    sl = grid.band_slice(lo_c, hi_c)
    return sl if sl.stop > sl.start else None


def _check(f: SequenceSignal, g: Generator, s: SamplingGrid):
    if f.d != g.d:
        raise FrameMismatchError("signal and generator dimensions differ")
    if s.F is not g.F and (s.F.kind, s.F.param) != (g.F.kind, g.F.param):
        raise FrameMismatchError("sampling grid and generator use different subgroups")


def _chi_w(g: Generator, slot: Slot) -> np.ndarray:
    """chi(R_l) w_delta for every l, shape (L, d_chi)."""
    irrep = g.F.irreps[g.F.irrep_index(slot.chi)]
    return np.stack([m[:, slot.delta - 1] * np.sqrt(slot.dchi) for m in irrep.matrices])


def analyze(f: SequenceSignal, g: Generator, s: SamplingGrid, method: str = "fast") -> CoefficientTable:
    """c_{j,k,l} = <f, pi'(2**j k, 2**j, R_l) eta>."""
    _check(f, g, s)
    if method == "direct":
        return _analyze_direct(f, g, s)
    if method != "fast":
        raise ValueError(f"unknown method {method!r}")
    grid = f.grid
    table = CoefficientTable.zeros(s, {"generator": g.describe(), "grid": grid.header()})
    for slot in g.slots:
        arr = f.components.get(slot.label)
        if arr is None:
            continue
        z = slot.basis.conj().T @ arr  # (d_chi, size)
        cw = np.conj(_chi_w(g, slot))  # (L, d_chi)
        for j in s.js:
            sl = _band(grid, slot, j, g)
            if sl is None:
                continue
            pts = grid.points[sl]
            weight = grid.point_weights[sl] * np.conj(g.radial(slot, 2.0 ** j * pts)) * 2.0 ** (j / 2)
            T = band_transform(pts, z[:, sl] * weight, 2.0 ** j, s.K_at(j), isign=1)
            table.data[j] += cw @ np.atleast_2d(T)
    return table


def _analyze_direct(f: SequenceSignal, g: Generator, s: SamplingGrid) -> CoefficientTable:
    """Dense quadrature against pointwise frame vectors; no band slicing, no
    character factorisation."""
    grid = f.grid
    om, w = grid.points, grid.point_weights
    table = CoefficientTable.zeros(s, {"generator": g.describe(), "grid": grid.header(), "method": "direct"})
    for j in s.js:
        K = s.K_at(j)
        ks = np.arange(-K, K + 1)
        conj_mod = 2.0 ** (j / 2) * np.exp(2j * np.pi * (2.0 ** j) * np.outer(ks, om))
        for ell, R in enumerate(g.F.elements):
            acc = np.zeros(ks.size, dtype=complex)
            for slot in g.slots:
                arr = f.components.get(slot.label)
                if arr is None:
                    continue
                rv = rho_matrix(slot.label, R) @ slot.vector
                h = (np.conj(rv) @ arr) * np.conj(g.radial(slot, 2.0 ** j * om)) * w
                acc += conj_mod @ h
            table.data[j][ell] = acc
    return table


def synthesize(c: CoefficientTable, g: Generator, s: SamplingGrid, grid: RadialGrid) -> SequenceSignal:
    """sum_{j,k,l} c_{j,k,l} pi'(2**j k, 2**j, R_l) eta on ``grid``."""
    for j in s.js:
        if j not in c.data or c.K[j] != s.K_at(j) or c.data[j].shape[0] != s.L:
            raise FrameMismatchError(f"coefficient table does not match the sampling grid at j={j}")
    out = SequenceSignal.zeros(g.d, grid, g.labels)
    for slot in g.slots:
        cw = _chi_w(g, slot)  # (L, d_chi)
        acc = np.zeros((slot.dchi, grid.size), dtype=complex)
        for j in s.js:
            sl = _band(grid, slot, j, g)
            if sl is None:
                continue
            A = cw.T @ c.data[j]  # (d_chi, modes)
            pts = grid.points[sl]
            vals = np.atleast_2d(band_evaluate(pts, A, 2.0 ** j, isign=-1))
            acc[:, sl] += vals * (2.0 ** (j / 2) * g.radial(slot, 2.0 ** j * pts))
        out.components[slot.label] += slot.basis @ acc
    return out


def covered_mass(f: SequenceSignal, g: Generator, s: SamplingGrid) -> float:
    """Energy of f inside the region reached by the truncated j-range:
    sum over slots of int L sum_j |phi_s(2**j w)|**2 ||B_s^* f(w)||**2 dw."""
    grid = f.grid
    total = 0.0
    for slot in g.slots:
        arr = f.components.get(slot.label)
        if arr is None:
            continue
        e = np.sum(np.abs(slot.basis.conj().T @ arr) ** 2, axis=0)
        cover = np.zeros(grid.size)
        for j in s.js:
            sl = _band(grid, slot, j, g)
            if sl is not None:
                cover[sl] += np.abs(g.radial(slot, 2.0 ** j * grid.points[sl])) ** 2
        total += float(np.sum(grid.point_weights * e * cover * g.L))
    return total


@dataclass
class ParsevalReport:
    sum_sq: float
    norm_sq: float
    tail_bound: float
    tol: float

    @property
    def ratio(self) -> float:
        return self.sum_sq / self.norm_sq

    @property
    def passed(self) -> bool:
        return abs(self.ratio - 1.0) <= self.tol + self.tail_bound

    @property
    def inconclusive(self) -> bool:
        return self.tail_bound > 0.5

    def to_dict(self) -> dict:
        return {"sum_sq": self.sum_sq, "norm_sq": self.norm_sq, "ratio": self.ratio,
                "tail_bound": self.tail_bound, "tol": self.tol, "passed": self.passed,
                "inconclusive": self.inconclusive}


def k_edge_mass(c: CoefficientTable) -> float:
    """Coefficient energy in the outer quarter of each k-range, a proxy for
    the energy beyond the truncation."""
    total = 0.0
    for j in sorted(c.data):
        K = c.K[j]
        ks = np.abs(np.arange(-K, K + 1))
        total += float(np.sum(np.abs(c.data[j][:, ks > (3 * K) // 4]) ** 2))
    return total


def parseval_report(f: SequenceSignal, g: Generator, s: SamplingGrid, tol: float = 1e-8,
                    coeffs: CoefficientTable | None = None) -> ParsevalReport:
    n2 = f.norm_sq()
    if n2 == 0:
        raise ValueError("zero signal: ratio undefined")
    c = coeffs if coeffs is not None else analyze(f, g, s)
    uncovered = max(0.0, n2 - covered_mass(f, g, s))
    tail = (uncovered + k_edge_mass(c)) / n2
    return ParsevalReport(c.sum_sq(), n2, tail, tol)


# ---------------------------------------------------------------------------
# Test signals

def band_trig_signal(grid: RadialGrid, labels, bands, rng: np.random.Generator,
                     k0: int = 3, p: int = 6) -> SequenceSignal:
    """Random signal that is, on each dyadic band ``[2**b, 2**(b+1)]``, a
    trigonometric polynomial of degree k0 in the band coordinate times the
    taper sin(pi u)**(2p); zero elsewhere."""
    comps = {}
    for lab in labels:
        arr = np.zeros((lab.dim, grid.size), dtype=complex)
        for b in bands:
            sl = grid.band_slice(b, b + 1)
            A = 2.0 ** b
            u = (grid.points[sl] - A) / A
            ks = np.arange(-k0, k0 + 1)
            for row in range(lab.dim):
                a = rng.standard_normal(ks.size) + 1j * rng.standard_normal(ks.size)
                arr[row, sl] += np.sin(np.pi * u) ** (2 * p) * (a @ np.exp(2j * np.pi * np.outer(ks, u)))
        comps[lab] = arr
    return SequenceSignal(labels[0].d, grid, comps)
