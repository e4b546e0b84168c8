"""Generators (admissible vectors) and checks of the continuous and discrete
conditions that make them reproducing or Parseval.

A generator is a list of slots.  A slot (i, chi, mu) carries the radial part
``phi(omega / alpha)`` and the harmonic vector ``v = B w_delta`` in H_i, where
``B`` spans the mu-th copy of chi inside H_i and ``w_delta`` is the delta-th
standard vector of H_chi scaled to norm sqrt(d_chi).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor

import numpy as np

from .group import FiniteSubgroup, IsotypicData, make_finite_subgroup, w_vector
from .harmonics import AngularLabel, rho_matrix
from .profiles import ShannonProfile, exp2_of, overlap_measure, shift_intervals
from .radial import LN2, RadialGrid, make_log_grid
from .rep import SequenceSignal

PRINTED_SHIFT = 2 * np.pi  # translation unit in the printed series conditions
ODD_MS = (-5, -3, -1, 1, 3, 5)


class WeightDivergenceError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Slot:
    label: AngularLabel
    chi: str
    mu: int
    delta: int
    alpha_exp: Fraction
    basis: np.ndarray = field(repr=False)  # (dim H_i, d_chi)

    @property
    def alpha(self) -> float:
        return 2.0 ** float(self.alpha_exp)

    @property
    def dchi(self) -> int:
        return self.basis.shape[1]

    @property
    def vector(self) -> np.ndarray:
        return self.basis @ w_vector(self.dchi, self.delta)

    @property
    def key(self) -> tuple:
        return (self.label.index, self.chi, self.mu)


@dataclass(frozen=True, eq=False)
class Generator:
    d: int
    F: FiniteSubgroup
    profile: object
    slots: tuple

    def __post_init__(self):
        if not self.slots:
            raise ValueError("generator has no slots")

    @property
    def labels(self) -> list[AngularLabel]:
        return sorted({s.label for s in self.slots})

    @property
    def L(self) -> int:
        return self.F.order

    def radial(self, slot: Slot, omega) -> np.ndarray:
        return self.profile(np.asarray(omega, dtype=float) / slot.alpha)

    def slot_support(self, slot: Slot):
        return shift_intervals(self.profile.support, slot.alpha_exp)

    def support_exponents(self) -> tuple[Fraction, Fraction]:
        ivs = [iv for s in self.slots for iv in self.slot_support(s)]
        return min(lo for lo, _ in ivs), max(hi for _, hi in ivs)

    def covering_grid(self, Q: int = 4, n_gauss: int = 16, margin: int = 1) -> RadialGrid:
        lo, hi = self.support_exponents()
        return make_log_grid(floor(lo) - margin, ceil(hi) + margin, Q, n_gauss)

    def scaled(self, s: float) -> "Generator":
        return Generator(self.d, self.F, self.profile.scaled(s), self.slots)

    def with_alpha(self, key: tuple, alpha: float) -> "Generator":
        """Copy with the weight of one slot replaced (used for controls)."""
        slots = tuple(Slot(s.label, s.chi, s.mu, s.delta, exp2_of(alpha), s.basis) if s.key == key else s
                      for s in self.slots)
        return Generator(self.d, self.F, self.profile, slots)

    def as_signal(self, grid: RadialGrid) -> SequenceSignal:
        """Sequence coordinates of the generator on ``grid``."""
        comps = {lab: np.zeros((lab.dim, grid.size), dtype=complex) for lab in self.labels}
        for s in self.slots:
            comps[s.label] += np.outer(s.vector, self.profile.values_on(grid, s.alpha_exp))
        return SequenceSignal(self.d, grid, comps)

    def acted(self, grid: RadialGrid, b: float, a: float, R) -> SequenceSignal:
        """pi'(b, a, R) eta evaluated pointwise on ``grid`` (any a > 0)."""
        om = grid.points
        mod = a ** 0.5 * np.exp(-2j * np.pi * b * om)
        comps = {lab: np.zeros((lab.dim, grid.size), dtype=complex) for lab in self.labels}
        for s in self.slots:
            rv = rho_matrix(s.label, R) @ s.vector
            comps[s.label] += np.outer(rv, mod * self.radial(s, a * om))
        return SequenceSignal(self.d, grid, comps)

    def frame_vector(self, grid: RadialGrid, j: int, k: int, ell: int) -> SequenceSignal:
        """pi'(2**j k, 2**j, R_ell) eta evaluated pointwise on ``grid``."""
        return self.acted(grid, 2.0 ** j * k, 2.0 ** j, self.F.elements[ell])

    def weighted_norm_sum(self) -> float:
        """sum over slots of d_chi * ||phi_slot||**2 (domega)."""
        total = 0.0
        for s in self.slots:
            total += s.dchi * _norm_sq_domega(self.profile, s.alpha_exp)
        return total

    def norm_sq(self) -> float:
        """||eta||**2 = sum over slots of ||v||**2 ||phi_slot||**2 (slots are orthogonal)."""
        return sum(float(np.vdot(s.vector, s.vector).real) * _norm_sq_domega(self.profile, s.alpha_exp)
                   for s in self.slots)

    def describe(self) -> dict:
        return {"d": self.d, "subgroup": self.F.kind, "order": self.L,
                "profile": type(self.profile).__name__, "const": float(self.profile.const),
                "slots": [{"label": s.label.index, "chi": s.chi, "mu": s.mu, "delta": s.delta,
                           "alpha_exp": str(s.alpha_exp)} for s in self.slots]}


def _norm_sq_domega(profile, e: Fraction) -> float:
    if isinstance(profile, ShannonProfile):
        return profile.const ** 2 * 2.0 ** float(e) / 2
    lo, hi = profile.support[0][0] + e, profile.support[-1][1] + e
    grid = make_log_grid(floor(lo) - 1, ceil(hi) + 1, 8)
    v = profile.values_on(grid, e)
    return float(np.sum(grid.point_weights * np.abs(v) ** 2))


# ---------------------------------------------------------------------------
# Construction

def standard_alpha_2d(n: int) -> Fraction:
    """Exponent of alpha_n: 2**(-2n) for n >= 0, 2**(2n+1) for n < 0."""
    return Fraction(-2 * n) if n >= 0 else Fraction(2 * n + 1)


def shannon_constant(L: int, which: str = "computed") -> float:
    """Shannon profile height giving sum_j |phi(2**j .)|**2 = 1/L.

    ``which='printed'`` returns 1/L, a commonly quoted height that misses
    the target for L > 1 (kept for the erratum report)."""
    if which == "computed":
        return L ** -0.5
    if which == "printed":
        return 1.0 / L
    raise ValueError(which)


def _resolve_profile(profile, L: int, constant):
    if profile == "shannon":
        c = shannon_constant(L) if constant in (None, "computed") else (
            shannon_constant(L, "printed") if constant == "printed" else float(constant))
        return ShannonProfile(c)
    return profile


def _alpha_exps(rule, keys, default):
    out = {}
    for key in keys:
        if rule is None or rule == "standard":
            out[key] = default(key)
        elif callable(rule):
            a = rule(key)
            out[key] = None if a == 0 else exp2_of(a)
        else:
            a = rule.get(key, 0)
            out[key] = None if a == 0 else exp2_of(a)
    return out


def _check_weights(exps, max_sum: float):
    vals = [2.0 ** float(e) for e in exps if e is not None]
    if not vals:
        raise ValueError("all weights vanish: empty generator")
    if sum(vals) > max_sum:
        raise WeightDivergenceError(f"sum of weights {sum(vals):.4g} exceeds {max_sum}")


def build_generator_2d(profile="shannon", alphas="standard", L: int = 1, n_range=(-4, 3), *,
                       constant=None, max_weight_sum: float = 1e3) -> Generator:
    """2D generator with components eta_n(omega) = eta_0(omega / alpha_n).

    ``alphas``: 'standard', a dict n -> alpha, or a callable; alpha = 0 drops n.
    ``constant``: Shannon height; default is L**-0.5."""
    F = make_finite_subgroup("cyclic-2D", L)
    prof = _resolve_profile(profile, L, constant)
    ns = list(range(n_range[0], n_range[1] + 1))
    exps = _alpha_exps(alphas, ns, standard_alpha_2d)
    _check_weights(exps.values(), max_weight_sum)
    one = np.ones((1, 1), dtype=complex)
    slots = tuple(Slot(AngularLabel(2, n), f"chi{n % L}", 1, 1, exps[n], one)
                  for n in ns if exps[n] is not None)
    return Generator(2, F, prof, slots)


def enumerate_slots(F: FiniteSubgroup, isos: list[IsotypicData]):
    """(label, chi, mu, delta, basis) in canonical order; delta cycles
    through 1..d_chi separately for every chi."""
    counters = {c.name: 0 for c in F.irreps}
    out = []
    for iso in sorted(isos, key=lambda x: x.label):
        for chi in F.irreps:
            for blk in iso.blocks_for(chi.name):
                delta = counters[chi.name] % chi.dim + 1
                counters[chi.name] += 1
                out.append((iso.label, chi.name, blk.mu, delta, blk.basis))
    return out


def build_generator_general(profile, F: FiniteSubgroup, isos: list[IsotypicData], *,
                            bijection: str = "per-group", alpha_rule=None, constant=None,
                            max_weight_sum: float = 1e3) -> Generator:
    """Generator assembled slot by slot from isotypic data.

    Default weights are alpha = 2**-n with n enumerating slots either over
    all slots (``bijection='global'``) or within each group of slots sharing
    (chi, delta) (``'per-group'``), which is all the disjointness condition
    needs.  ``alpha_rule`` (callable on (i, chi, mu) -> alpha) overrides."""
    if not isos:
        raise ValueError("no labels: the zero generator is not allowed")
    d = isos[0].label.d
    prof = _resolve_profile(profile, F.order, constant)
    raw = enumerate_slots(F, isos)
    if not raw:
        raise ValueError("no isotypic slots")
    group_count, slots, exps = {}, [], []
    for n_global, (lab, chi, mu, delta, basis) in enumerate(raw):
        if alpha_rule is not None:
            a = alpha_rule((lab.index, chi, mu))
            e = exp2_of(a)
        elif bijection == "global":
            e = Fraction(-n_global)
        elif bijection == "per-group":
            n = group_count.get((chi, delta), 0)
            group_count[(chi, delta)] = n + 1
            e = Fraction(-n)
        else:
            raise ValueError(f"unknown bijection {bijection!r}")
        exps.append(e)
        slots.append(Slot(lab, chi, mu, delta, e, basis))
    _check_weights(exps, max_weight_sum)
    return Generator(d, F, prof, tuple(slots))


# ---------------------------------------------------------------------------
# Reports

@dataclass
class ConditionReport:
    condition: str
    residuals: np.ndarray = field(repr=False)
    tol: float
    constants: dict = field(default_factory=dict)
    note: str = ""

    @property
    def max_residual(self) -> float:
        r = np.asarray(self.residuals, dtype=float)
        return float(r.max()) if r.size else 0.0

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_dict(self) -> dict:
        return {"condition": self.condition, "max_residual": self.max_residual, "tol": self.tol,
                "passed": self.passed, "constants": self.constants, "note": self.note}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _eval_grid(g: Generator, grid: RadialGrid | None) -> RadialGrid:
    return grid if grid is not None else g.covering_grid(Q=4, n_gauss=4)


def check_continuous_admissibility(g: Generator, grid: RadialGrid | None = None,
                                   tol: float = 1e-10) -> list[ConditionReport]:
    """Per-label integral of ||(S eta)_i||**2 domega/omega against 1 (d=2)
    or d_i (d=3), and per-slot integrals of |phi_slot|**2 domega/omega."""
    grid = grid if grid is not None else g.covering_grid(Q=1, n_gauss=16)
    sig = g.as_signal(grid)
    w = grid.measure_weights("domega_over_omega")
    res, consts = [], {}
    for lab in sig.labels:
        val = float(np.sum(w * np.sum(np.abs(sig.components[lab]) ** 2, axis=0)))
        target = 1.0 if g.d == 2 else float(lab.dim)
        consts[f"label {lab.index}"] = val
        res.append(abs(val - target))
    per_label = ConditionReport("admissible-per-label", np.array(res), tol, consts,
                                "target 1 per component" if g.d == 2 else "target d_i per label")
    slot_vals = {}
    for s in g.slots:
        v = g.profile.values_on(grid, s.alpha_exp)
        slot_vals[f"{s.label.index}/{s.chi}/{s.mu}"] = float(np.sum(w * np.abs(v) ** 2))
    target = LN2 / g.L
    per_slot = ConditionReport("slot-log-integral", np.array([abs(v - target) for v in slot_vals.values()]),
                               tol, slot_vals, f"target ln2/L = {target!r}")
    return [per_label, per_slot]


def _j_window(g: Generator, omega: np.ndarray, extra: float = 0.0) -> range:
    lo, hi = g.support_exponents()
    lw = np.log2(omega)
    return range(int(floor(float(lo) - lw.max())) - 1, int(ceil(float(hi) + extra - lw.min())) + 2)


def _series(g, s1, s2, omega, shift, j_nonneg):
    """sum_j phi_s1(2**j w) conj(phi_s2(2**j (w + shift)))."""
    total = np.zeros(omega.shape, dtype=complex)
    js = _j_window(g, omega)
    for j in js:
        if j_nonneg and j < 0:
            continue
        a = g.radial(s1, 2.0 ** j * omega)
        if not np.any(a):
            continue
        b = g.radial(s2, 2.0 ** j * (omega + shift))
        total += a * np.conj(b)
    return total


def _pairs(g: Generator):
    """Distinct slot pairs sharing chi and delta (equal w vectors)."""
    out = []
    for p, s in enumerate(g.slots):
        for t in g.slots[p + 1:]:
            if s.chi == t.chi and s.delta == t.delta:
                out.append((s, t))
    return out


def check_discrete_conditions(g: Generator, grid: RadialGrid | None = None, tol: float = 1e-12,
                              ms=ODD_MS, shift_unit: float = PRINTED_SHIFT) -> dict[str, ConditionReport]:
    """Series conditions sampled at every point of ``grid``.

    constancy:   sum_j |phi_s(2**j w)|**2 = 1/L
    translation: sum_{j>=0} phi_s(2**j w) conj(phi_s(2**j (w + u m))) = 0, m odd
    cross:       sum_j phi_s(2**j w) conj(phi_t(2**j w)) = 0 for s != t with equal w-vector
    cross-translation: as translation for such pairs.
    ``u`` is ``shift_unit`` (2 pi as printed; 1 matches the modulation period)."""
    if not getattr(g.profile, "compact", False):
        raise ValueError("profile is not compactly supported: truncated sums would be unsound")
    grid = _eval_grid(g, grid)
    om = grid.points
    target = 1.0 / g.L
    reports = {}
    res, consts = [], {}
    for s in g.slots:
        v = _series(g, s, s, om, 0.0, False).real
        consts[f"{s.label.index}/{s.chi}/{s.mu}"] = float(np.median(v))
        res.append(np.abs(v - target).max())
    reports["constancy"] = ConditionReport("constancy", np.array(res), tol, consts, f"target 1/L = {target!r}")

    res = [np.abs(_series(g, s, s, om, shift_unit * m, True)).max() for s in g.slots for m in ms]
    reports["translation"] = ConditionReport("translation", np.array(res), tol, {"shift_unit": shift_unit})

    pairs = _pairs(g)
    res, worst = [], {}
    for s, t in pairs:
        r = float(np.abs(_series(g, s, t, om, 0.0, False)).max())
        res.append(r)
        if r > tol:
            worst[f"{s.key}~{t.key}"] = r
    reports["cross"] = ConditionReport("cross", np.array(res), tol, worst, f"{len(pairs)} pairs")

    res = [float(np.abs(_series(g, s, t, om, shift_unit * m, True)).max()) for s, t in pairs for m in ms]
    res += [float(np.abs(_series(g, t, s, om, shift_unit * m, True)).max()) for s, t in pairs for m in ms]
    reports["cross-translation"] = ConditionReport("cross-translation", np.array(res), tol,
                                                   {"shift_unit": shift_unit})
    return reports


def check_support_disjointness(g: Generator) -> ConditionReport:
    """Exact overlap measure of supp(phi_s) and supp(phi_t) for slot pairs
    sharing chi and delta (equivalently supp(phi) against its dilate by the
    weight ratio)."""
    res, worst = [], {}
    for s, t in _pairs(g):
        m = overlap_measure(g.slot_support(s), g.slot_support(t))
        res.append(m)
        if m > 0:
            worst[f"{s.key}~{t.key}"] = m
    return ConditionReport("support-disjointness", np.array(res), 0.0, worst)

