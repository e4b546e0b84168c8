"""The group G = (R x| R_+) x SO(d), its finite rotation subgroups and the
isotypic decomposition of each H_i under them."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .harmonics import AngularLabel, rho_matrix
from .rotation import Rotation, rx, rz

MULT_TOL = 1e-8
RANK_TOL = 1e-8


class IrrepTableError(ValueError):
    """Raised when character sums give non-integral multiplicities."""


@dataclass(frozen=True)
class GroupElement:
    b: float
    a: float
    R: Rotation

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("dilation a must be positive")

    @classmethod
    def identity(cls, d: int) -> "GroupElement":
        return cls(0.0, 1.0, Rotation.identity(d))

    @property
    def d(self) -> int:
        return self.R.d

    def gamma(self) -> float:
        """Modulus of the inner action b -> a b."""
        return self.a

    def beta(self) -> float:
        """Determinant of the contragredient action on frequencies."""
        return self.a ** (-self.d / 2)

    def close_to(self, other: "GroupElement", tol: float = 1e-12) -> bool:
        return (abs(self.b - other.b) <= tol * max(1.0, abs(self.b))
                and abs(self.a - other.a) <= tol * max(1.0, self.a)
                and self.R.close_to(other.R, tol))


def section(omega: float) -> float:
    """The section q(omega) = 1/omega, as the dilation part of H."""
    if not omega > 0:
        raise ValueError("the section is defined for positive frequencies only")
    return 1.0 / omega


def mult(x: GroupElement, y: GroupElement) -> GroupElement:
    return GroupElement(x.b + x.a * y.b, x.a * y.a, x.R @ y.R)


def inverse(x: GroupElement) -> GroupElement:
    return GroupElement(-x.b / x.a, 1.0 / x.a, x.R.inv())


@dataclass(frozen=True)
class Irrep:
    name: str
    dim: int
    matrices: tuple = field(repr=False)  # one unitary matrix per group element

    def character(self) -> np.ndarray:
        return np.array([np.trace(m) for m in self.matrices])


@dataclass(frozen=True)
class FiniteSubgroup:
    kind: str
    param: int
    elements: tuple = field(repr=False)
    irreps: tuple = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def d(self) -> int:
        return self.elements[0].d

    def index_of(self, R: Rotation, tol: float = 1e-9) -> int:
        for k, g in enumerate(self.elements):
            if g.close_to(R, tol):
                return k
        raise ValueError("rotation is not an element of the subgroup")

    def multiplication_table(self) -> np.ndarray:
        n = self.order
        table = np.empty((n, n), dtype=int)
        for p, g in enumerate(self.elements):
            for q, h in enumerate(self.elements):
                table[p, q] = self.index_of(g @ h)
        return table

    def conjugacy_classes(self) -> list[list[int]]:
        n = self.order
        seen, classes = set(), []
        for p in range(n):
            if p in seen:
                continue
            cls = sorted({self.index_of(h @ self.elements[p] @ h.inv()) for h in self.elements})
            seen.update(cls)
            classes.append(cls)
        return classes

    def irrep_index(self, name: str) -> int:
        for k, chi in enumerate(self.irreps):
            if chi.name == name:
                return k
        raise KeyError(name)

    def character_table(self) -> dict:
        classes = self.conjugacy_classes()
        rows = {}
        for chi in self.irreps:
            ch = chi.character()
            rows[chi.name] = [[float(ch[c[0]].real), float(ch[c[0]].imag)] for c in classes]
        return {"kind": self.kind, "param": self.param, "order": self.order,
                "class_sizes": [len(c) for c in classes], "characters": rows}

    def to_json(self) -> str:
        return json.dumps(self.character_table(), indent=2)


def _cyclic_irreps(L: int) -> tuple:
    # chi_q(R_l) = exp(-2 pi i q l / L): matches rho_n(phi) = exp(-i n phi),
    # so the label n carries chi_{n mod L}
    out = []
    for q in range(L):
        mats = tuple(np.array([[np.exp(-2j * np.pi * q * l / L)]]) for l in range(L))
        out.append(Irrep(f"chi{q}", 1, mats))
    return tuple(out)


def _dihedral(M: int):
    rots = [Rotation(3, rz(2 * np.pi * k / M)) for k in range(M)]
    flip = Rotation(3, rx(np.pi))
    elements = tuple(rots + [flip @ r for r in rots])
    sw = np.array([[0.0, 1.0], [1.0, 0.0]])

    def one_dim(name, r_val, s_val):
        mats = tuple(np.array([[r_val ** k * (s_val if e else 1.0)]], dtype=complex)
                     for e in (0, 1) for k in range(M))
        return Irrep(name, 1, mats)

    irreps = [one_dim("A1", 1.0, 1.0), one_dim("A2", 1.0, -1.0)]
    if M % 2 == 0:
        irreps += [one_dim("B1", -1.0, 1.0), one_dim("B2", -1.0, -1.0)]
    for h in range(1, (M - 1) // 2 + 1):
        mats = []
        for e in (0, 1):
            for k in range(M):
                z = np.exp(2j * np.pi * h * k / M)
                rk = np.diag([z, np.conj(z)])
                mats.append(sw @ rk if e else rk)
        irreps.append(Irrep(f"E{h}", 2, tuple(mats)))
    return elements, tuple(irreps)


def make_finite_subgroup(kind: str, param: int) -> FiniteSubgroup:
    """kind: 'cyclic-2D' (L rotations of the plane), 'cyclic-3D-z' (L
    rotations about z), 'dihedral-3D' (order 2M, z-rotations and flips about
    in-plane axes)."""
    if kind == "cyclic-2D":
        if param < 1:
            raise ValueError("L must be at least 1")
        elements = tuple(Rotation.from_angle(2 * np.pi * l / param) for l in range(param))
        return FiniteSubgroup(kind, param, elements, _cyclic_irreps(param))
    if kind == "cyclic-3D-z":
        if param < 1:
            raise ValueError("L must be at least 1")
        elements = tuple(Rotation(3, rz(2 * np.pi * l / param)) for l in range(param))
        return FiniteSubgroup(kind, param, elements, _cyclic_irreps(param))
    if kind == "dihedral-3D":
        if param < 2:
            raise ValueError("M must be at least 2")
        elements, irreps = _dihedral(param)
        return FiniteSubgroup(kind, param, elements, irreps)
    raise ValueError(f"unknown subgroup kind {kind!r}")


def trivial_subgroup(d: int) -> FiniteSubgroup:
    return make_finite_subgroup("cyclic-2D" if d == 2 else "cyclic-3D-z", 1)


def rho_on_subgroup(F: FiniteSubgroup, label: AngularLabel) -> list[np.ndarray]:
    return [rho_matrix(label, g) for g in F.elements]


def multiplicities(F: FiniteSubgroup, label: AngularLabel) -> dict[str, int]:
    """m_{i,chi} from the character inner product."""
    tr = np.array([np.trace(r) for r in rho_on_subgroup(F, label)])
    out = {}
    for chi in F.irreps:
        m = np.sum(tr * np.conj(chi.character())) / F.order
        mi = int(round(m.real))
        if abs(m - mi) > MULT_TOL:
            raise IrrepTableError(f"non-integral multiplicity {m} for {chi.name}")
        out[chi.name] = mi
    if sum(out[c.name] * c.dim for c in F.irreps) != label.dim:
        raise IrrepTableError("multiplicities do not add up to dim H_i")
    return out


@dataclass(frozen=True)
class IsotypicBlock:
    """One copy (chi, mu) inside H_i: columns of ``basis`` are the images of
    the standard basis of H_chi under the intertwiner, orthonormal in H_i."""
    chi: str
    mu: int
    basis: np.ndarray = field(repr=False)  # (dim H_i, d_chi)

    def embed(self, w: np.ndarray) -> np.ndarray:
        return self.basis @ w


@dataclass(frozen=True)
class IsotypicData:
    label: AngularLabel
    subgroup_kind: str
    multiplicity: dict
    blocks: tuple

    def blocks_for(self, chi: str) -> list[IsotypicBlock]:
        return [b for b in self.blocks if b.chi == chi]

    def report(self) -> dict:
        return {"label": self.label.index, "d": self.label.d, "subgroup": self.subgroup_kind,
                "multiplicity": dict(self.multiplicity),
                "blocks": [{"chi": b.chi, "mu": b.mu,
                            "basis_re": b.basis.real.tolist(), "basis_im": b.basis.imag.tolist()}
                           for b in self.blocks]}


def w_vector(dim_chi: int, delta: int) -> np.ndarray:
    """Orthogonal basis of H_chi with squared norm d_chi; delta is 1-based."""
    w = np.zeros(dim_chi, dtype=complex)
    w[delta - 1] = np.sqrt(dim_chi)
    return w


def _range_basis(P: np.ndarray) -> np.ndarray:
    q, r, piv = scipy.linalg.qr(P, pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > RANK_TOL * max(1.0, diag[0] if diag.size else 1.0)))
    basis = q[:, :rank]
    # fix the phase so the largest-magnitude entry (lowest index on ties) is real positive
    for c in range(rank):
        col = basis[:, c]
        mag = np.round(np.abs(col), 12)
        k = int(np.argmax(mag))
        basis[:, c] = col * np.conj(col[k]) / abs(col[k])
    return basis


def isotypic(F: FiniteSubgroup, label: AngularLabel) -> IsotypicData:
    mult = multiplicities(F, label)
    rhos = rho_on_subgroup(F, label)
    blocks = []
    for chi in F.irreps:
        m = mult[chi.name]
        if m == 0:
            continue
        dchi = chi.dim

        def proj(k, l):
            acc = sum(np.conj(cm[k, l]) * r for cm, r in zip(chi.matrices, rhos))
            return acc * dchi / F.order

        full = sum(np.conj(np.trace(cm)) * r for cm, r in zip(chi.matrices, rhos)) * dchi / F.order
        rank_full = np.linalg.matrix_rank(full, tol=RANK_TOL)
        if rank_full != m * dchi:
            raise IrrepTableError(f"projector rank {rank_full} != {m}*{dchi} for {chi.name}")
        u = _range_basis(proj(0, 0))
        if u.shape[1] != m:
            raise IrrepTableError(f"P_11 rank {u.shape[1]} != multiplicity {m} for {chi.name}")
        partners = [proj(k, 0) for k in range(dchi)]
        for mu in range(m):
            cols = np.stack([P @ u[:, mu] for P in partners], axis=1)
            blocks.append(IsotypicBlock(chi.name, mu + 1, cols))
    return IsotypicData(label, F.kind, mult, tuple(blocks))


def schur_check(F: FiniteSubgroup, chi: str, chi_p: str, w, w_p, u, u_p) -> complex:
    """(1/|F|) sum_l <w, chi(R_l) u> <chi'(R_l) u', w'> with <x, y> = sum x conj(y)."""
    A, B = F.irreps[F.irrep_index(chi)], F.irreps[F.irrep_index(chi_p)]
    w, u, w_p, u_p = (np.asarray(v, dtype=complex) for v in (w, u, w_p, u_p))
    if w.shape != (A.dim,) or u.shape != (A.dim,) or w_p.shape != (B.dim,) or u_p.shape != (B.dim,):
        raise ValueError("vector dimensions do not match the irreps")
    total = 0.0 + 0.0j
    for ma, mb in zip(A.matrices, B.matrices):
        total += np.vdot(ma @ u, w) * np.vdot(w_p, mb @ u_p)
    return complex(total / F.order)
