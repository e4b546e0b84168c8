"""Brute-force validators that share no numerical kernels with the main
modules.

Dense frame operators and intertwiner counting on explicit harmonic
polynomials live here next to the pointwise series sums used to cross-check
the discrete conditions."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from math import floor, log2

import numpy as np

MAX_VECTORS = 2000
MAX_DIM = 5000


# ---------------------------------------------------------------------------
# Dense frame operator

def _flatten(signals):
    labels = sorted({lab for s in signals for lab in s.components})
    grid = signals[0].grid
    sw = np.sqrt(grid.point_weights)
    rows = []
    for s in signals:
        parts = []
        for lab in labels:
            arr = s.components.get(lab)
            if arr is None:
                arr = np.zeros((lab.dim, grid.size), dtype=complex)
            parts.append((arr * sw).ravel())
        rows.append(np.concatenate(parts))
    return np.array(rows)


def gram_parseval(vectors, weights=None, subspace=None) -> dict:
    """Entrywise max and operator norm of sum_i psi_i psi_i^* - I on the
    covered coordinates.

    ``vectors`` is a list of SequenceSignal, or an array (n_vectors, dim) of
    samples with quadrature ``weights``.  ``subspace`` is a boolean mask of
    coordinates; by default, those where some vector is non-zero."""
    if isinstance(vectors, np.ndarray):
        if weights is None:
            raise ValueError("array input needs quadrature weights")
        X = vectors * np.sqrt(np.asarray(weights))[None, :]
    else:
        X = _flatten(list(vectors))
    n, dim = X.shape
    if n > MAX_VECTORS or dim > MAX_DIM:
        raise ValueError(f"{n} vectors in dimension {dim} exceed the oracle limits")
    mask = np.any(X != 0, axis=0) if subspace is None else np.asarray(subspace)
    Xs = X[:, mask]
    S = Xs.T @ Xs.conj()
    D = S - np.eye(S.shape[0])
    resid = np.abs(D).max() if S.size else 0.0
    op = np.linalg.norm(D, 2) if S.size else 0.0
    return {"max_offdiag_residual": float(resid), "operator_norm_residual": float(op),
            "dim": int(mask.sum()), "n_vectors": n}


def shannon_band_frame(N: int, c: float = 1.0):
    """Frame vectors c e^{-2 pi i k w} on the band [1/2, 1) sampled at N
    equispaced midpoints, k = -N..N-1 (one scale, no rotations).  Returns
    (vectors, weights)."""
    w = 0.5 + (np.arange(N) + 0.5) / (2 * N)
    ks = np.arange(-N, N)
    vecs = c * np.exp(-2j * np.pi * np.outer(ks, w))
    return vecs, np.full(N, 1.0 / (2 * N))


# ---------------------------------------------------------------------------
# Multiplicities

def _monomials(d: int, deg: int):
    out = []
    for combo in combinations_with_replacement(range(d), deg):
        e = [0] * d
        for c in combo:
            e[c] += 1
        out.append(tuple(e))
    return out


def harmonic_polynomials(d: int, i: int) -> tuple[list, np.ndarray]:
    """Monomial exponents and a basis (columns) of the degree-i harmonic
    polynomials: the null space of the Laplacian."""
    mons = _monomials(d, i)
    if i < 2:
        return mons, np.eye(len(mons))
    low = {m: k for k, m in enumerate(_monomials(d, i - 2))}
    lap = np.zeros((len(low), len(mons)))
    for col, m in enumerate(mons):
        for axis in range(d):
            if m[axis] >= 2:
                t = list(m)
                t[axis] -= 2
                lap[low[tuple(t)], col] += m[axis] * (m[axis] - 1)
    u, s, vh = np.linalg.svd(lap)
    rank = int(np.sum(s > 1e-10 * s.max()))
    return mons, vh[rank:].conj().T


def harmonic_dimension(d: int, i: int) -> int:
    return harmonic_polynomials(d, i)[1].shape[1]


def _eval_monomials(mons, pts):
    return np.stack([np.prod(pts ** np.array(m), axis=-1) for m in mons], axis=-1)


def _polynomial_rep(label, F, rng) -> list[np.ndarray]:
    """Matrices of (g p)(x) = p(g^-1 x) on the harmonic basis, by least squares."""
    d, i = label.d, abs(label.index)
    if d == 2:
        # H_n = span of (x + i sign(n) y)**|n|
        def basis(pts):
            z = pts[..., 0] + 1j * np.sign(label.index) * pts[..., 1]
            return (z ** i)[..., None]
    else:
        mons, B = harmonic_polynomials(3, i)

        def basis(pts):
            return _eval_monomials(mons, pts) @ B
    pts = rng.standard_normal((8 * (2 * i + 1) + 16, d))
    P = basis(pts)
    mats = []
    for R in F.elements:
        moved = basis(pts @ R.matrix)  # rows: R^T x = R^-1 x
        M, *_ = np.linalg.lstsq(P, moved, rcond=None)
        if np.abs(P @ M - moved).max() > 1e-8 * max(1.0, np.abs(moved).max()):
            raise ArithmeticError("harmonic space is not invariant: broken representation")
        mats.append(M)
    return mats


def brute_multiplicity(F, label, seed: int = 0) -> dict[str, int]:
    """m_chi = dim Hom_F(chi, rho_i) from the null space of the stacked
    intertwining equations rho(g) X = X chi(g)."""
    if label.d == 3 and label.index > 6:
        raise ValueError("brute multiplicity supports i <= 6")
    rho = _polynomial_rep(label, F, np.random.default_rng(seed))
    n = rho[0].shape[0]
    out, total = {}, 0
    for chi in F.irreps:
        k = chi.dim
        eqs = [np.kron(r, np.eye(k)) - np.kron(np.eye(n), c.T) for r, c in zip(rho, chi.matrices)]
        A = np.vstack(eqs)
        s = np.linalg.svd(A, compute_uv=False)
        nullity = n * k - int(np.sum(s > 1e-9 * max(1.0, s.max())))
        out[chi.name] = nullity
        total += nullity * k
    if total != n:
        raise ArithmeticError(f"intertwiner count {total} != dimension {n}")
    return out


# ---------------------------------------------------------------------------
# Series conditions

def _piece(profile, alpha_exp: Fraction, x: float) -> complex:
    """phi(x / alpha) for a piecewise-constant profile, exact on dyadics:
    value const on [2**lo, 2**hi) of the shifted support."""
    if x <= 0:
        return 0.0
    lx = log2(x)
    for lo, hi in profile.support:
        if float(lo + alpha_exp) <= lx < float(hi + alpha_exp):
            return profile.const
    return 0.0


def direct_series_check(g, condition_id: str, omega_samples, ms=(-5, -3, -1, 1, 3, 5),
                        shift_unit: float = 2 * np.pi, j_window: int = 80) -> np.ndarray:
    """Residuals of one series condition at arbitrary omega, j in
    [-j_window, j_window] (j >= 0 for translation types)."""
    prof = g.profile
    if not getattr(prof, "piecewise_constant", False):
        raise ValueError("direct series check needs a piecewise-constant profile")
    om = np.atleast_1d(np.asarray(omega_samples, dtype=float))
    target = 1.0 / g.F.order
    slots = g.slots
    pairs = [(s, t) for a, s in enumerate(slots) for t in slots[a + 1:]
             if s.chi == t.chi and s.delta == t.delta]

    def series(s, t, w, shift, nonneg):
        acc = 0.0 + 0.0j
        for j in range(0 if nonneg else -j_window, j_window + 1):
            a = _piece(prof, s.alpha_exp, 2.0 ** j * w)
            if a:
                acc += a * np.conj(_piece(prof, t.alpha_exp, 2.0 ** j * (w + shift)))
        return acc

    res = []
    if condition_id == "constancy":
        for s in slots:
            res += [abs(series(s, s, w, 0.0, False) - (target if w > 0 else 0.0)) for w in om]
    elif condition_id == "translation":
        res = [abs(series(s, s, w, shift_unit * m, True)) for s in slots for m in ms for w in om]
    elif condition_id == "cross":
        res = [abs(series(s, t, w, 0.0, False)) for s, t in pairs for w in om]
    elif condition_id == "cross-translation":
        res = [abs(series(a, b, w, shift_unit * m, True))
               for s, t in pairs for a, b in ((s, t), (t, s)) for m in ms for w in om]
    else:
        raise ValueError(f"unknown condition {condition_id!r}")
    return np.array(res, dtype=float)


def dyadic_sum_at(profile, omega: float, j_window: int = 80) -> float:
    """sum_j |phi(2**j omega)|**2 by brute summation."""
    return float(sum(abs(_piece(profile, Fraction(0), 2.0 ** j * omega)) ** 2
                     for j in range(-j_window, j_window + 1)))
