"""Truncated single-node Fock space: lattice momenta tensored with r-coloured oscillators.

States are ordered by momentum (lexicographic), then oscillator level, then
occupancy tuple. Every ``OperatorMatrix`` carries an ``exact`` column mask:
column s is exact when the stored column equals the image of basis state s
under the untruncated operator. Products propagate the mask conservatively.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

Vec = tuple[int, ...]


class FockError(ValueError):
    pass


def colored_partitions(r: int, L: int) -> list[tuple[int, ...]]:
    """Occupancy tuples (slot (i, n) at position i*L + n - 1) with level <= L,
    ordered by level, then lexicographically."""
    slots = [(i, n) for i in range(r) for n in range(1, L + 1)]
    out: list[tuple[int, ...]] = []

    def rec(pos: int, budget: int, occ: list[int]) -> None:
        if pos == len(slots):
            out.append(tuple(occ))
            return
        n = slots[pos][1]
        for k in range(budget // n + 1):
            occ.append(k)
            rec(pos + 1, budget - k * n, occ)
            occ.pop()

    rec(0, L, [])
    weights = np.array([n for _, n in slots], dtype=int)
    return sorted(out, key=lambda o: (int(np.dot(weights, o)) if o else 0, o))


@dataclass(frozen=True, eq=False)
class FockBasis:
    rank: int
    level: int
    momenta: tuple[Vec, ...]
    momentum_vectors: np.ndarray = field(repr=False)

    @cached_property
    def occupancies(self) -> tuple[tuple[int, ...], ...]:
        return tuple(colored_partitions(self.rank, self.level))

    @property
    def osc_dim(self) -> int:
        return len(self.occupancies)

    @property
    def dim(self) -> int:
        return len(self.momenta) * self.osc_dim

    @cached_property
    def osc_levels(self) -> np.ndarray:
        w = np.array([n for _ in range(self.rank) for n in range(1, self.level + 1)], dtype=int)
        if not len(w):
            return np.zeros(self.osc_dim, dtype=int)
        return np.array([int(np.dot(w, o)) for o in self.occupancies], dtype=int)

    @cached_property
    def levels(self) -> np.ndarray:
        return np.tile(self.osc_levels, len(self.momenta))

    @cached_property
    def momentum_of(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.momenta)), self.osc_dim)

    @cached_property
    def _osc_index(self) -> dict[tuple[int, ...], int]:
        return {o: k for k, o in enumerate(self.occupancies)}

    @cached_property
    def _mom_index(self) -> dict[Vec, int]:
        return {p: k for k, p in enumerate(self.momenta)}

    def momentum_index(self, beta: Sequence[int]) -> int | None:
        return self._mom_index.get(tuple(int(c) for c in beta))

    def index(self, beta: Sequence[int], occupancy: Sequence[int] | None = None) -> int:
        j = self.momentum_index(beta)
        if j is None:
            raise FockError(f"momentum {tuple(beta)} is outside the window")
        occ = tuple(occupancy) if occupancy is not None else (0,) * (self.rank * self.level)
        if occ not in self._osc_index:
            raise FockError(f"occupancy {occ} is not in the truncated basis")
        return j * self.osc_dim + self._osc_index[occ]

    def state(self, k: int) -> tuple[Vec, tuple[int, ...]]:
        j, o = divmod(k, self.osc_dim)
        return self.momenta[j], self.occupancies[o]

    @cached_property
    def _osc_cache(self) -> dict:
        return {}

    def osc_matrix(self, i: int, n: int) -> sp.csr_array:
        """a^i_n on the oscillator factor alone (creators truncated at the cutoff)."""
        key = (i, n)
        if key in self._osc_cache:
            return self._osc_cache[key]
        L = self.level
        slot = i * L + abs(n) - 1
        rows, cols, vals = [], [], []
        for col, occ in enumerate(self.occupancies):
            k = occ[slot]
            new = list(occ)
            if n > 0:
                if k == 0:
                    continue
                new[slot] = k - 1
                v = np.sqrt(n * k)
            else:
                new[slot] = k + 1
                v = np.sqrt(-n * (k + 1))
            row = self._osc_index.get(tuple(new))
            if row is not None:
                rows.append(row)
                cols.append(col)
                vals.append(v)
        M = sp.csr_array((vals, (rows, cols)), shape=(self.osc_dim, self.osc_dim))
        self._osc_cache[key] = M
        return M


def enumerate_basis(
    r: int, L: int, window: Sequence[Sequence[int]], vectors: np.ndarray | None = None
) -> FockBasis:
    """Basis for the momentum ``window`` (root-lattice coordinates).

    ``vectors`` gives the orthonormal momentum of each window point, in the
    same order as ``window``; by default the coordinates are used directly.
    """
    if L < 0:
        raise FockError("level cutoff must be non-negative")
    pts = [tuple(int(c) for c in p) for p in window]
    if not pts:
        raise FockError("momentum window is empty")
    if len(set(pts)) != len(pts):
        raise FockError("momentum window has repeated points")
    if any(len(p) != r for p in pts):
        raise FockError("window points must have one coordinate per boson")
    vec = np.asarray(pts, dtype=float) if vectors is None else np.asarray(vectors, dtype=float)
    order = sorted(range(len(pts)), key=lambda k: pts[k])
    vec = vec[order].copy()
    vec.setflags(write=False)
    return FockBasis(r, L, tuple(pts[k] for k in order), vec)


# --- operators ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    basis: FockBasis
    matrix: sp.csr_array = field(repr=False)
    exact: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def _check(self, other: "OperatorMatrix") -> None:
        if other.basis is not self.basis:
            raise FockError("operators act on different bases")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.basis, (self.matrix + other.matrix).tocsr(), self.exact & other.exact)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self + (-1.0) * other

    def __mul__(self, c) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, (self.matrix * c).tocsr(), self.exact.copy())

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorMatrix":
        return (-1.0) * self

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        pattern = other.matrix.copy()
        pattern.data = np.ones_like(pattern.data, dtype=float)
        bad = (~self.exact).astype(float)
        reach = pattern.T @ bad
        exact = other.exact & (reach == 0)
        return OperatorMatrix(self.basis, (self.matrix @ other.matrix).tocsr(), exact)

    def commutator(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self @ other - other @ self

    def dagger(self) -> "OperatorMatrix":
        # adjoint of a truncated matrix is only meaningful column-wise on exact states
        return OperatorMatrix(self.basis, self.matrix.conj().T.tocsr(), self.exact.copy())

    def column_residual(self, other: "OperatorMatrix", mask: np.ndarray | None = None):
        """(max |self - other| over columns exact in both (and in ``mask``), #columns)."""
        self._check(other)
        cols = self.exact & other.exact
        if mask is not None:
            cols = cols & mask
        n = int(cols.sum())
        if n == 0:
            return 0.0, 0
        D = (self.matrix - other.matrix).tocsc()[:, np.nonzero(cols)[0]]
        return (float(np.abs(D.data).max()) if D.nnz else 0.0), n

    def element(self, row: int, col: int) -> complex:
        return self.matrix[row, col]


def identity(basis: FockBasis) -> OperatorMatrix:
    return OperatorMatrix(basis, sp.identity(basis.dim, format="csr"), np.ones(basis.dim, bool))


def zero(basis: FockBasis) -> OperatorMatrix:
    return OperatorMatrix(basis, sp.csr_array((basis.dim, basis.dim)), np.ones(basis.dim, bool))


def _kron_mom(basis: FockBasis, mom: sp.spmatrix, osc: sp.spmatrix) -> sp.csr_array:
    return sp.csr_array(sp.kron(mom, osc, format="csr"))


def apply_oscillator(basis: FockBasis, i: int, n: int) -> OperatorMatrix:
    """a^i_n with [a^i_m, a^j_n] = m delta^{ij} delta_{m+n}."""
    if n == 0:
        raise FockError("the zero mode is the momentum operator, see apply_momentum")
    if abs(n) > basis.level:
        raise FockError(f"|n|={abs(n)} exceeds the level cutoff {basis.level}")
    if not 0 <= i < basis.rank:
        raise FockError(f"colour {i} out of range")
    mat = _kron_mom(basis, sp.identity(len(basis.momenta)), basis.osc_matrix(i, n))
    exact = np.ones(basis.dim, bool) if n > 0 else basis.levels - n <= basis.level
    return OperatorMatrix(basis, mat, exact)


def apply_momentum(basis: FockBasis, i: int) -> OperatorMatrix:
    if not 0 <= i < basis.rank:
        raise FockError(f"colour {i} out of range")
    diag = np.repeat(basis.momentum_vectors[:, i], basis.osc_dim)
    return OperatorMatrix(basis, sp.diags_array(diag, format="csr"), np.ones(basis.dim, bool))


def shift_matrix(basis: FockBasis, alpha: Sequence[int], coeffs: Sequence[float] | None = None):
    """Momentum part |beta> -> c_beta |beta + alpha> and the momenta that land outside."""
    nm = len(basis.momenta)
    rows, cols, vals = [], [], []
    outside = np.zeros(nm, bool)
    for j, beta in enumerate(basis.momenta):
        target = basis.momentum_index(tuple(b + a for b, a in zip(beta, alpha)))
        if target is None:
            outside[j] = True
            continue
        rows.append(target)
        cols.append(j)
        vals.append(1.0 if coeffs is None else coeffs[j])
    return sp.csr_array((vals, (rows, cols)), shape=(nm, nm)), outside


def apply_shift(basis: FockBasis, alpha: Sequence[int]) -> OperatorMatrix:
    """e^{i alpha.q}: |beta> -> |beta + alpha>, occupancies untouched."""
    mom, outside = shift_matrix(basis, alpha)
    mat = _kron_mom(basis, mom, sp.identity(basis.osc_dim))
    return OperatorMatrix(basis, mat, ~np.repeat(outside, basis.osc_dim))


def norm_squared(vec) -> float:
    v = np.asarray(vec).ravel()
    return float(np.vdot(v, v).real)


def basis_vector(basis: FockBasis, k: int) -> np.ndarray:
    v = np.zeros(basis.dim)
    v[k] = 1.0
    return v
