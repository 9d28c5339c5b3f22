"""Simply-laced root systems, root/weight lattices and the lattice cocycle.

Lattice vectors are plain integer tuples. Root-lattice vectors are written in
the simple-root basis, weight-lattice vectors in the fundamental-weight basis.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Vec = tuple[int, ...]


class RootSystemError(ValueError):
    pass


class GaugeError(RuntimeError):
    """No gauge satisfying the normalisation conditions exists on the window."""


_CLASSICAL_ROOT_COUNT = {
    "E": {6: 72, 7: 126, 8: 240},
}


def expected_root_count(kind: str, rank: int) -> int:
    if kind == "A":
        return rank * (rank + 1)
    if kind == "D":
        return 2 * rank * (rank - 1)
    return _CLASSICAL_ROOT_COUNT["E"][rank]


def _unit(n: int, i: int, scale: int = 1) -> list[Fraction]:
    v = [Fraction(0)] * n
    v[i] = Fraction(scale)
    return v


def _ambient_simple_roots(kind: str, rank: int) -> list[tuple[Fraction, ...]]:
    if kind == "A":
        n = rank + 1
        roots = []
        for i in range(rank):
            v = _unit(n, i)
            v[i + 1] = Fraction(-1)
            roots.append(v)
    elif kind == "D":
        roots = []
        for i in range(rank - 1):
            v = _unit(rank, i)
            v[i + 1] = Fraction(-1)
            roots.append(v)
        v = _unit(rank, rank - 2)
        v[rank - 1] = Fraction(1)
        roots.append(v)
    else:
        # Bourbaki labelling inside the E8 lattice; E6/E7 take the first roots.
        h = Fraction(1, 2)
        e8 = [[h, -h, -h, -h, -h, -h, -h, h]]
        v = _unit(8, 0)
        v[1] = Fraction(1)
        e8.append(v)
        for i in range(6):
            v = _unit(8, i + 1)
            v[i] = Fraction(-1)
            e8.append(v)
        roots = e8[:rank]
    return [tuple(r) for r in roots]


@dataclass(frozen=True)
class SimplyLacedAlgebra:
    kind: str
    rank: int
    simple_roots: tuple[tuple[Fraction, ...], ...] = field(repr=False)
    cartan_matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def name(self) -> str:
        return f"{self.kind}{self.rank}"

    def __hash__(self) -> int:
        return hash((self.kind, self.rank))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimplyLacedAlgebra):
            return NotImplemented
        return (self.kind, self.rank) == (other.kind, other.rank)

    @cached_property
    def positive_roots(self) -> tuple[Vec, ...]:
        """Positive roots in simple-root coordinates, by height then lexicographically."""
        A = self.cartan_matrix
        r = self.rank
        found = {tuple(int(i == j) for j in range(r)) for i in range(r)}
        frontier = sorted(found)
        while frontier:
            nxt = []
            for beta in frontier:
                b = np.asarray(beta)
                for i in range(r):
                    # beta + alpha_i is a root iff beta . alpha_i = -1 (simply laced)
                    if int(b @ A[:, i]) == -1:
                        gamma = list(beta)
                        gamma[i] += 1
                        gamma = tuple(gamma)
                        if gamma not in found:
                            found.add(gamma)
                            nxt.append(gamma)
            frontier = sorted(nxt)
        return tuple(sorted(found, key=lambda v: (sum(v), v)))

    @cached_property
    def roots(self) -> tuple[Vec, ...]:
        pos = self.positive_roots
        neg = tuple(tuple(-c for c in v) for v in pos)
        return tuple(sorted(pos + neg))

    @cached_property
    def root_set(self) -> frozenset[Vec]:
        return frozenset(self.roots)

    def is_root(self, x: Sequence[int]) -> bool:
        return tuple(x) in self.root_set

    def inner(self, x: Sequence[int], y: Sequence[int]) -> int:
        """Inner product of two root-lattice vectors (simple-root coordinates)."""
        if len(x) != self.rank or len(y) != self.rank:
            raise RootSystemError(
                f"lattice vectors of length {len(x)}, {len(y)} do not belong to {self.name}"
            )
        return int(np.asarray(x) @ self.cartan_matrix @ np.asarray(y))

    @cached_property
    def inverse_cartan(self) -> tuple[tuple[Fraction, ...], ...]:
        A = self.cartan_matrix
        det = int(round(np.linalg.det(A)))
        adj = np.rint(np.linalg.inv(A) * det).astype(int)
        return tuple(tuple(Fraction(int(a), det) for a in row) for row in adj)

    def weight_inner(self, lam: Sequence[int], mu: Sequence[int]) -> Fraction:
        """Inner product of weight-lattice vectors (fundamental-weight coordinates)."""
        if len(lam) != self.rank or len(mu) != self.rank:
            raise RootSystemError("weight vectors do not match the algebra rank")
        G = self.inverse_cartan
        return sum(
            (Fraction(lam[i]) * G[i][j] * mu[j] for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def root_weight_inner(self, alpha: Sequence[int], lam: Sequence[int]) -> int:
        # alpha_i . omega_j = delta_ij for simply-laced algebras
        return int(sum(a * l for a, l in zip(alpha, lam)))

    def root_to_weight(self, alpha: Sequence[int]) -> Vec:
        return tuple(int(v) for v in self.cartan_matrix @ np.asarray(alpha))

    @cached_property
    def orthonormal_simple_roots(self) -> np.ndarray:
        """Simple roots in an orthonormal basis of the rank-dimensional Cartan space."""
        return np.linalg.cholesky(self.cartan_matrix.astype(float))

    def orthonormal(self, alpha: Sequence[int]) -> np.ndarray:
        return np.asarray(alpha, dtype=float) @ self.orthonormal_simple_roots

    def weight_orthonormal(self, lam: Sequence[int]) -> np.ndarray:
        inv = np.array([[float(x) for x in row] for row in self.inverse_cartan])
        return np.asarray(lam, dtype=float) @ inv @ self.orthonormal_simple_roots


def build_algebra(kind: str, rank: int) -> SimplyLacedAlgebra:
    kind = kind.upper()
    valid = (
        (kind == "A" and rank >= 1)
        or (kind == "D" and rank >= 3)
        or (kind == "E" and rank in (6, 7, 8))
    )
    if not valid:
        raise RootSystemError(
            f"{kind}{rank} is not a simply-laced type (A_r r>=1, D_r r>=3, E6, E7, E8)"
        )
    simple = _ambient_simple_roots(kind, rank)
    gram = [[sum(a * b for a, b in zip(x, y)) for y in simple] for x in simple]
    cartan = np.array([[int(g) for g in row] for row in gram], dtype=int)
    cartan.setflags(write=False)
    return SimplyLacedAlgebra(kind, rank, tuple(simple), cartan)


def parse_algebra(name: str) -> SimplyLacedAlgebra:
    """Parse names such as ``A1``, ``d4`` or ``E8``."""
    name = name.strip()
    if len(name) < 2 or not name[1:].isdigit():
        raise RootSystemError(f"cannot parse algebra name {name!r}")
    return build_algebra(name[0], int(name[1:]))


def box_window(rank: int, bound: int) -> list[Vec]:
    return list(itertools.product(range(-bound, bound + 1), repeat=rank))


def asymmetry_matrix(algebra: SimplyLacedAlgebra) -> np.ndarray:
    """Integer form B with B + B^T = Cartan matrix, lower triangular."""
    A = algebra.cartan_matrix
    B = np.tril(A, k=-1).copy()
    np.fill_diagonal(B, 1)
    return B


@dataclass(frozen=True, eq=False)
class CocycleTable:
    """Sign function on a finite box of the root lattice.

    ``eta`` is ``None`` for the bimultiplicative table (-1)^{B(x, y)}. A gauged
    table multiplies by eta_x eta_y eta_{x+y} and is therefore only defined on
    pairs whose sum stays inside the window.
    """

    algebra: SimplyLacedAlgebra
    bound: int
    asymmetry: np.ndarray = field(repr=False)
    eta: np.ndarray | None = field(default=None, repr=False)

    @cached_property
    def points(self) -> np.ndarray:
        return np.array(box_window(self.algebra.rank, self.bound), dtype=np.int64).reshape(
            -1, self.algebra.rank
        )

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def gauged(self) -> bool:
        return self.eta is not None

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.algebra.rank and all(abs(int(c)) <= self.bound for c in x)

    def index(self, x: Sequence[int]) -> int:
        if not self.contains(x):
            raise RootSystemError(f"{tuple(x)} lies outside the cocycle window (bound {self.bound})")
        side = 2 * self.bound + 1
        idx = 0
        for c in x:
            idx = idx * side + int(c) + self.bound
        return idx

    def _base(self, x: Sequence[int], y: Sequence[int]) -> int:
        return -1 if int(np.asarray(x) @ self.asymmetry @ np.asarray(y)) % 2 else 1

    def sign(self, x: Sequence[int], y: Sequence[int]) -> int:
        ix, iy = self.index(x), self.index(y)
        s = self._base(x, y)
        if self.eta is not None:
            xy = tuple(int(a) + int(b) for a, b in zip(x, y))
            s *= int(self.eta[ix] * self.eta[iy] * self.eta[self.index(xy)])
        return s

    @cached_property
    def sum_index(self) -> np.ndarray:
        """Window index of x_i + x_j, or -1 when the sum leaves the window."""
        P = self.points
        side = 2 * self.bound + 1
        W = len(P)
        idx = np.zeros((W, W), dtype=np.int32)
        ok = np.ones((W, W), dtype=bool)
        for k in range(self.algebra.rank):
            col = P[:, k].astype(np.int16)
            s = col[:, None] + col[None, :]
            ok &= np.abs(s) <= self.bound
            idx = idx * side + (s + self.bound).astype(np.int32)
        idx[~ok] = -1
        return idx

    @cached_property
    def neg_index(self) -> np.ndarray:
        return np.arange(self.size)[::-1].copy()

    @cached_property
    def sign_matrix(self) -> np.ndarray:
        """W x W table of signs; zero marks pairs where a gauged table is undefined."""
        P = self.points
        parity = (P @ self.asymmetry @ P.T) % 2
        S = (1 - 2 * parity).astype(np.int8)
        if self.eta is not None:
            si = self.sum_index
            eta_sum = np.where(si >= 0, self.eta[np.maximum(si, 0)], 0).astype(np.int8)
            S = S * self.eta[:, None] * self.eta[None, :] * eta_sum
        return S

    def rows(self) -> Iterable[tuple[Vec, Vec, int]]:
        """(alpha, beta, sign) for every defined pair, in window order."""
        P = [tuple(int(c) for c in p) for p in self.points]
        S = self.sign_matrix
        for i, a in enumerate(P):
            for j, b in enumerate(P):
                if S[i, j]:
                    yield a, b, int(S[i, j])


def cocycle_table(algebra: SimplyLacedAlgebra, bound: int = 3) -> CocycleTable:
    B = asymmetry_matrix(algebra)
    B.setflags(write=False)
    return CocycleTable(algebra, bound, B)


def epsilon(table: CocycleTable, x: Sequence[int], y: Sequence[int]) -> int:
    return table.sign(x, y)


def apply_gauge(table: CocycleTable, eta: np.ndarray) -> CocycleTable:
    """eps'(x, y) = eta_x eta_y eta_{x+y} eps(x, y); composes with an existing gauge."""
    eta = np.asarray(eta, dtype=np.int8)
    if eta.shape != (table.size,) or not np.all(np.abs(eta) == 1):
        raise RootSystemError("gauge must assign +-1 to every window point")
    if table.eta is not None:
        eta = (eta * table.eta).astype(np.int8)
    eta.setflags(write=False)
    return CocycleTable(table.algebra, table.bound, table.asymmetry, eta)


def _pair_sign_violations(table: CocycleTable) -> dict[str, np.ndarray]:
    S = table.sign_matrix.astype(np.int64)
    si = table.sum_index
    neg = table.neg_index
    W = table.size
    zero = table.index((0,) * table.algebra.rank)
    defined = S != 0
    out = {}
    out["eps(0,a)=1"] = np.nonzero(S[zero, :] != 1)[0]
    out["eps(a,0)=1"] = np.nonzero(S[:, zero] != 1)[0]
    out["eps(a,-a)=1"] = np.nonzero(S[np.arange(W), neg] != 1)[0]
    # eps(a, b) = eps(-b, -a)
    swapped = S[neg][:, neg].T
    bad = defined & (S != swapped)
    out["eps(a,b)=eps(-b,-a)"] = np.argwhere(bad)
    # eps(a, b) = eps(-a, a + b)
    ii, jj = np.nonzero(defined)
    kk = si[ii, jj]
    bad = S[ii, jj] != S[neg[ii], kk]
    out["eps(a,b)=eps(-a,a+b)"] = np.stack([ii[bad], jj[bad]], axis=1)
    return out


def check_gauge_conditions(table: CocycleTable) -> dict[str, int]:
    return {k: int(len(v)) for k, v in _pair_sign_violations(table).items()}


def check_antisymmetry(table: CocycleTable) -> int:
    """Pairs violating eps(a,b) = (-1)^{a.b + (a.a)(b.b)} eps(b,a)."""
    P = table.points
    G = P @ table.algebra.cartan_matrix @ P.T
    norms = np.diag(G)
    expo = (G + np.outer(norms, norms)) % 2
    S = table.sign_matrix.astype(np.int64)
    defined = S != 0
    bad = defined & (S != (1 - 2 * expo) * S.T)
    return int(bad.sum())


def _cocycle_kernel():
    from numba import njit

    @njit(cache=True)
    def kernel(S, V, Spad):
        # Window indices are mixed-radix, so idx(x + y) = idx(x) + idx(y) - idx(0)
        # whenever x + y lies in the box; V masks exactly those pairs. For fixed
        # (a, b) the loop over c runs over contiguous rows with branch-free masks.
        W = S.shape[0]
        zero = (W - 1) // 2
        checked = 0
        violations = 0
        first = np.full(3, -1, dtype=np.int64)
        for a in range(W):
            for b in range(W):
                if not V[a, b]:
                    continue
                ab = a + b - zero
                off = b  # Spad[a, off + c] == S[a, b + c - zero]
                sab = S[a, b]
                n = 0
                bad = 0
                for c in range(W):
                    m = V[b, c] & V[ab, c]
                    n += m
                    bad += (sab ^ S[ab, c] ^ S[b, c] ^ Spad[a, off + c]) & m
                checked += n
                if bad:
                    for c in range(W):
                        if V[b, c] & V[ab, c] & (sab ^ S[ab, c] ^ S[b, c] ^ Spad[a, off + c]):
                            if violations == 0:
                                first[0] = a
                                first[1] = b
                                first[2] = c
                            violations += 1
        return checked, violations, first

    return kernel


_KERNEL = None


def check_cocycle(table: CocycleTable) -> tuple[int, int, tuple[Vec, Vec, Vec] | None]:
    """Exhaustive 2-cocycle check over every window triple whose partial sums stay in the window.

    Returns (triples checked, violations, first offending triple or None).
    """
    global _KERNEL
    if _KERNEL is None:
        _KERNEL = _cocycle_kernel()
    # parity bits: sign -1 -> 1, +1 -> 0 (undefined entries are never read)
    S = np.ascontiguousarray((table.sign_matrix < 0).astype(np.uint8))
    V = np.ascontiguousarray((table.sum_index >= 0).astype(np.uint8))
    W = table.size
    zero = (W - 1) // 2
    Spad = np.zeros((W, 2 * W), dtype=np.uint8)
    Spad[:, zero:zero + W] = S
    checked, violations, first = _KERNEL(S, V, Spad)
    P = table.points
    offender = None
    if violations:
        offender = tuple(tuple(int(c) for c in P[i]) for i in first)
    return int(checked), int(violations), offender


def _positive(x: Sequence[int]) -> bool:
    for c in x:
        if c:
            return c > 0
    return False


def greedy_gauge(table: CocycleTable) -> np.ndarray:
    """eta with eta_0 = 1, eta_a = 1 for lexicographically positive a and
    eta_{-a} fixed by eps'(a, -a) = 1."""
    S = table.sign_matrix
    neg = table.neg_index
    eta = np.ones(table.size, dtype=np.int8)
    for i, p in enumerate(table.points):
        if _positive(p):
            eta[neg[i]] = eta[i] * S[i, neg[i]]
    return eta


def exhaustive_gauges(table: CocycleTable) -> list[np.ndarray]:
    """Every eta (eta_0 = 1) satisfying all normalisation conditions. Tiny windows only."""
    W = table.size
    if W > 16:
        raise RootSystemError("exhaustive gauge search is limited to windows of at most 16 points")
    zero = table.index((0,) * table.algebra.rank)
    free = [i for i in range(W) if i != zero]
    found = []
    for signs in itertools.product((1, -1), repeat=len(free)):
        eta = np.ones(W, dtype=np.int8)
        eta[free] = signs
        candidate = apply_gauge(table, eta)
        if not any(check_gauge_conditions(candidate).values()):
            found.append(eta)
    return found


def gauge_fix(table: CocycleTable, method: str = "greedy") -> CocycleTable:
    if method == "greedy":
        eta = greedy_gauge(table)
    elif method == "exhaustive":
        gauges = exhaustive_gauges(table)
        if not gauges:
            raise GaugeError("exhaustive search found no admissible gauge on the window")
        eta = gauges[0]
    else:
        raise ValueError(f"unknown gauge method {method!r}")
    fixed = apply_gauge(table, eta)
    violated = {k: v for k, v in check_gauge_conditions(fixed).items() if v}
    if violated:
        raise GaugeError(f"gauge conditions violated on the window: {violated}")
    return fixed


def gauged_cocycle(algebra: SimplyLacedAlgebra, bound: int = 3) -> CocycleTable:
    return gauge_fix(cocycle_table(algebra, bound))


def export_csv_rows(table: CocycleTable) -> list[str]:
    r = table.algebra.rank
    head = ",".join([f"a{i}" for i in range(r)] + [f"b{i}" for i in range(r)] + ["sign"])
    lines = [head]
    for a, b, s in table.rows():
        lines.append(",".join(str(v) for v in (*a, *b, s)))
    return lines
