"""Symbolic bracket tables for the two-index algebras and the single-index one.

Symbols are tuples (kind, label, index):
    kind  "H" (Cartan, label (j,) = simple root alpha_j . H), "E" (label = root),
          "L" (label ()), "K" (the central element, label (), index ()).
Torus indices are (m, p), sphere indices (l, m), single-index ones (m,).
Linear combinations are dicts symbol -> coefficient. Torus and single-index
coefficients are ints or Fractions, so those tables are exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .report import Record, Report
from .roots import CocycleTable, SimplyLacedAlgebra, gauged_cocycle
from .sphere import expand_product

Symbol = tuple
KAPPA: Symbol = ("K", (), ())


class AlgebraError(ValueError):
    pass


def H(j: int, *index: int) -> Symbol:
    return ("H", (j,), tuple(index))


def E(alpha: Sequence[int], *index: int) -> Symbol:
    return ("E", tuple(alpha), tuple(index))


def Lsym(*index: int) -> Symbol:
    return ("L", (), tuple(index))


def add_into(acc: dict, combo: dict, scale=1) -> dict:
    for k, v in combo.items():
        acc[k] = acc.get(k, 0) + scale * v
    return acc


def clean(combo: dict) -> dict:
    return {k: v for k, v in combo.items() if v != 0}


def norm(combo: dict) -> float:
    return max((abs(float(v)) for v in combo.values()), default=0.0)


_ORDER = {"H": 0, "E": 1, "L": 2, "K": 3}


@dataclass(eq=False)
class BracketTable:
    """Common bracket logic. Subclasses provide how second indices combine."""

    algebra: SimplyLacedAlgebra
    cocycle: CocycleTable = field(repr=False)
    surface: str = ""

    def __post_init__(self):
        self._cache: dict = {}

    # index arithmetic hooks -------------------------------------------------
    def z_mode(self, idx: tuple) -> int:
        raise NotImplementedError

    def products(self, i1: tuple, i2: tuple) -> list[tuple[tuple, object]]:
        """Second-direction product: [(index of result, coefficient)]."""
        raise NotImplementedError

    def pairing(self, i1: tuple, i2: tuple):
        """Invariant pairing of the second-direction functions (central terms)."""
        raise NotImplementedError

    def valid(self, sym: Symbol) -> bool:
        raise NotImplementedError

    # ------------------------------------------------------------------------
    def check_symbol(self, sym: Symbol) -> None:
        kind, label, _ = sym
        if kind not in _ORDER:
            raise AlgebraError(f"unknown generator kind {kind!r}")
        if kind == "E" and not self.algebra.is_root(label):
            raise AlgebraError(f"{label} is not a root")
        if kind == "H" and not (len(label) == 1 and 0 <= label[0] < self.algebra.rank):
            raise AlgebraError(f"Cartan label {label} out of range")
        if kind != "K" and not self.valid(sym):
            raise AlgebraError(f"index {sym[2]} invalid on the {self.surface}")

    def _a_inner(self, j: int, alpha: tuple) -> int:
        return int(sum(self.algebra.cartan_matrix[j][k] * alpha[k] for k in range(self.algebra.rank)))

    def bracket(self, x: Symbol, y: Symbol) -> dict:
        key = (x, y)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if x[0] == "K" or y[0] == "K":
            out = {}
        elif _ORDER[x[0]] > _ORDER[y[0]]:
            out = {k: -v for k, v in self._raw(y, x).items()}
        else:
            out = self._raw(x, y)
        out = clean(out)
        self._cache[key] = out
        return out

    def _raw(self, x: Symbol, y: Symbol) -> dict:
        (kx, lx, ix), (ky, ly, iy) = x, y
        mx, my = self.z_mode(ix), self.z_mode(iy)
        out: dict = {}
        prods = self.products(ix, iy)
        if kx == "H" and ky == "H":
            a = int(self.algebra.cartan_matrix[lx[0]][ly[0]])
            if a and mx + my == 0:
                c = self.pairing(ix, iy)
                if c:
                    out[KAPPA] = mx * a * c
        elif kx == "H" and ky == "E":
            a = self._a_inner(lx[0], ly)
            for idx, c in prods:
                add_into(out, {("E", ly, idx): a * c})
        elif kx == "E" and ky == "E":
            tot = tuple(p + q for p, q in zip(lx, ly))
            if self.algebra.is_root(tot):
                s = self.cocycle.sign(lx, ly)
                for idx, c in prods:
                    add_into(out, {("E", tot, idx): s * c})
            elif not any(tot):
                for idx, c in prods:
                    for j, cj in enumerate(lx):
                        if cj:
                            add_into(out, {("H", (j,), idx): cj * c})
                if mx + my == 0:
                    c = self.pairing(ix, iy)
                    if c:
                        out[KAPPA] = out.get(KAPPA, 0) + mx * c
        elif kx == "L" and ky == "L":
            for idx, c in prods:
                add_into(out, {("L", (), idx): (mx - my) * c})
            if mx + my == 0:
                c = self.pairing(ix, iy)
                if c:
                    out[KAPPA] = Fraction(self.algebra.rank, 12) * mx * (mx * mx - 1) * c
        elif kx == "H" and ky == "L":
            # [H_x, L_y] = -[L_y, H_x] = m_x H
            for idx, c in prods:
                add_into(out, {("H", lx, idx): mx * c})
        elif kx == "E" and ky == "L":
            for idx, c in prods:
                add_into(out, {("E", lx, idx): mx * c})
        else:
            raise AlgebraError(f"no bracket rule for {kx}, {ky}")
        return out

    def bracket_combo(self, combo: dict, y: Symbol) -> dict:
        out: dict = {}
        for x, c in combo.items():
            add_into(out, self.bracket(x, y), c)
        return out

    def combo_bracket(self, x: Symbol, combo: dict) -> dict:
        out: dict = {}
        for y, c in combo.items():
            add_into(out, self.bracket(x, y), c)
        return out

    def symbols(self, indices: Iterable[tuple]) -> list[Symbol]:
        idx = list(indices)
        out = [H(j, *i) for j in range(self.algebra.rank) for i in idx]
        out += [E(a, *i) for a in self.algebra.roots for i in idx]
        out += [Lsym(*i) for i in idx]
        return [s for s in out if self.valid(s)]


@dataclass(eq=False)
class TorusTable(BracketTable):
    surface: str = "torus"

    def z_mode(self, idx):
        return idx[0]

    def products(self, i1, i2):
        return [((i1[0] + i2[0], i1[1] + i2[1]), 1)]

    def pairing(self, i1, i2):
        return 1 if i1[1] + i2[1] == 0 else 0

    def valid(self, sym):
        return len(sym[2]) == 2


@dataclass(eq=False)
class StandardTable(BracketTable):
    surface: str = "circle"

    def z_mode(self, idx):
        return idx[0]

    def products(self, i1, i2):
        return [((i1[0] + i2[0],), 1)]

    def pairing(self, i1, i2):
        return 1

    def valid(self, sym):
        return len(sym[2]) == 1


@dataclass(eq=False)
class SphereTable(BracketTable):
    surface: str = "sphere"

    def z_mode(self, idx):
        return idx[1]

    def products(self, i1, i2):
        (l1, m1), (l2, m2) = i1, i2
        return [((l3, m1 + m2), c) for l3, c in expand_product(l1, m1, l2, m2, tol=1e-14)]

    def pairing(self, i1, i2):
        # int du/2 Q_{l1 m1} Q_{l2, -m1} = (-1)^{m1} delta_{l1 l2}
        (l1, m1), (l2, m2) = i1, i2
        if l1 != l2 or m1 + m2:
            return 0
        return -1 if m1 % 2 else 1

    def valid(self, sym):
        idx = sym[2]
        return len(idx) == 2 and abs(idx[1]) <= idx[0]


def _table_cocycle(algebra: SimplyLacedAlgebra) -> CocycleTable:
    reach = 2 * max(max(abs(c) for c in a) for a in algebra.roots)
    return gauged_cocycle(algebra, reach)


def torus_table(algebra: SimplyLacedAlgebra) -> TorusTable:
    return TorusTable(algebra, _table_cocycle(algebra))


def sphere_table(algebra: SimplyLacedAlgebra) -> SphereTable:
    return SphereTable(algebra, _table_cocycle(algebra))


def standard_table(algebra: SimplyLacedAlgebra) -> StandardTable:
    return StandardTable(algebra, _table_cocycle(algebra))


def bracket(table: BracketTable, x: Symbol, y: Symbol) -> dict:
    table.check_symbol(x)
    table.check_symbol(y)
    return table.bracket(x, y)


def jacobi_combo(table: BracketTable, x: Symbol, y: Symbol, z: Symbol) -> dict:
    out: dict = {}
    add_into(out, table.combo_bracket(x, table.bracket(y, z)))
    add_into(out, table.combo_bracket(y, table.bracket(z, x)))
    add_into(out, table.combo_bracket(z, table.bracket(x, y)))
    return clean(out)


def jacobi_residual(table: BracketTable, x: Symbol, y: Symbol, z: Symbol) -> float:
    return norm(jacobi_combo(table, x, y, z))


@dataclass
class ScanResult:
    pairs: int = 0
    triples: int = 0
    antisymmetry: float = 0.0
    jacobi: float = 0.0
    worst_pair: tuple | None = None
    worst_triple: tuple | None = None
    violations: list = field(default_factory=list)


def scan(table: BracketTable, symbols: Sequence[Symbol], threshold: float = 0.0) -> ScanResult:
    """Antisymmetry over ordered pairs and Jacobi over unordered triples with repetition.

    Triples whose residual exceeds ``threshold`` are collected verbatim.
    """
    syms = sorted(set(symbols) | ({KAPPA} if symbols else set()), key=_sort_key)
    res = ScanResult()
    for x in syms:
        for y in syms:
            r = norm(clean(add_into(dict(table.bracket(x, y)), table.bracket(y, x))))
            res.pairs += 1
            if r > res.antisymmetry:
                res.antisymmetry, res.worst_pair = r, (x, y)
    for x, y, z in itertools.combinations_with_replacement(syms, 3):
        r = jacobi_residual(table, x, y, z)
        res.triples += 1
        if r > res.jacobi:
            res.jacobi, res.worst_triple = r, (x, y, z)
        if r > threshold:
            res.violations.append(((x, y, z), r))
    return res


def _sort_key(s: Symbol):
    return (_ORDER[s[0]], s[1], s[2])


def torus_symbols(table: BracketTable, M: int, P: int) -> list[Symbol]:
    return table.symbols((m, p) for m in range(-M, M + 1) for p in range(-P, P + 1))


def sphere_symbols(table: BracketTable, lmax: int) -> list[Symbol]:
    return table.symbols((l, m) for l in range(lmax + 1) for m in range(-l, l + 1))


def scan_report(table: BracketTable, symbols: Sequence[Symbol], tol: float) -> Report:
    r = scan(table, symbols, threshold=tol)
    rep = Report()
    tag = f"structure constants / {table.surface}"
    rep.add(Record(f"{table.surface} antisymmetry", tag, r.antisymmetry, tol, n_checked=r.pairs,
                   detail=_fmt_syms(r.worst_pair)))
    rep.add(Record(f"{table.surface} Jacobi", tag, r.jacobi, tol, n_checked=r.triples,
                   detail=_fmt_syms(r.worst_triple)))
    return rep


def _fmt_syms(syms) -> str:
    if not syms:
        return ""
    return " ".join(f"{k}{''.join(str(c) for c in lab)}{idx}" for k, lab, idx in syms)


# --- single-index embedding ------------------------------------------------------

def _embed(sym: Symbol) -> Symbol:
    if sym[0] == "K":
        return sym
    return (sym[0], sym[1], (sym[2][0], 0))


def _embed_combo(combo: dict) -> dict:
    out: dict = {}
    for k, v in combo.items():
        add_into(out, {_embed(k): v})
    return clean(out)


def standard_embedding(table: TorusTable, M: int = 2, Q: int = 2) -> Report:
    """X_m -> X_{m,0}, kappa -> kappa is a bracket homomorphism, and the p = 0 sector
    acts on each second-index sector q without changing q."""
    if not isinstance(table, TorusTable):
        raise AlgebraError("the embedding is defined for the torus table")
    std = StandardTable(table.algebra, table.cocycle)
    src = std.symbols((m,) for m in range(-M, M + 1)) + [KAPPA]
    bad, pairs = 0, 0
    worst = ""
    for x in src:
        for y in src:
            lhs = _embed_combo(std.bracket(x, y))
            rhs = table.bracket(_embed(x), _embed(y))
            pairs += 1
            if lhs != rhs:
                bad += 1
                worst = worst or _fmt_syms((x, y))
    rep = Report()
    tag = "single-index subalgebra / torus"
    rep.add(Record("embedding homomorphism", tag, float(bad), 0.0, n_checked=pairs, detail=worst))
    module_bad, n = 0, 0
    for x in src:
        if x[0] == "K":
            continue
        xe = _embed(x)
        for q in range(-Q, Q + 1):
            if q == 0:
                continue
            for y in table.symbols((m, q) for m in range(-M, M + 1)):
                n += 1
                for s in table.bracket(xe, y):
                    if s[0] == "K" or s[2][1] != q:
                        module_bad += 1
    rep.add(Record("embedding sectors q != 0 are modules", tag, float(module_bad), 0.0, n_checked=n))
    return rep
