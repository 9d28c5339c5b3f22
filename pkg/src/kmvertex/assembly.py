"""Two-index generators as node-diagonal operators on a discretised second direction.

A generator with second index p (torus) or (l, m) (sphere) is the sum over grid
nodes of a scalar coefficient times the same single-node mode matrix. Operators
on distinct nodes commute, so every bracket is again node-diagonal and all
comparisons are made node by node on the single-node space.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .fock import OperatorMatrix
from .regularization import regularized_delta0_sphere, regularized_delta0_torus
from .report import Record, Report
from .sphere import eval_Q, expand_product, quadrature_grid
from .vertex import Site, VertexError

TORUS, SPHERE = "torus", "sphere"


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NodeGrid:
    surface: str
    nodes: np.ndarray = field(repr=False)
    measure: np.ndarray = field(repr=False)  # weights of dphi/2pi or du/2

    @property
    def count(self) -> int:
        return len(self.nodes)

    def coefficients(self, index: tuple[int, int]) -> np.ndarray:
        if self.surface == TORUS:
            _, p = index
            return np.exp(1j * p * self.nodes)
        l, m = index
        return np.asarray(eval_Q(l, m, self.nodes), dtype=float)


def torus_grid(N: int) -> NodeGrid:
    if N < 1:
        raise AssemblyError("the torus grid needs at least one site")
    phi = 2 * np.pi * np.arange(N) / N
    return NodeGrid(TORUS, phi, np.full(N, 1.0 / N))


def sphere_grid(K: int) -> NodeGrid:
    g = quadrature_grid(K)
    return NodeGrid(SPHERE, np.array(g.nodes), np.array(g.weights) / 2)


@dataclass(frozen=True, eq=False)
class NodeDiagonalOperator:
    """sum_k sum_t coeffs_t[k] X_t^{(k)}."""

    grid: NodeGrid
    terms: tuple[tuple[np.ndarray, OperatorMatrix], ...]

    def node(self, k: int):
        out = None
        for c, X in self.terms:
            if c[k] == 0:
                continue
            piece = X.matrix * c[k]
            out = piece if out is None else out + piece
        return out

    @property
    def exact(self) -> np.ndarray:
        mask = None
        for _, X in self.terms:
            mask = X.exact.copy() if mask is None else mask & X.exact
        return mask

    def __sub__(self, other: "NodeDiagonalOperator") -> "NodeDiagonalOperator":
        if other.grid is not self.grid:
            raise AssemblyError("operators live on different grids")
        return NodeDiagonalOperator(self.grid, self.terms + tuple((-c, X) for c, X in other.terms))

    def scaled(self, s) -> "NodeDiagonalOperator":
        return NodeDiagonalOperator(self.grid, tuple((s * c, X) for c, X in self.terms))


def combine(grid: NodeGrid, ops: Sequence[tuple[float, "NodeDiagonalOperator"]]) -> NodeDiagonalOperator:
    terms: tuple = ()
    for s, op in ops:
        terms = terms + op.scaled(s).terms
    return NodeDiagonalOperator(grid, terms)


@dataclass(frozen=True, eq=False)
class GeneralizedMode:
    surface: str
    kind: str  # "H", "E" or "L"
    label: object  # boson index, root, or None
    index: tuple[int, int]  # (m, p) on the torus, (l, m) on the sphere
    operator: NodeDiagonalOperator = field(repr=False)

    @property
    def z_mode(self) -> int:
        return self.index[0] if self.surface == TORUS else self.index[1]


def _site_operator(site: Site, kind: str, label, m: int, limit: int | None) -> OperatorMatrix:
    if kind == "H":
        return site.heisenberg(label, m, limit)
    if kind == "E":
        return site.vertex(label, m, limit).matrix
    if kind == "L":
        return site.virasoro(m, limit)
    raise AssemblyError(f"unknown generator type {kind!r}")


def build_torus_mode(site: Site, kind: str, label, m: int, p: int, grid: NodeGrid, target: bool = False) -> GeneralizedMode:
    if grid.surface != TORUS:
        raise AssemblyError("torus modes need a torus grid")
    limit = 2 * site.cfg.modes if target else site.cfg.modes
    try:
        X = _site_operator(site, kind, label, m, limit)
    except VertexError as exc:
        raise AssemblyError(str(exc)) from exc
    p = p % grid.count
    op = NodeDiagonalOperator(grid, ((grid.coefficients((m, p)), X),))
    return GeneralizedMode(TORUS, kind, label, (m, p), op)


def build_sphere_mode(site: Site, kind: str, label, l: int, m: int, grid: NodeGrid, lmax: int, target: bool = False) -> GeneralizedMode:
    if grid.surface != SPHERE:
        raise AssemblyError("sphere modes need a sphere grid")
    lcap = 2 * lmax if target else lmax
    mcap = 2 * site.cfg.modes if target else site.cfg.modes
    if not (abs(m) <= l <= lcap and abs(m) <= mcap):
        raise AssemblyError(f"sphere mode (l={l}, m={m}) outside l <= {lcap}, |m| <= min(l, {mcap})")
    X = _site_operator(site, kind, label, m, mcap)
    op = NodeDiagonalOperator(grid, ((grid.coefficients((l, m)), X),))
    return GeneralizedMode(SPHERE, kind, label, (l, m), op)


def _commutator(site: Site, X: OperatorMatrix, Y: OperatorMatrix) -> OperatorMatrix:
    key = ("comm", id(X), id(Y))
    if key not in site._cache:
        site._cache[key] = X.commutator(Y)
    return site._cache[key]


def bracket_operators(site: Site, P: NodeDiagonalOperator, Q: NodeDiagonalOperator) -> NodeDiagonalOperator:
    """[sum_j c_j X^(j), sum_k d_k Y^(k)] = sum_k c_k d_k [X, Y]^(k)."""
    if P.grid is not Q.grid:
        raise AssemblyError("brackets need both operators on the same grid")
    terms = []
    for c, X in P.terms:
        for d, Y in Q.terms:
            terms.append((c * d, _commutator(site, X, Y)))
    return NodeDiagonalOperator(P.grid, tuple(terms))


def bracket(site: Site, A: GeneralizedMode, B: GeneralizedMode) -> NodeDiagonalOperator:
    return bracket_operators(site, A.operator, B.operator)


def nodewise_residual(diff: NodeDiagonalOperator):
    """Split each node's matrix into z_k * identity plus a remainder.

    Returns (max remainder over exact columns, z array, #exact columns).
    """
    cols = np.nonzero(diff.exact)[0]
    K = diff.grid.count
    z = np.zeros(K, dtype=complex)
    if len(cols) == 0:
        return 0.0, z, 0
    worst = 0.0
    for k in range(K):
        Mk = diff.node(k)
        if Mk is None:
            continue
        D = Mk.tocsc()[:, cols].toarray().astype(complex)
        diag = D[cols, np.arange(len(cols))]
        z[k] = diag.mean()
        D[cols, np.arange(len(cols))] -= z[k]
        if D.size:
            worst = max(worst, float(np.abs(D).max()))
    return worst, z, len(cols)


# --- target algebras --------------------------------------------------------------

def _generators(site: Site):
    alg = site.algebra
    out = [("H", i) for i in range(alg.rank)]
    out += [("E", a) for a in alg.roots]
    out.append(("L", None))
    return out


def _family(kx: str, ky: str) -> str:
    return f"[{kx},{ky}]"


def _target_terms(site: Site, x, y, mx: int, my: int):
    """Site-level structure: list of (scalar, kind, label, mode) plus the central coefficient."""
    alg = site.algebra
    (kx, lx), (ky, ly) = x, y
    s = mx + my
    r = alg.rank
    if kx == "H" and ky == "H":
        return [], (mx if (lx == ly and s == 0) else 0)
    if kx == "H" and ky == "E":
        return [(float(alg.orthonormal(ly)[lx]), "E", ly, s)], 0
    if kx == "E" and ky == "E":
        tot = tuple(a + b for a, b in zip(lx, ly))
        if alg.is_root(tot):
            return [(site.cfg.cocycle.sign(lx, ly), "E", tot, s)], 0
        if not any(tot):
            a = alg.orthonormal(lx)
            return [(float(a[i]), "H", i, s) for i in range(r) if abs(a[i]) > 1e-15], (mx if s == 0 else 0)
        return [], 0
    if kx == "L" and ky == "L":
        c = Fraction(r, 12) * mx * (mx * mx - 1) if s == 0 else 0
        return [(mx - my, "L", None, s)], float(c)
    if kx == "L" and ky in ("H", "E"):
        return [(-my, ky, ly, s)], 0
    return None


FAMILY_ORDER = ("[H,H]", "[H,E]", "[E,E]", "[L,L]", "[L,H]", "[L,E]")


class _Family:
    def __init__(self):
        self.res = 0.0
        self.n = 0
        self.worst = ""
        self.central_res = 0.0
        self.central_n = 0
        self.reduction_res = 0.0
        self.reduction_n = 0
        self.sample_factor = None
        self.sample_reduced = None

    def noncentral(self, res: float, n: int, label: str):
        if n and res > self.res:
            self.res, self.worst = res, label
        self.n += n


def _surface_pairs(site: Site, modes: list[GeneralizedMode]):
    for A in modes:
        for B in modes:
            fam = _family(A.kind, B.kind)
            if fam in FAMILY_ORDER:
                yield fam, A, B


def verify_surface_algebra(
    site: Site,
    grid: NodeGrid,
    lmax: int | None = None,
    tol: float | None = None,
    central_tol: float = 1e-10,
    p_values: Sequence[int] | None = None,
) -> Report:
    """Compare every generator bracket against the two-index target algebra."""
    surface = grid.surface
    if tol is None:
        tol = 1e-10 if surface == TORUS else 1e-8
    M = site.cfg.modes
    gens = _generators(site)
    if surface == TORUS:
        N = grid.count
        ps = list(range(N)) if p_values is None else [p % N for p in p_values]
        modes = [build_torus_mode(site, k, lab, m, p, grid) for k, lab in gens for m in range(-M, M + 1) for p in ps]
        delta0 = float(regularized_delta0_torus())
    else:
        if lmax is None:
            raise AssemblyError("sphere verification needs lmax")
        modes = [
            build_sphere_mode(site, k, lab, l, m, grid, lmax)
            for k, lab in gens
            for l in range(lmax + 1)
            for m in range(-min(l, M), min(l, M) + 1)
        ]
    fams = {f: _Family() for f in FAMILY_ORDER}
    target_cache: dict = {}

    def target_mode(kind, label, i1, i2):
        key = (kind, label if kind != "E" else tuple(label), i1, i2)
        if key not in target_cache:
            if surface == TORUS:
                target_cache[key] = build_torus_mode(site, kind, label, i1, i2, grid, target=True)
            else:
                target_cache[key] = build_sphere_mode(site, kind, label, i1, i2, grid, lmax, target=True)
        return target_cache[key]

    for fam, A, B in _surface_pairs(site, modes):
        F = fams[fam]
        mx, my = A.z_mode, B.z_mode
        terms, central = _target_terms(site, (A.kind, A.label), (B.kind, B.label), mx, my)
        br = bracket(site, A, B)
        parts = []
        if surface == TORUS:
            pq = (A.index[1] + B.index[1]) % grid.count
            for s, kind, label, mode in terms:
                parts.append((s, target_mode(kind, label, mode, pq).operator))
            cd = grid.coefficients((0, A.index[1])) * grid.coefficients((0, B.index[1]))
            expected_reduced = 1.0 if pq == 0 else 0.0
        else:
            (l1, m1), (l2, m2) = A.index, B.index
            m3 = m1 + m2
            for l3, c in expand_product(l1, m1, l2, m2):
                for s, kind, label, mode in terms:
                    parts.append((s * c, target_mode(kind, label, l3, m3).operator))
            cd = grid.coefficients(A.index) * grid.coefficients(B.index)
            expected_reduced = float((-1) ** (m1 % 2)) if (l1 == l2 and m3 == 0) else 0.0
            delta0 = float(regularized_delta0_sphere(m1))
        target = combine(grid, parts) if parts else NodeDiagonalOperator(grid, ())
        diff = br - target if parts else br
        res, z, ncols = nodewise_residual(diff)
        label = f"{A.kind}{_lab(A.label)}{A.index} {B.kind}{_lab(B.label)}{B.index}"
        F.noncentral(res, ncols * grid.count, label)
        if ncols:
            factor = complex(cd.sum())
            measured = complex(z.sum())
            F.central_res = max(F.central_res, abs(measured - central * factor))
            F.central_n += 1
            reduced = complex(np.dot(grid.measure, cd)) * delta0
            if central:
                F.reduction_res = max(F.reduction_res, abs(reduced - expected_reduced))
                F.reduction_n += 1
                if F.sample_factor is None and abs(factor) > 1e-12:
                    F.sample_factor = factor.real if abs(factor.imag) < 1e-12 else abs(factor)
                    F.sample_reduced = reduced.real
    rep = Report()
    prefix = surface
    for fam in FAMILY_ORDER:
        F = fams[fam]
        tg = ("two-index Virasoro" if "L" in fam else "two-index current algebra") + f" / {surface}"
        if F.n == 0 and F.central_n == 0:
            continue
        rep.add(Record(f"{prefix} {fam}", tg, F.res, tol, n_checked=F.n, detail=F.worst))
        rep.add(
            Record(
                f"{prefix} {fam} central",
                tg,
                F.central_res,
                central_tol,
                central_measured=F.sample_factor,
                central_reduced=F.sample_reduced,
                n_checked=F.central_n,
            )
        )
        if F.reduction_n:
            rep.add(
                Record(
                    f"{prefix} {fam} central reduction",
                    tg,
                    F.reduction_res,
                    central_tol,
                    central_measured=F.sample_factor,
                    central_reduced=F.sample_reduced,
                    n_checked=F.reduction_n,
                )
            )
    return rep


def _lab(label) -> str:
    if label is None:
        return ""
    if isinstance(label, tuple):
        return "".join(str(c) for c in label)
    return str(label)


def central_factor_torus(grid: NodeGrid, p: int, q: int) -> complex:
    return complex((grid.coefficients((0, p)) * grid.coefficients((0, q))).sum())


def central_kernel_sphere(grid: NodeGrid, l1: int, m1: int, l2: int, m2: int, weighted: bool = False) -> float:
    v = grid.coefficients((l1, m1)) * grid.coefficients((l2, m2))
    return float(np.dot(grid.measure, v) if weighted else v.sum())


# --- embedding of the single-index algebra ---------------------------------------

def embedding_check(site: Site, grid: NodeGrid, tol: float = 1e-10) -> Report:
    """The p = 0 torus sector closes and reproduces the single-index relations once
    central terms are divided by the measured factor N."""
    if grid.surface != TORUS:
        raise AssemblyError("the embedding check applies to the torus")
    N = grid.count
    M = site.cfg.modes
    gens = _generators(site)
    modes = [build_torus_mode(site, k, lab, m, 0, grid) for k, lab in gens for m in range(-M, M + 1)]
    rep = Report()
    closure_bad = 0
    res_all, n_all, cres = 0.0, 0, 0.0
    for fam, A, B in _surface_pairs(site, modes):
        mx, my = A.z_mode, B.z_mode
        terms, central = _target_terms(site, (A.kind, A.label), (B.kind, B.label), mx, my)
        parts = []
        for s, kind, label, mode in terms:
            T = build_torus_mode(site, kind, label, mode, 0, grid, target=True)
            closure_bad += T.index[1] != 0
            parts.append((s, T.operator))
        br = bracket(site, A, B)
        diff = br - combine(grid, parts) if parts else br
        res, z, ncols = nodewise_residual(diff)
        res_all = max(res_all, res)
        n_all += ncols
        if ncols:
            # per-node central equals the single-index value; the sum is N times it
            cres = max(cres, abs(complex(z.sum()) / N - central))
    rep.add(Record("embedding p=0 closure", "single-index subalgebra / torus", float(closure_bad), 0.0, n_checked=len(modes) ** 2))
    rep.add(Record("embedding p=0 brackets", "single-index subalgebra / torus", res_all, tol, n_checked=n_all))
    rep.add(Record("embedding central / N", "single-index subalgebra / torus", cres, tol, central_measured=float(N), central_reduced=1.0, n_checked=n_all))
    return rep


def sphere_sector_leaks(lmax: int) -> dict[int, list[tuple]]:
    """For each fixed l, the products Q_{lm1} Q_{lm2} that need some l3 != l."""
    out = {}
    for l in range(lmax + 1):
        leaks = []
        for m1 in range(-l, l + 1):
            for m2 in range(-l, l + 1):
                if abs(m1 + m2) > 2 * l:
                    continue
                for l3, c in expand_product(l, m1, l, m2, tol=1e-12):
                    if l3 != l:
                        leaks.append((m1, m2, l3, c))
        out[l] = leaks
    return out


def sphere_sector_report(lmax: int) -> Report:
    leaks = sphere_sector_leaks(lmax)
    rep = Report()
    tag = "single-index subalgebra / sphere"
    closed_l0 = len(leaks[0]) == 0
    rep.add(Record("sphere l=0 sector closes", tag, 0.0 if closed_l0 else 1.0, 0.0, n_checked=1))
    leaking = [l for l in range(1, lmax + 1) if leaks[l]]
    missing = [l for l in range(1, lmax + 1) if not leaks[l]]
    rep.add(
        Record(
            "sphere constant-l sectors (l>=1) leak",
            tag,
            float(len(missing)),
            0.0,
            n_checked=lmax,
            detail=";".join(f"l={l}:{len(leaks[l])}" for l in leaking),
        )
    )
    return rep
