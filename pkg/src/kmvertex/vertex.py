"""Level-one vertex-operator realisation on a single node.

The vertex field is expanded as U^alpha(z) = sum_m E_{alpha,m} z^{-m}, with
U^alpha = z^{alpha.alpha/2} exp(sum_k alpha.a_{-k} z^k / k) exp(-sum_k alpha.a_k z^{-k} / k)
          e^{i alpha.q} z^{alpha.p} c_alpha.
On an input state of momentum lambda and oscillator level l, the coefficient
of z^{-m} therefore moves the level by n = -m - alpha.alpha/2 - alpha.lambda.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .fock import (
    FockBasis,
    OperatorMatrix,
    apply_momentum,
    apply_oscillator,
    enumerate_basis,
    identity,
    zero,
)
from .report import Record, Report
from .roots import CocycleTable, SimplyLacedAlgebra, Vec, box_window, gauged_cocycle


class VertexError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SiteConfig:
    algebra: SimplyLacedAlgebra
    cocycle: CocycleTable = field(repr=False)
    level: int = 4
    window: int = 2
    modes: int = 2
    offset: Vec | None = None

    def __post_init__(self):
        if self.modes > self.level:
            raise VertexError(f"mode range {self.modes} exceeds the level cutoff {self.level}")
        if self.level < 0 or self.window < 0 or self.modes < 0:
            raise VertexError("cutoffs must be non-negative")
        reach = self.window + max(max(abs(c) for c in a) for a in self.algebra.roots)
        if self.cocycle.bound < reach:
            raise VertexError(
                f"cocycle window bound {self.cocycle.bound} is smaller than the reach {reach}"
            )
        if not self.cocycle.gauged:
            raise VertexError("site construction needs a gauge-fixed cocycle")


def site_config(
    algebra: SimplyLacedAlgebra,
    level: int = 4,
    window: int = 2,
    modes: int = 2,
    offset: Sequence[int] | None = None,
) -> SiteConfig:
    reach = window + max(max(abs(c) for c in a) for a in algebra.roots)
    off = None if offset is None else tuple(int(c) for c in offset)
    return SiteConfig(algebra, gauged_cocycle(algebra, reach), level, window, modes, off)


def _schur_components(gens: list[np.ndarray], dmax: int, dim: int) -> list[np.ndarray]:
    """Level-graded pieces S_d of exp(sum_k g_k x^k / k): d S_d = sum_k g_k S_{d-k}."""
    S = [np.eye(dim)]
    for d in range(1, dmax + 1):
        acc = np.zeros((dim, dim))
        for k in range(1, d + 1):
            if k <= len(gens):
                acc += gens[k - 1] @ S[d - k]
        S.append(acc / d)
    return S


@dataclass(frozen=True)
class VertexMode:
    root: Vec
    mode: int
    matrix: OperatorMatrix = field(repr=False)


class Site:
    """Mode matrices for one node, built lazily and cached."""

    def __init__(self, cfg: SiteConfig):
        self.cfg = cfg
        alg = cfg.algebra
        pts = box_window(alg.rank, cfg.window)
        self.offset = cfg.offset or (0,) * alg.rank
        vecs = [
            alg.weight_orthonormal(tuple(o + w for o, w in zip(self.offset, alg.root_to_weight(p))))
            for p in pts
        ]
        self.basis: FockBasis = enumerate_basis(alg.rank, cfg.level, pts, np.array(vecs))
        self._cache: dict = {}

    # -- bookkeeping
    @property
    def algebra(self) -> SimplyLacedAlgebra:
        return self.cfg.algebra

    def _mode_ok(self, m: int, limit: int | None) -> None:
        lim = 2 * self.cfg.modes if limit is None else limit
        if abs(m) > lim:
            raise VertexError(f"mode {m} outside |m| <= {lim}")

    def alpha_lambda(self, alpha: Sequence[int], beta: Sequence[int]) -> int:
        """alpha . (offset + beta) for a root alpha and root-lattice beta."""
        return self.algebra.root_weight_inner(alpha, self.offset) + self.algebra.inner(alpha, beta)

    @cached_property
    def vacuum_index(self) -> int:
        return self.basis.index((0,) * self.algebra.rank)

    # -- generators
    def heisenberg(self, i: int, m: int, limit: int | None = None) -> OperatorMatrix:
        self._mode_ok(m, limit)
        key = ("H", i, m)
        if key not in self._cache:
            b = self.basis
            if m == 0:
                op = apply_momentum(b, i)
            elif abs(m) <= b.level:
                op = apply_oscillator(b, i, m)
            else:
                # a_m kills the whole truncated space; a_{-m} leaves it entirely
                op = zero(b)
                if m < 0:
                    op = OperatorMatrix(b, op.matrix, np.zeros(b.dim, bool))
            self._cache[key] = op
        return self._cache[key]

    def root_heisenberg(self, alpha: Sequence[int], m: int, limit: int | None = None) -> OperatorMatrix:
        """alpha . H_m."""
        a = self.algebra.orthonormal(alpha)
        out = zero(self.basis)
        for i, c in enumerate(a):
            if abs(c) > 1e-15:
                out = out + float(c) * self.heisenberg(i, m, limit)
        return out

    def vertex(self, alpha: Sequence[int], m: int, limit: int | None = None) -> VertexMode:
        alpha = tuple(int(c) for c in alpha)
        if not self.algebra.is_root(alpha):
            raise VertexError(f"{alpha} is not a root of {self.algebra.name}")
        self._mode_ok(m, limit)
        key = ("E", alpha, m)
        if key not in self._cache:
            self._cache[key] = VertexMode(alpha, m, self._build_vertex(alpha, m))
        return self._cache[key]

    def _graded(self, alpha: Vec):
        key = ("S", alpha)
        if key not in self._cache:
            b = self.basis
            L = b.level
            a = self.algebra.orthonormal(alpha)
            dim = b.osc_dim
            cre, ann = [], []
            for k in range(1, L + 1):
                c = np.zeros((dim, dim))
                d = np.zeros((dim, dim))
                for i, ai in enumerate(a):
                    if abs(ai) > 1e-15:
                        c += ai * b.osc_matrix(i, -k).toarray()
                        d -= ai * b.osc_matrix(i, k).toarray()
                cre.append(c)
                ann.append(d)
            self._cache[key] = (_schur_components(cre, L, dim), _schur_components(ann, L, dim))
        return self._cache[key]

    def _build_vertex(self, alpha: Vec, m: int) -> OperatorMatrix:
        b = self.basis
        L = b.level
        Splus, Sminus = self._graded(alpha)
        nm, do = len(b.momenta), b.osc_dim
        half_norm = self.algebra.inner(alpha, alpha) // 2
        blocks = []
        exact = np.ones(b.dim, bool)
        for j, beta in enumerate(b.momenta):
            n = -m - half_norm - self.alpha_lambda(alpha, beta)
            out_lv = b.osc_levels + n
            target = b.momentum_index(tuple(x + y for x, y in zip(beta, alpha)))
            col = slice(j * do, (j + 1) * do)
            # zero by grading when the output level would be negative
            ok = (out_lv < 0) | ((out_lv <= L) & (target is not None))
            exact[col] = ok
            if target is None:
                continue
            block = np.zeros((do, do))
            for dm in range(max(0, -n), L + 1):
                dp = dm + n
                if dp > L:
                    break
                block += Splus[dp] @ Sminus[dm]
            sign = self.cfg.cocycle.sign(alpha, beta)
            blocks.append((target, j, sign * block))
        mat = sp.lil_array((b.dim, b.dim))
        for t, j, block in blocks:
            mat[t * do:(t + 1) * do, j * do:(j + 1) * do] = block
        csr = sp.csr_array(mat)
        csr.eliminate_zeros()
        return OperatorMatrix(b, csr, exact)

    def virasoro(self, m: int, limit: int | None = None) -> OperatorMatrix:
        """L_m = sum_i [p^i a^i_m + 1/2 sum_n :a^i_{m-n} a^i_n:] (+ p^2/2 at m = 0)."""
        self._mode_ok(m, limit)
        key = ("L", m)
        if key in self._cache:
            return self._cache[key]
        b = self.basis
        L = b.level
        out = zero(b)
        for i in range(b.rank):
            p = apply_momentum(b, i)
            if m == 0:
                out = out + 0.5 * (p @ p)
            elif abs(m) <= L:
                out = out + p @ apply_oscillator(b, i, m)
            for n in range(-L, L + 1):
                k = m - n
                if n == 0 or k == 0 or abs(k) > L:
                    continue
                # creators (negative index) to the left
                left, right = min(k, n), max(k, n)
                out = out + 0.5 * (apply_oscillator(b, i, left) @ apply_oscillator(b, i, right))
        # columns whose image lies above the cutoff
        out = OperatorMatrix(b, out.matrix, out.exact & (b.levels - m <= L))
        self._cache[key] = out
        return out

    def identity(self) -> OperatorMatrix:
        return identity(self.basis)


def heisenberg_mode(site: Site, i: int, m: int) -> OperatorMatrix:
    return site.heisenberg(i, m, site.cfg.modes)


def vertex_mode(site: Site, alpha: Sequence[int], m: int) -> VertexMode:
    return site.vertex(alpha, m, site.cfg.modes)


def virasoro_mode(site: Site, m: int) -> OperatorMatrix:
    return site.virasoro(m, site.cfg.modes)


def selection_rule_violations(site: Site, mode: VertexMode) -> int:
    """Nonzero entries breaking -m = alpha.alpha/2 + alpha.lambda + l_out - l_in."""
    b = site.basis
    M = mode.matrix.matrix.tocoo()
    bad = 0
    half = site.algebra.inner(mode.root, mode.root) // 2
    for r, c, v in zip(M.row, M.col, M.data):
        if v == 0:
            continue
        beta_in = b.momenta[b.momentum_of[c]]
        beta_out = b.momenta[b.momentum_of[r]]
        if tuple(x + y for x, y in zip(beta_in, mode.root)) != beta_out:
            bad += 1
            continue
        lam = site.alpha_lambda(mode.root, beta_in)
        if -mode.mode != half + lam + b.levels[r] - b.levels[c]:
            bad += 1
    return bad


# --- site algebra verification --------------------------------------------------

def _cmp(bracket: OperatorMatrix, target: OperatorMatrix, central: float, site: Site):
    if central:
        target = target + central * site.identity()
    return bracket.column_residual(target)


class _Acc:
    def __init__(self):
        self.res = 0.0
        self.n = 0
        self.worst = ""

    def add(self, res: float, n: int, label: str) -> None:
        if n and res >= self.res:
            if res > self.res or not self.worst:
                self.worst = label
            self.res = res
        self.n += n


def vacuum_expectation(op: OperatorMatrix, site: Site) -> float:
    v = site.vacuum_index
    if not op.exact[v]:
        raise VertexError("vacuum column is not exactly represented")
    return float(np.real(op.element(v, v)))


def verify_site_algebra(cfg: SiteConfig, tol: float = 1e-10, site: Site | None = None) -> Report:
    """All standard relations with a single mode index, on exactly represented columns."""
    site = site or Site(cfg)
    alg = cfg.algebra
    r = alg.rank
    M = cfg.modes
    ms = range(-M, M + 1)
    roots = alg.roots
    rep = Report()
    tag_km = "current algebra, single index"
    tag_vir = "Virasoro, single index"

    acc = _Acc()
    for i in range(r):
        for j in range(r):
            for m in ms:
                for n in ms:
                    B = site.heisenberg(i, m).commutator(site.heisenberg(j, n))
                    c = m if (i == j and m + n == 0) else 0
                    acc.add(*_cmp(B, zero(site.basis), c, site), f"H{i}_{m} H{j}_{n}")
    rep.add(Record("site [H,H]", tag_km, acc.res, tol, n_checked=acc.n, detail=acc.worst))

    acc = _Acc()
    for i in range(r):
        for a in roots:
            ai = float(alg.orthonormal(a)[i])
            for m in ms:
                for n in ms:
                    B = site.heisenberg(i, m).commutator(site.vertex(a, n).matrix)
                    T = ai * site.vertex(a, m + n).matrix
                    acc.add(*_cmp(B, T, 0, site), f"H{i}_{m} E{a}_{n}")
    rep.add(Record("site [H,E]", tag_km, acc.res, tol, n_checked=acc.n, detail=acc.worst))

    acc_root, acc_neg, acc_zero = _Acc(), _Acc(), _Acc()
    for a in roots:
        for b_ in roots:
            s = tuple(x + y for x, y in zip(a, b_))
            for m in ms:
                for n in ms:
                    B = site.vertex(a, m).matrix.commutator(site.vertex(b_, n).matrix)
                    label = f"E{a}_{m} E{b_}_{n}"
                    if alg.is_root(s):
                        T = cfg.cocycle.sign(a, b_) * site.vertex(s, m + n).matrix
                        acc_root.add(*_cmp(B, T, 0, site), label)
                    elif not any(s):
                        T = site.root_heisenberg(a, m + n)
                        acc_neg.add(*_cmp(B, T, m if m + n == 0 else 0, site), label)
                    else:
                        acc_zero.add(*_cmp(B, zero(site.basis), 0, site), label)
    if r > 1 or acc_root.n:
        rep.add(Record("site [E,E] root sum", tag_km, acc_root.res, tol, n_checked=acc_root.n, detail=acc_root.worst))
    rep.add(Record("site [E,E] opposite roots", tag_km, acc_neg.res, tol, n_checked=acc_neg.n, detail=acc_neg.worst))
    rep.add(Record("site [E,E] vanishing", tag_km, acc_zero.res, tol, n_checked=acc_zero.n, detail=acc_zero.worst))

    acc = _Acc()
    for m in ms:
        for n in ms:
            B = site.virasoro(m).commutator(site.virasoro(n))
            c = Fraction(r, 12) * m * (m * m - 1) if m + n == 0 else 0
            acc.add(*_cmp(B, (m - n) * site.virasoro(m + n), float(c), site), f"L{m} L{n}")
    rep.add(Record("site [L,L]", tag_vir, acc.res, tol, n_checked=acc.n, detail=acc.worst))

    acc = _Acc()
    for m in ms:
        for n in ms:
            for i in range(r):
                B = site.virasoro(m).commutator(site.heisenberg(i, n))
                acc.add(*_cmp(B, -n * site.heisenberg(i, m + n), 0, site), f"L{m} H{i}_{n}")
    rep.add(Record("site [L,H]", tag_vir, acc.res, tol, n_checked=acc.n, detail=acc.worst))

    acc = _Acc()
    for m in ms:
        for n in ms:
            for a in roots:
                B = site.virasoro(m).commutator(site.vertex(a, n).matrix)
                acc.add(*_cmp(B, -n * site.vertex(a, m + n).matrix, 0, site), f"L{m} E{a}_{n}")
    rep.add(Record("site [L,E]", tag_vir, acc.res, tol, n_checked=acc.n, detail=acc.worst))

    if any(site.offset):
        # the zero-momentum state of a shifted module is not the vacuum
        return rep
    a = roots[-1]
    na = tuple(-c for c in a)
    k_val = vacuum_expectation(site.vertex(a, 1).matrix.commutator(site.vertex(na, -1).matrix), site)
    rep.add(Record("site <0|[E_a,1, E_-a,-1]|0> = 1", tag_km, abs(k_val - 1), tol, central_measured=k_val, n_checked=1))
    c_val = vacuum_expectation(site.virasoro(2).commutator(site.virasoro(-2)), site)
    rep.add(Record("site <0|[L_2, L_-2]|0> = r/2", tag_vir, abs(c_val - r / 2), tol, central_measured=c_val, n_checked=1))
    return rep
