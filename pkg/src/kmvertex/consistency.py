"""Abstract structure constants against measured node-diagonal brackets.

An abstract symbol is realised on a site and grid (H^{alpha_j} as alpha_j . H),
the measured bracket is split node by node into a non-central part and z_k times
the identity, and the central reduction sum_k mu_k z_k delta_reg(0) is compared
with the kappa coefficient of the table.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .algebra import KAPPA, BracketTable, Symbol
from .assembly import (
    SPHERE,
    TORUS,
    NodeDiagonalOperator,
    NodeGrid,
    bracket_operators,
    build_sphere_mode,
    build_torus_mode,
    combine,
    nodewise_residual,
)
from .regularization import regularized_delta0_sphere, regularized_delta0_torus
from .report import Record, Report
from .vertex import Site


def realise(site: Site, grid: NodeGrid, sym: Symbol, lmax: int | None = None, target: bool = False) -> NodeDiagonalOperator:
    kind, label, idx = sym
    if kind == "K":
        raise ValueError("the central element has no node-diagonal realisation")
    alg = site.algebra

    def one(k, lab):
        if grid.surface == TORUS:
            return build_torus_mode(site, k, lab, idx[0], idx[1], grid, target).operator
        return build_sphere_mode(site, k, lab, idx[0], idx[1], grid, lmax, target).operator

    if kind == "H":
        unit = [0] * alg.rank
        unit[label[0]] = 1
        a = alg.orthonormal(unit)
        return combine(grid, [(float(a[i]), one("H", i)) for i in range(alg.rank) if abs(a[i]) > 1e-15])
    return one(kind, label if kind == "E" else None)


def realise_combo(site: Site, grid: NodeGrid, combo: dict, lmax: int | None = None) -> NodeDiagonalOperator:
    parts = [(float(c), realise(site, grid, s, lmax, target=True)) for s, c in combo.items() if s[0] != "K"]
    return combine(grid, parts)


def _torus_index(grid: NodeGrid, sym: Symbol) -> Symbol:
    kind, label, (m, p) = sym
    return (kind, label, (m, p % grid.count))


def compare(site: Site, grid: NodeGrid, table: BracketTable, x: Symbol, y: Symbol, lmax: int | None = None):
    """(non-central residual, |reduced central - kappa coefficient|, exact columns)."""
    expected = table.bracket(x, y)
    if grid.surface == TORUS:
        ptot = x[2][1] + y[2][1]
        if ptot and ptot % grid.count == 0:
            # the grid would produce a central term the integer table does not have
            raise ValueError(f"p + q = {ptot} aliases to 0 on {grid.count} sites; use more sites")
        # second index is only defined mod N on the grid
        folded: dict = {}
        for s, c in expected.items():
            key = s if s[0] == "K" else _torus_index(grid, s)
            folded[key] = folded.get(key, 0) + c
        expected = folded
        delta0 = float(regularized_delta0_torus())
    else:
        delta0 = float(regularized_delta0_sphere(x[2][1]))
    measured = bracket_operators(site, realise(site, grid, x, lmax), realise(site, grid, y, lmax))
    target = realise_combo(site, grid, expected, lmax)
    res, z, ncols = nodewise_residual(measured - target if target.terms else measured)
    reduced = complex(np.dot(grid.measure, z)) * delta0
    return res, abs(reduced - float(expected.get(KAPPA, 0))), ncols


def consistency_report(site: Site, grid: NodeGrid, table: BracketTable, pairs: Iterable[tuple[Symbol, Symbol]],
                       lmax: int | None = None, tol: float = 1e-10) -> Report:
    worst, cworst, n, nc = 0.0, 0.0, 0, 0
    for x, y in pairs:
        res, cres, ncols = compare(site, grid, table, x, y, lmax)
        if ncols:
            worst, cworst = max(worst, res), max(cworst, cres)
            n += ncols
            nc += 1
    tag = f"structure constants vs realisation / {grid.surface}"
    rep = Report()
    rep.add(Record(f"{grid.surface} table = measured brackets", tag, worst, tol, n_checked=n))
    rep.add(Record(f"{grid.surface} table kappa = reduced central", tag, cworst, tol, n_checked=nc))
    return rep
