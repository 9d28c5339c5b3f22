"""One report builder per CLI subcommand."""
from __future__ import annotations

import dataclasses
import math
from fractions import Fraction

import mpmath

from .algebra import scan_report, sphere_symbols, sphere_table, standard_embedding, torus_symbols, torus_table
from .assembly import embedding_check, sphere_grid, sphere_sector_report, torus_grid, verify_surface_algebra
from .config import RunConfig
from .regularization import (
    delta_eps_torus,
    delta_eps_torus_series,
    hurwitz_zeta,
    regularized_delta0_sphere,
    regularized_delta0_torus,
    riemann_zeta,
)
from .report import Record, Report
from .roots import (
    check_antisymmetry,
    check_cocycle,
    check_gauge_conditions,
    cocycle_table,
    gauge_fix,
    parse_algebra,
)
from .sphere import TripleCoefficientTable
from .vertex import Site, site_config, verify_site_algebra

COCYCLE_TAG = "lattice cocycle"
REG_TAG = "delta regularisation"


def cocycle_report(cfg: RunConfig) -> Report:
    alg = parse_algebra(cfg.algebra)
    base = cocycle_table(alg, cfg.window)
    rep = Report()
    for name, table in (("", base), ("gauged ", gauge_fix(base))):
        n, bad, first = check_cocycle(table)
        rep.add(Record(f"{alg.name} {name}cocycle identity", COCYCLE_TAG, float(bad), 0.0,
                       n_checked=n, detail="" if first is None else str(first)))
        pairs = int((table.sign_matrix != 0).sum())
        rep.add(Record(f"{alg.name} {name}commutation sign", COCYCLE_TAG,
                       float(check_antisymmetry(table)), 0.0, n_checked=pairs))
    for cond, bad in check_gauge_conditions(gauge_fix(base)).items():
        rep.add(Record(f"{alg.name} gauge {cond}", COCYCLE_TAG, float(bad), 0.0, n_checked=base.size))
    return rep


def _site(cfg: RunConfig) -> Site:
    alg = parse_algebra(cfg.algebra)
    return Site(site_config(alg, level=cfg.level, window=cfg.momentum_window, modes=cfg.modes))


def site_report(cfg: RunConfig) -> Report:
    site = _site(cfg)
    return verify_site_algebra(site.cfg, tol=cfg.tol, site=site)


def torus_report(cfg: RunConfig, sites: int | None = None) -> Report:
    site = _site(cfg)
    grid = torus_grid(sites or cfg.sites)
    return verify_surface_algebra(site, grid, tol=cfg.tol, central_tol=cfg.tol)


def sphere_report(cfg: RunConfig) -> Report:
    site = _site(cfg)
    grid = sphere_grid(cfg.grid_size)
    return verify_surface_algebra(site, grid, lmax=cfg.lmax, tol=cfg.sphere_tol, central_tol=cfg.tol)


def regularization_rows(cfg: RunConfig) -> list[dict]:
    """eps, delta_eps(0), coth(eps) and the zeta-assigned value."""
    z = float(regularized_delta0_torus())
    return [
        {"eps": e, "delta_eps(0)": float(delta_eps_torus(0.0, e)), "coth(eps)": 1 / math.tanh(e), "zeta_assigned": z}
        for e in cfg.eps_values
    ]


def regularization_report(cfg: RunConfig) -> Report:
    rep = Report()
    tol = 1e-12
    for label, value, exact in (
        ("zeta_H(0,1/2) = 0", hurwitz_zeta(0, Fraction(1, 2)), 0.0),
        ("zeta(0) = -1/2", riemann_zeta(0), -0.5),
        ("zeta(-1) = -1/12", riemann_zeta(-1), -1 / 12),
    ):
        rep.add(Record(label, REG_TAG, abs(float(value) - exact), tol, n_checked=1))
    # Bernoulli route against the generic analytic continuation
    worst, n = 0.0, 0
    for s in range(0, -6, -1):
        for a in (Fraction(1, 2), Fraction(1, 3), Fraction(5, 2), Fraction(7, 4)):
            ref = float(mpmath.zeta(s, float(a)))
            worst = max(worst, abs(float(hurwitz_zeta(s, a)) - ref))
            n += 1
    rep.add(Record("zeta_H at s <= 0: Bernoulli vs analytic continuation", REG_TAG, worst, tol, n_checked=n))
    for row in regularization_rows(cfg):
        e = row["eps"]
        rep.add(Record(f"delta_eps(0) = coth(eps) at eps={e:g}", REG_TAG,
                       abs(row["delta_eps(0)"] - row["coth(eps)"]), cfg.tol,
                       central_measured=row["delta_eps(0)"], central_reduced=row["zeta_assigned"],
                       n_checked=1, detail=f"coth={row['coth(eps)']:.12g}"))
    worst, n = 0.0, 0
    for e in cfg.eps_values:
        if e < 0.05:
            continue  # series cutoff grows like 1/eps
        for k in range(16):
            th = 2 * math.pi * k / 16
            worst = max(worst, abs(delta_eps_torus(th, e) - delta_eps_torus_series(th, e)) / max(1.0, abs(delta_eps_torus(th, e))))
            n += 1
    rep.add(Record("delta_eps closed form = mode series", REG_TAG, worst, 1e-10, n_checked=n))
    rep.add(Record("torus delta_reg(0) = 1", REG_TAG, abs(float(regularized_delta0_torus()) - 1), 0.0,
                   central_reduced=float(regularized_delta0_torus()), n_checked=1))
    worst = max(abs(float(regularized_delta0_sphere(m)) - 1) for m in range(cfg.lmax + 1))
    rep.add(Record("sphere delta_reg(0) = 1", REG_TAG, worst, 0.0, central_reduced=1.0 if worst == 0 else None,
                   n_checked=cfg.lmax + 1))
    return rep


def jacobi_report(cfg: RunConfig) -> Report:
    alg = parse_algebra(cfg.algebra)
    if cfg.surface == "torus":
        t = torus_table(alg)
        return scan_report(t, torus_symbols(t, cfg.modes, cfg.modes), 0.0)
    t = sphere_table(alg)
    return scan_report(t, sphere_symbols(t, cfg.lmax), cfg.sphere_tol)


def embedding_report(cfg: RunConfig) -> Report:
    alg = parse_algebra(cfg.algebra)
    rep = standard_embedding(torus_table(alg), M=cfg.modes, Q=cfg.modes)
    rep.extend(embedding_check(_site(cfg), torus_grid(cfg.sites), tol=cfg.tol))
    rep.extend(sphere_sector_report(cfg.lmax))
    return rep


def coefficient_rows(lmax: int) -> list[tuple]:
    return list(TripleCoefficientTable(lmax).rows())


def full_report(cfg: RunConfig) -> Report:
    rep = Report()
    for fn in (cocycle_report, site_report, torus_report, sphere_report, regularization_report, embedding_report):
        rep.extend(fn(cfg))
    for surface in ("torus", "sphere"):
        rep.extend(jacobi_report(_with(cfg, surface=surface)))
    return rep


def _with(cfg: RunConfig, **kw) -> RunConfig:
    return dataclasses.replace(cfg, **kw)
