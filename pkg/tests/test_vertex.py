import math

import numpy as np
import pytest

from kmvertex.fock import basis_vector
from kmvertex.roots import cocycle_table, exhaustive_gauges, apply_gauge, gauged_cocycle, parse_algebra
from kmvertex.vertex import (
    Site,
    SiteConfig,
    VertexError,
    heisenberg_mode,
    selection_rule_violations,
    site_config,
    vacuum_expectation,
    verify_site_algebra,
    vertex_mode,
    virasoro_mode,
)


def _all_pass(rep):
    assert rep.records and rep.passed, [(r.relation, r.residual, r.detail) for r in rep.failures()]


def test_vertex_on_vacuum_matches_hand_expansion(a1_site):
    site = a1_site
    b = site.basis
    alpha = (1,)
    vac = basis_vector(b, site.vacuum_index)
    sign = site.cfg.cocycle.sign(alpha, (0,))
    # exp(sqrt2 sum_k a_{-k} z^k / k) |alpha>, coefficients of z^{1}, z^{2}, z^{3}
    occ = lambda *o: b.index(alpha, o + (0,) * (b.level - len(o)))
    s2 = math.sqrt(2)
    expected = {
        -1: {occ(): 1.0},
        -2: {occ(1): s2},
        # (sqrt2 a_{-1})^2/2 |0> = sqrt2 |2 quanta>, (sqrt2/2) a_{-2} |0> = |one a_{-2}>
        -3: {occ(2): s2, occ(0, 1): 1.0},
    }
    for m, comps in expected.items():
        out = site.vertex(alpha, m).matrix.matrix @ vac
        want = np.zeros(b.dim)
        for k, v in comps.items():
            want[k] = sign * v
        assert np.allclose(out, want, atol=1e-13), m
    # modes m >= 0 annihilate the vacuum
    for m in range(0, 3):
        assert np.allclose(site.vertex(alpha, m).matrix.matrix @ vac, 0)


def test_L0_is_level_plus_half_momentum_squared(a1_site):
    L0 = a1_site.virasoro(0)
    b = a1_site.basis
    p2 = (b.momentum_vectors ** 2).sum(axis=1)
    want = b.levels + 0.5 * np.repeat(p2, b.osc_dim)
    D = L0.toarray()
    assert np.allclose(np.diag(D), want)
    assert np.allclose(D - np.diag(np.diag(D)), 0)


def test_selection_rule(a1_site):
    for a in a1_site.algebra.roots:
        for m in range(-4, 5):
            assert selection_rule_violations(a1_site, a1_site.vertex(a, m)) == 0


def test_site_algebra_a1(a1_small_site):
    _all_pass(verify_site_algebra(a1_small_site.cfg, site=a1_small_site))


def test_site_algebra_a2():
    cfg = site_config(parse_algebra("A2"), level=2, window=1, modes=1)
    rep = verify_site_algebra(cfg)
    _all_pass(rep)
    assert rep["site [E,E] root sum"].n_checked > 0


def test_site_algebra_with_weight_offset():
    cfg = site_config(parse_algebra("A1"), level=3, window=1, modes=1, offset=(1,))
    rep = verify_site_algebra(cfg)
    _all_pass(rep)
    # |lambda> is not the vacuum, so the vacuum values are not reported
    assert not any("<0|" in r.relation for r in rep.records)


def test_every_admissible_gauge_gives_the_same_algebra():
    alg = parse_algebra("A1")
    base = cocycle_table(alg, 3)
    gauges = exhaustive_gauges(base)
    assert len(gauges) > 1
    for eta in gauges:
        cfg = SiteConfig(alg, apply_gauge(base, eta), level=3, window=2, modes=1)
        _all_pass(verify_site_algebra(cfg))


def test_vacuum_values(a1_site):
    a = (1,)
    site = a1_site
    E = site.vertex(a, 1).matrix.commutator(site.vertex((-1,), -1).matrix)
    assert vacuum_expectation(E, site) == pytest.approx(1.0, abs=1e-12)
    V = site.virasoro(2).commutator(site.virasoro(-2))
    assert vacuum_expectation(V, site) == pytest.approx(0.5, abs=1e-12)


def test_mode_helpers_respect_range(a1_small_site):
    site = a1_small_site
    assert heisenberg_mode(site, 0, 2).shape == (site.basis.dim,) * 2
    with pytest.raises(VertexError):
        vertex_mode(site, (1,), 3)
    with pytest.raises(VertexError):
        virasoro_mode(site, -3)


def test_config_validation():
    alg = parse_algebra("A1")
    with pytest.raises(VertexError):
        site_config(alg, level=1, modes=2)
    with pytest.raises(VertexError):
        SiteConfig(alg, gauged_cocycle(alg, 1), level=2, window=2, modes=1)
    with pytest.raises(VertexError):
        SiteConfig(alg, cocycle_table(alg, 3), level=2, window=2, modes=1)
    site = Site(site_config(alg, level=2, window=1, modes=1))
    with pytest.raises(VertexError):
        site.vertex((2,), 0)
