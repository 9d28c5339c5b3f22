from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kmvertex.algebra import (
    KAPPA,
    AlgebraError,
    E,
    H,
    Lsym,
    SphereTable,
    TorusTable,
    bracket,
    jacobi_combo,
    scan,
    scan_report,
    sphere_symbols,
    sphere_table,
    standard_embedding,
    standard_table,
    torus_symbols,
    torus_table,
)
from kmvertex.roots import parse_algebra


@pytest.fixture(scope="module")
def T():
    return torus_table(parse_algebra("A1"))


@pytest.fixture(scope="module")
def S():
    return sphere_table(parse_algebra("A1"))


def test_virasoro_central_term_is_exact(T):
    out = bracket(T, Lsym(2, 3), Lsym(-2, -3))
    assert out == {Lsym(0, 0): 4, KAPPA: Fraction(1, 2)}
    assert all(isinstance(v, (int, Fraction)) for v in out.values())


def test_central_term_needs_both_indices_to_cancel(T):
    assert KAPPA not in bracket(T, H(0, 1, 1), H(0, -1, 0))
    assert bracket(T, H(0, 1, 1), H(0, -1, -1)) == {KAPPA: 2}


def test_opposite_roots_give_cartan_and_central(T):
    out = bracket(T, E((1,), 1, 2), E((-1,), -1, -2))
    assert out == {H(0, 0, 0): 1, KAPPA: 1}


def test_second_index_never_enters_central_coefficient(T):
    # only the first index multiplies kappa
    for p in range(-3, 4):
        assert bracket(T, H(0, 2, p), H(0, -2, -p))[KAPPA] == 4


def test_standard_table_values():
    std = standard_table(parse_algebra("A2"))
    assert std.bracket(H(0, 1), H(1, -1)) == {KAPPA: -1}
    assert std.bracket(E((1, 0), 0), E((0, 1), 0))[E((1, 1), 0)] in (1, -1)


torus_sym = st.sampled_from(torus_symbols(torus_table(parse_algebra("A2")), 2, 2))


@given(torus_sym, torus_sym)
def test_antisymmetry(x, y):
    t = torus_table(parse_algebra("A2"))
    lhs = t.bracket(x, y)
    rhs = {k: -v for k, v in t.bracket(y, x).items()}
    assert lhs == rhs


@given(torus_sym, torus_sym, torus_sym)
def test_jacobi_identity_exact(x, y, z):
    assert jacobi_combo(torus_table(parse_algebra("A2")), x, y, z) == {}


sphere_sym = st.sampled_from(sphere_symbols(sphere_table(parse_algebra("A1")), 3))


@given(sphere_sym, sphere_sym, sphere_sym)
def test_sphere_jacobi_is_float_small(x, y, z):
    t = sphere_table(parse_algebra("A1"))
    assert max((abs(float(v)) for v in jacobi_combo(t, x, y, z).values()), default=0) < 1e-10


def test_sphere_pairing_sign(S):
    assert bracket(S, H(0, 1, 1), H(0, 1, -1)) == {KAPPA: 2 * -1}
    assert bracket(S, H(0, 2, 0), H(0, 2, 0)) == {}


def test_small_scans_pass(T, S):
    for rep in (scan_report(T, torus_symbols(T, 1, 1), 0.0), scan_report(S, sphere_symbols(S, 2), 1e-8)):
        assert rep.passed


class _UnsignedSphere(SphereTable):
    def pairing(self, i1, i2):
        (l1, m1), (l2, m2) = i1, i2
        return 1 if (l1 == l2 and m1 + m2 == 0) else 0


def test_scan_detects_a_missing_central_sign():
    alg = parse_algebra("A1")
    bad = _UnsignedSphere(alg, sphere_table(alg).cocycle)
    r = scan(bad, sphere_symbols(bad, 2), threshold=1e-8)
    assert r.jacobi > 1 and r.violations
    assert len(r.worst_triple) == 3


class _DoubledVirasoro(TorusTable):
    def _raw(self, x, y):
        out = super()._raw(x, y)
        if x[0] == y[0] == "L" and KAPPA in out and x[2][0] == 2:
            out[KAPPA] *= 2
        return out


def test_scan_detects_a_wrong_central_charge():
    alg = parse_algebra("A1")
    bad = _DoubledVirasoro(alg, torus_table(alg).cocycle)
    rep = scan_report(bad, torus_symbols(bad, 2, 1), 0.0)
    assert not rep["torus Jacobi"].passed
    assert rep["torus Jacobi"].detail


def test_standard_embedding(T):
    rep = standard_embedding(T, M=2, Q=2)
    assert rep.passed


@pytest.mark.parametrize(
    "sym",
    [("X", (), (0, 0)), E((2,), 0, 0), H(1, 0, 0), Lsym(0)],
)
def test_symbol_validation(T, sym):
    with pytest.raises(AlgebraError):
        bracket(T, sym, Lsym(0, 0))


def test_sphere_index_validation(S):
    with pytest.raises(AlgebraError):
        bracket(S, H(0, 1, 2), Lsym(0, 0))


def test_embedding_rejects_sphere(S):
    with pytest.raises(AlgebraError):
        standard_embedding(S)
