import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kmvertex.roots import (
    CocycleTable,
    GaugeError,
    RootSystemError,
    apply_gauge,
    build_algebra,
    check_antisymmetry,
    check_cocycle,
    check_gauge_conditions,
    cocycle_table,
    epsilon,
    exhaustive_gauges,
    export_csv_rows,
    gauge_fix,
    gauged_cocycle,
    greedy_gauge,
    parse_algebra,
)

# standard root counts, written out rather than computed
ROOT_COUNTS = {
    "A1": 2, "A2": 6, "A3": 12, "A4": 20,
    "D4": 24, "D5": 40, "E6": 72, "E7": 126, "E8": 240,
}


@pytest.mark.parametrize("name,count", sorted(ROOT_COUNTS.items()))
def test_root_counts(name, count):
    assert len(parse_algebra(name).roots) == count


@pytest.mark.parametrize("name", sorted(ROOT_COUNTS))
def test_roots_have_norm_two_and_are_closed_under_negation(name):
    alg = parse_algebra(name)
    for a in alg.roots:
        assert alg.inner(a, a) == 2
        assert alg.is_root(tuple(-c for c in a))


@pytest.mark.parametrize("name", ["A3", "D4", "E6", "E8"])
def test_orthonormal_gram_matches_cartan(name):
    alg = parse_algebra(name)
    R = alg.orthonormal_simple_roots
    assert np.allclose(R @ R.T, np.array(alg.cartan_matrix, dtype=float), atol=1e-12)


def test_inverse_cartan_is_inverse(a1):
    alg = parse_algebra("D4")
    C = np.array(alg.cartan_matrix, dtype=float)
    Ci = np.array([[float(x) for x in row] for row in alg.inverse_cartan])
    assert np.allclose(C @ Ci, np.eye(4))


@pytest.mark.parametrize("bad", ["B2", "A0", "E9", "D2", "Q", ""])
def test_parse_rejects_unknown_algebras(bad):
    with pytest.raises(RootSystemError):
        parse_algebra(bad)


def test_build_algebra_rejects_nonpositive_rank():
    with pytest.raises(RootSystemError):
        build_algebra("A", 0)


def _brute_force_cocycle(table: CocycleTable):
    pts = [tuple(int(c) for c in p) for p in table.points]
    inside = set(pts)
    add = lambda x, y: tuple(a + b for a, b in zip(x, y))
    S = table.sign_matrix
    sg = lambda x, y: int(S[table.index(x), table.index(y)])
    checked = bad = 0
    for a, b, c in itertools.product(pts, repeat=3):
        if add(a, b) in inside and add(b, c) in inside and add(add(a, b), c) in inside:
            checked += 1
            lhs = sg(a, b) * sg(add(a, b), c)
            rhs = sg(b, c) * sg(a, add(b, c))
            bad += lhs != rhs
    return checked, bad


@pytest.mark.parametrize("name,bound", [("A1", 3), ("A2", 2)])
def test_cocycle_kernel_matches_brute_force(name, bound):
    base = cocycle_table(parse_algebra(name), bound)
    for table in (base, gauge_fix(base)):
        n, bad, first = check_cocycle(table)
        assert (n, bad) == _brute_force_cocycle(table)
        assert bad == 0 and first is None


@pytest.mark.parametrize("gauged", [False, True])
def test_sign_matrix_agrees_with_sign(gauged):
    t = cocycle_table(parse_algebra("A2"), 2)
    t = gauge_fix(t) if gauged else t
    for a, b, s in t.rows():
        assert t.sign(a, b) == s


def test_cocycle_check_reports_offender_after_corruption():
    t = gauged_cocycle(parse_algebra("A2"), 2)
    S = t.sign_matrix.copy()
    i, j = t.index((1, 0)), t.index((0, 1))
    S[i, j] *= -1
    eta = np.ones(t.size, dtype=np.int8)
    corrupt = CocycleTable(t.algebra, t.bound, t.asymmetry, eta)
    # swap in the corrupted signs through the cached property
    object.__setattr__(corrupt, "sign_matrix", S)
    n, bad, first = check_cocycle(corrupt)
    assert bad > 0
    assert first is not None and len(first) == 3
    assert bad == _brute_force_cocycle(corrupt)[1]


lattice = st.lists(st.integers(-3, 3), min_size=2, max_size=2).map(tuple)


@given(lattice, lattice, lattice)
def test_base_sign_is_bimultiplicative(x, y, w):
    t = cocycle_table(parse_algebra("A2"), 6)
    s = lambda a, b: epsilon(t, a, b)
    xy = tuple(a + b for a, b in zip(x, y))
    assert s(xy, w) == s(x, w) * s(y, w)
    assert s(w, xy) == s(w, x) * s(w, y)


@given(lattice, lattice)
def test_base_sign_commutation(x, y):
    alg = parse_algebra("A2")
    t = cocycle_table(alg, 3)
    assert t.sign(x, y) * t.sign(y, x) == (-1) ** (alg.inner(x, y) % 2)


@pytest.mark.parametrize("name", ["A1", "A2", "A3"])
def test_gauge_fix_satisfies_normalisations(name):
    g = gauge_fix(cocycle_table(parse_algebra(name), 2))
    assert not any(check_gauge_conditions(g).values())
    assert check_antisymmetry(g) == 0
    assert check_cocycle(g)[1] == 0


def test_greedy_gauge_is_one_of_the_exhaustive_solutions():
    t = cocycle_table(parse_algebra("A1"), 3)
    sols = exhaustive_gauges(t)
    assert sols
    greedy = greedy_gauge(t)
    assert any(np.array_equal(greedy, s) for s in sols)


def test_exhaustive_gauge_refuses_large_windows():
    with pytest.raises(RootSystemError):
        exhaustive_gauges(cocycle_table(parse_algebra("A2"), 3))


def test_unknown_gauge_method():
    with pytest.raises(ValueError):
        gauge_fix(cocycle_table(parse_algebra("A1"), 2), "magic")


@given(lattice, lattice)
def test_gauged_signs_do_not_depend_on_window_bound(x, y):
    alg = parse_algebra("A2")
    small, big = gauged_cocycle(alg, 3), gauged_cocycle(alg, 5)
    if small.contains(x) and small.contains(y) and small.contains(tuple(a + b for a, b in zip(x, y))):
        assert small.sign(x, y) == big.sign(x, y)


def test_sign_outside_window_raises():
    t = gauged_cocycle(parse_algebra("A1"), 2)
    with pytest.raises(RootSystemError):
        t.sign((2,), (2,))


def test_apply_gauge_rejects_bad_eta():
    t = cocycle_table(parse_algebra("A1"), 2)
    with pytest.raises(RootSystemError):
        apply_gauge(t, np.ones(3, dtype=np.int8))


def test_csv_export_shape():
    t = gauged_cocycle(parse_algebra("A1"), 1)
    rows = export_csv_rows(t)
    assert rows[0] == "a0,b0,sign"
    assert all(r.split(",")[-1] in ("1", "-1") for r in rows[1:])


def test_gauge_error_type():
    assert issubclass(GaugeError, RuntimeError)
