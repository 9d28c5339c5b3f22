import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from kmvertex.regularization import (
    RegularizationError,
    SphereKernel,
    TorusKernel,
    bernoulli_numbers,
    coincident_mode_weight,
    coth_laurent_gap,
    delta_eps_torus,
    delta_eps_torus_series,
    hurwitz_zeta,
    regularized_delta0_sphere,
    regularized_delta0_torus,
    riemann_zeta,
    torus_zero_mode,
)


def test_bernoulli_numbers():
    assert bernoulli_numbers(6) == (
        Fraction(1), Fraction(-1, 2), Fraction(1, 6), Fraction(0), Fraction(-1, 30), Fraction(0), Fraction(1, 42)
    )


def test_anchor_zeta_values():
    assert hurwitz_zeta(0, Fraction(1, 2)) == 0
    assert riemann_zeta(0) == Fraction(-1, 2)
    assert riemann_zeta(-1) == Fraction(-1, 12)
    assert hurwitz_zeta(-1, Fraction(1, 2)) == Fraction(1, 24)


@given(st.integers(0, 8), st.fractions(Fraction(1, 10), Fraction(7)))
def test_bernoulli_route_matches_mpmath(n, a):
    assert float(hurwitz_zeta(-n, a)) == pytest.approx(float(mpmath.zeta(-n, float(a))), rel=1e-12, abs=1e-12)


@given(st.fractions(Fraction(1, 10), Fraction(7)))
def test_zeta_minus_one_closed_form(a):
    assert hurwitz_zeta(-1, a) == -(a * a - a + Fraction(1, 6)) / 2


def test_non_integer_arguments_use_continuation():
    assert hurwitz_zeta(2, 1) == pytest.approx(math.pi ** 2 / 6)
    assert hurwitz_zeta(-0.5, 1) == pytest.approx(float(mpmath.zeta(-0.5)))


@pytest.mark.parametrize("s,a", [(1, 1), (0, 0), (2, -1)])
def test_zeta_domain_errors(s, a):
    with pytest.raises(RegularizationError):
        hurwitz_zeta(s, a)


@given(st.floats(0, 2 * math.pi), st.floats(0.05, 3))
def test_closed_form_matches_series(theta, eps):
    closed = delta_eps_torus(theta, eps)
    assert delta_eps_torus_series(theta, eps) == pytest.approx(closed, rel=1e-10)


@given(st.floats(0.01, 3))
def test_coincident_value_is_exp_times_coth(eps):
    # the half-shifted damping multiplies every mode, including m = 0, by e^{eps}
    assert delta_eps_torus(0.0, eps) == pytest.approx(math.exp(eps) / math.tanh(eps), rel=1e-12)


@pytest.mark.parametrize("eps", [1.0, 0.1, 0.01])
def test_coincident_value_is_not_coth(eps):
    assert abs(delta_eps_torus(0.0, eps) - 1 / math.tanh(eps)) > 0.5


@pytest.mark.parametrize("eps", [0.5, 1.0, 2.0])
def test_zero_mode_of_kernel(eps):
    assert torus_zero_mode(eps) == pytest.approx(math.exp(eps), rel=1e-12)


def test_zeta_assignments():
    assert regularized_delta0_torus() == 1
    for m in range(5):
        assert regularized_delta0_sphere(m) == 1
        assert regularized_delta0_sphere(m, "absolute") == -m
    with pytest.raises(RegularizationError):
        regularized_delta0_sphere(0, "gaussian")


@pytest.mark.parametrize("l,m", [(0, 0), (3, 1), (5, -4)])
def test_coincident_mode_weight(l, m):
    assert coincident_mode_weight(l, m) == pytest.approx(1.0, abs=1e-13)


def test_sphere_kernel_reproduces_projection():
    # int du/2 delta^m_eps(u, v) Q_{lm}(u) = damping(l) Q_{lm}(v) for l <= lmax
    from kmvertex.sphere import eval_Q, quadrature_grid

    ker = SphereKernel(0.3, 1, 6)
    g = quadrature_grid(12)
    v = 0.37
    for l in range(1, 7):
        lhs = np.dot(g.weights / 2, ker(g.nodes, v) * eval_Q(l, 1, g.nodes))
        assert lhs == pytest.approx(math.exp(-0.6 * ker.exponent(l)) * eval_Q(l, 1, v), abs=1e-12)


def test_kernel_validation():
    with pytest.raises(RegularizationError):
        TorusKernel(0.0)
    with pytest.raises(RegularizationError):
        SphereKernel(0.1, 3, 2)
    with pytest.raises(RegularizationError):
        SphereKernel(0.1, 0, 2, damping="other")


def test_laurent_gap_tends_to_zero():
    assert abs(coth_laurent_gap(1e-3)) < 1e-3
