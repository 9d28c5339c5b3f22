"""Regulated delta kernels and zeta-function assignments for coincident deltas."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .sphere import eval_Q


class RegularizationError(ValueError):
    pass


# --- zeta values ---------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    """B_0..B_n with the B_1 = -1/2 convention."""
    B = [Fraction(1)]
    for k in range(1, n + 1):
        B.append(-sum(math.comb(k + 1, j) * B[j] for j in range(k)) / (k + 1))
    return tuple(B)


def bernoulli_polynomial(n: int, a) -> Fraction | float:
    B = bernoulli_numbers(n)
    return sum(math.comb(n, k) * B[k] * a ** (n - k) for k in range(n + 1))


def hurwitz_zeta(s, a):
    """Hurwitz zeta by analytic continuation.

    Non-positive integer s uses zeta(-n, a) = -B_{n+1}(a)/(n+1) and returns a
    Fraction when ``a`` is rational. Other s with s > 1 or s < 1 defers to mpmath.
    """
    if a <= 0:
        raise RegularizationError(f"Hurwitz zeta needs a > 0, got {a}")
    if float(s) == int(float(s)) and int(float(s)) <= 0:
        n = -int(float(s))
        return -bernoulli_polynomial(n + 1, Fraction(a)) / (n + 1)
    if s == 1:
        raise RegularizationError("Hurwitz zeta has a pole at s = 1")
    import mpmath

    return float(mpmath.zeta(s, a))


def riemann_zeta(s):
    return hurwitz_zeta(s, Fraction(1))


# --- torus kernel --------------------------------------------------------------

def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise RegularizationError(f"regulator must be positive, got {eps}")


def delta_eps_torus(theta, eps: float):
    """Closed form of sum_m e^{-i m theta} e^{-2 eps (|m| - 1/2)}."""
    _check_eps(eps)
    x = math.exp(-2 * eps)
    th = np.asarray(theta, dtype=float)
    # 1 - 2x cos(t) + x^2 written as (1-x)^2 + 4x sin^2(t/2) to avoid cancellation
    den = (1 - x) ** 2 + 4 * x * np.sin(th / 2) ** 2
    val = math.exp(eps) * (1 - x * x) / den
    return float(val) if np.ndim(val) == 0 else val


def series_cutoff(eps: float, tol: float = 1e-17) -> int:
    # tail after M is ~ 2 e^{eps} x^{M+1}/(1-x)
    x = math.exp(-2 * eps)
    M = 1
    while 2 * math.exp(eps) * x ** (M + 1) / (1 - x) > tol:
        M *= 2
    return M


def delta_eps_torus_series(theta, eps: float, M: int | None = None):
    """Direct partial sum over |m| <= M, summed from the smallest terms up."""
    _check_eps(eps)
    if M is None:
        M = series_cutoff(eps)
    th = np.asarray(theta, dtype=float)
    ms = np.arange(M, 0, -1)
    terms = 2 * np.exp(-2 * eps * (ms - 0.5))[:, None] * np.cos(np.outer(ms, th.ravel()))
    val = (terms.sum(axis=0) + math.exp(eps)).reshape(th.shape)
    return float(val) if np.ndim(val) == 0 else val


def torus_zero_mode(eps: float, K: int = 4096) -> float:
    """int_0^{2 pi} dtheta/2pi delta_eps(theta) by the periodic trapezoid rule."""
    th = 2 * np.pi * np.arange(K) / K
    return float(np.mean(delta_eps_torus(th, eps)))


@dataclass(frozen=True)
class TorusKernel:
    eps: float

    def __post_init__(self):
        _check_eps(self.eps)

    def __call__(self, theta):
        return delta_eps_torus(theta, self.eps)

    def series(self, theta, M: int | None = None):
        return delta_eps_torus_series(theta, self.eps, M)


def regularized_delta0_torus() -> Fraction:
    """zeta-assigned value of delta_eps(0) = e^{eps} + 2 sum_{m>=1} e^{-2 eps (m - 1/2)}.

    The m = 0 term tends to 1; each tail is the Dirichlet series of
    zeta_H(s, 1/2) at s = 0, which vanishes.
    """
    return Fraction(1) + 2 * hurwitz_zeta(0, Fraction(1, 2))


# --- sphere kernel -------------------------------------------------------------

DAMPING_LAWS = ("shifted", "absolute")


@dataclass(frozen=True)
class SphereKernel:
    """delta^m_eps(u, v) = sum_{l >= |m|} Q_{eps,lm}(u) Q_{eps,lm}(v), truncated at lmax.

    ``shifted``: Q_{eps,lm} = e^{-eps (l - |m| - 1/2)} Q_{lm}, the torus half-shift
    measured from the lowest mode of the order-m tower.
    ``absolute``: Q_{eps,lm} = e^{-eps (l + 1/2)} Q_{lm}.
    """

    eps: float
    m: int
    lmax: int
    damping: str = "shifted"

    def __post_init__(self):
        _check_eps(self.eps)
        if self.damping not in DAMPING_LAWS:
            raise RegularizationError(f"unknown damping law {self.damping!r}")
        if abs(self.m) > self.lmax:
            raise RegularizationError("order exceeds lmax")

    def exponent(self, l: int) -> float:
        if self.damping == "shifted":
            return l - abs(self.m) - 0.5
        return l + 0.5

    def __call__(self, u, v):
        total = 0.0
        for l in range(abs(self.m), self.lmax + 1):
            d = math.exp(-2 * self.eps * self.exponent(l))
            total = total + d * eval_Q(l, self.m, u) * eval_Q(l, self.m, v)
        return total


def regularized_delta0_sphere(m: int, damping: str = "shifted") -> Fraction:
    """zeta-assigned coincident value of the order-m kernel, one unit per basis mode.

    Each mode contributes its weighted coincident value 1 times the damping
    factor; the resulting Dirichlet series sum_{l >= |m|} (l - |m| - 1/2)^{-s}
    splits into the lowest mode (limit 1) and a zeta_H(0, 1/2) tail.
    """
    m = abs(int(m))
    if damping == "shifted":
        return Fraction(1) + hurwitz_zeta(0, Fraction(1, 2))
    if damping == "absolute":
        # lowest mode still tends to 1; tail sum_{l > m} (l + 1/2)^{-s}
        return Fraction(1) + hurwitz_zeta(0, Fraction(2 * m + 3, 2))
    raise RegularizationError(f"unknown damping law {damping!r}")


def coincident_mode_weight(l: int, m: int, K: int | None = None) -> float:
    """sum_k (w_k/2) Q_{lm}(u_k)^2 on an exact Gauss grid."""
    from .sphere import quadrature_grid

    grid = quadrature_grid(K or l + 1)
    return float(np.dot(grid.weights / 2, eval_Q(l, m, grid.nodes) ** 2))


def coth_laurent_gap(eps: float) -> float:
    """coth(eps) - 1/eps, the finite part left after removing the pole."""
    return 1 / math.tanh(eps) - 1 / eps
