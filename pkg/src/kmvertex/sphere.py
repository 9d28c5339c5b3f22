"""Orthonormal associated Legendre functions on [-1, 1] and their product coefficients.

Q_{lm}(u) = N_{lm} (1 - u^2)^{m/2} d^m P_l / du^m for m >= 0, with
N_{lm}^2 = (2l + 1)(l - m)!/(l + m)!, so that the Q_{lm} are orthonormal under
the half measure du/2. No Condon-Shortley phase is used; negative orders follow
Q_{l,-m} = (-1)^m Q_{lm}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg


class SphereIndexError(ValueError):
    pass


def _check(l: int, m: int) -> None:
    if l < 0 or abs(m) > l:
        raise SphereIndexError(f"invalid Legendre index (l={l}, m={m}); need |m| <= l")


@lru_cache(maxsize=None)
def _derivative_coeffs(l: int, m: int) -> np.ndarray:
    """Power-series coefficients of N_{lm} d^m P_l/du^m (m >= 0)."""
    c = np.zeros(l + 1)
    c[l] = 1.0
    poly = npleg.leg2poly(npleg.legder(c, m)) if m else npleg.leg2poly(c)
    norm = math.sqrt((2 * l + 1) * math.factorial(l - m) / math.factorial(l + m))
    out = np.asarray(poly, dtype=float) * norm
    out.setflags(write=False)
    return out


def eval_Q(l: int, m: int, u) -> np.ndarray | float:
    _check(l, m)
    am = abs(m)
    u_arr = np.asarray(u, dtype=float)
    if np.any(np.abs(u_arr) > 1):
        raise SphereIndexError("Legendre functions are evaluated on [-1, 1] only")
    val = np.polynomial.polynomial.polyval(u_arr, _derivative_coeffs(l, am))
    if am:
        val = val * (1.0 - u_arr * u_arr) ** (am / 2)
    if m < 0 and am % 2:
        val = -val
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class LegendreBasis:
    lmax: int

    def indices(self) -> list[tuple[int, int]]:
        return [(l, m) for l in range(self.lmax + 1) for m in range(-l, l + 1)]

    def __call__(self, l: int, m: int, u):
        if l > self.lmax:
            raise SphereIndexError(f"l={l} exceeds lmax={self.lmax}")
        return eval_Q(l, m, u)

    def gram(self, m: int, K: int | None = None) -> np.ndarray:
        """Matrix of int du/2 Q_{lm} Q_{l'm} over l, l' in [|m|, lmax]."""
        grid = quadrature_grid(K or self.lmax + 2)
        ls = range(abs(m), self.lmax + 1)
        V = np.array([eval_Q(l, m, grid.nodes) for l in ls])
        return (V * (grid.weights / 2)) @ V.T


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=64)
def quadrature_grid(K: int) -> QuadratureGrid:
    """K-point Gauss-Legendre rule, exact for polynomials of degree <= 2K - 1."""
    if K < 1:
        raise ValueError("quadrature needs at least one node")
    x, w = npleg.leggauss(K)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureGrid(x, w)


def _validate_triple(l1, m1, l2, m2, l3, m3) -> None:
    _check(l1, m1)
    _check(l2, m2)
    if m3 != m1 + m2:
        raise SphereIndexError(f"m3={m3} must equal m1 + m2 = {m1 + m2}")
    _check(l3, m3)


@lru_cache(maxsize=None)
def _triple_sorted(l1: int, m1: int, l2: int, m2: int, l3: int) -> float:
    m3 = m1 + m2
    if (l1 + l2 + l3) % 2 or l3 > l1 + l2 or l3 < abs(m3):
        return 0.0
    grid = quadrature_grid(l1 + l2 + l3 + 2)
    u = grid.nodes
    f = eval_Q(l1, m1, u) * eval_Q(l2, m2, u) * eval_Q(l3, m3, u)
    return float(np.dot(grid.weights / 2, f))


def triple_coefficient(l1: int, m1: int, l2: int, m2: int, l3: int, m3: int | None = None) -> float:
    """c_{l1 m1 l2 m2}^{l3, m1+m2} = int du/2 Q_{l1 m1} Q_{l2 m2} Q_{l3, m1+m2}.

    Vanishes unless l1 + l2 + l3 is even (parity) and l3 <= l1 + l2.
    """
    if m3 is None:
        m3 = m1 + m2
    _validate_triple(l1, m1, l2, m2, l3, m3)
    a, b = sorted([(l1, m1), (l2, m2)])
    return _triple_sorted(a[0], a[1], b[0], b[1], l3)


def expand_product(l1: int, m1: int, l2: int, m2: int, tol: float = 0.0) -> list[tuple[int, float]]:
    """Q_{l1 m1} Q_{l2 m2} = sum_l3 c^{l3} Q_{l3, m1+m2}, as [(l3, c), ...]."""
    _check(l1, m1)
    _check(l2, m2)
    m3 = m1 + m2
    out = []
    for l3 in range(abs(m3), l1 + l2 + 1):
        c = triple_coefficient(l1, m1, l2, m2, l3)
        if (l1 + l2 + l3) % 2 == 0 and abs(c) > tol:
            out.append((l3, c))
    return out


def reconstruction_residual(l1: int, m1: int, l2: int, m2: int, u) -> float:
    u = np.asarray(u, dtype=float)
    lhs = eval_Q(l1, m1, u) * eval_Q(l2, m2, u)
    rhs = np.zeros_like(lhs)
    for l3, c in expand_product(l1, m1, l2, m2):
        rhs = rhs + c * eval_Q(l3, m1 + m2, u)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class TripleCoefficientTable:
    """All c_{l1 m1 l2 m2}^{l3 m3} with l1, l2 <= lmax; l3 runs to l1 + l2."""

    lmax: int

    def rows(self):
        idx = LegendreBasis(self.lmax).indices()
        for l1, m1 in idx:
            for l2, m2 in idx:
                for l3, c in expand_product(l1, m1, l2, m2):
                    yield l1, m1, l2, m2, l3, m1 + m2, c

    def __call__(self, l1, m1, l2, m2, l3) -> float:
        if max(l1, l2) > self.lmax:
            raise SphereIndexError(f"indices exceed lmax={self.lmax}")
        return triple_coefficient(l1, m1, l2, m2, l3)
