"""Bessel functions J, Y and the outgoing Hankel combination H1.

Only nonnegative integer and half-integer orders are needed here, at real
positive argument.  Integer orders use the ascending power series for
moderate z and the large-argument asymptotic expansion beyond; half-integer
orders are exact trigonometric closed forms built by upward recurrence.
A Wronskian identity is evaluated at runtime as a self-check.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, StabilityError

SERIES_CUTOFF = 15.0
WRONSKIAN_TOL = 1e-9
_EULER_GAMMA = 0.5772156649015328606


def _is_half_integer(order: float) -> bool:
    return abs(order * 2.0 - round(order * 2.0)) < 1e-12 and abs(order - round(order)) > 0.25


def _bessel_j_series(n: int, z: float) -> float:
    """Ascending series for integer order; accurate for z below ~20."""
    half = z / 2.0
    term = half ** n / math.factorial(n)
    total = term
    for k in range(1, 400):
        term *= -(half * half) / (k * (k + n))
        total += term
        if abs(term) < 1e-18 * max(abs(total), 1e-30):
            break
    return total


def _bessel_y_series(n: int, z: float) -> float:
    """Ascending series for Y_n, integer n >= 0, z below ~20."""
    half = z / 2.0
    # finite sum of negative powers
    neg = 0.0
    for k in range(n):
        neg += math.factorial(n - k - 1) / math.factorial(k) * half ** (2 * k - n)
    # harmonic numbers
    def h(j: int) -> float:
        return sum(1.0 / i for i in range(1, j + 1))
    pos = 0.0
    term = half ** n / math.factorial(n)
    for k in range(0, 400):
        if k > 0:
            term *= -(half * half) / (k * (k + n))
        contrib = term * (h(k) + h(k + n))
        pos += contrib
        if k > 2 and abs(term) < 1e-18 * max(abs(pos), 1e-30):
            break
    jn = _bessel_j_series(n, z)
    return (2.0 / math.pi) * (math.log(half) + _EULER_GAMMA) * jn \
        - (1.0 / math.pi) * neg - (1.0 / math.pi) * pos


def _hankel_asymptotic(order: float, z: float) -> complex:
    """Large-argument expansion of H1: sqrt(2/(pi z)) e^{i chi} sum_k i^k A_k / z^k."""
    chi = z - order * math.pi / 2.0 - math.pi / 4.0
    total = complex(0.0)
    a = 1.0
    best = math.inf
    for k in range(0, 40):
        if k > 0:
            a *= (4.0 * order * order - (2 * k - 1) ** 2) / (8.0 * k)
        term = (1j ** k) * a / z ** k
        if abs(term) > best:
            break
        best = abs(term)
        total += term
        if abs(term) < 1e-17:
            break
    return math.sqrt(2.0 / (math.pi * z)) * np.exp(1j * chi) * total


def _hankel_half_integer(order: float, z: float) -> complex:
    """Exact H1 at half-integer order by upward recurrence.

    H_{-1/2} = sqrt(2/(pi z)) e^{iz}, H_{1/2} = -i sqrt(2/(pi z)) e^{iz};
    H_{nu+1} = (2 nu / z) H_nu - H_{nu-1}.
    """
    pref = math.sqrt(2.0 / (math.pi * z)) * np.exp(1j * z)
    h_prev = pref            # order -1/2
    h_cur = -1j * pref       # order +1/2
    nu = 0.5
    while nu < order - 1e-12:
        h_prev, h_cur = h_cur, (2.0 * nu / z) * h_cur - h_prev
        nu += 1.0
    return h_cur


def bessel_j(order: float, z: float) -> float:
    if z <= 0:
        raise DomainError("argument must be positive")
    if _is_half_integer(order):
        return float(_hankel_half_integer(order, z).real)
    n = int(round(order))
    if n < 0:
        raise DomainError("order must be nonnegative")
    if z < SERIES_CUTOFF:
        return _bessel_j_series(n, z)
    return float(_hankel_asymptotic(order, z).real)


def bessel_y(order: float, z: float) -> float:
    if z <= 0:
        raise DomainError("argument must be positive")
    if _is_half_integer(order):
        return float(_hankel_half_integer(order, z).imag)
    n = int(round(order))
    if n < 0:
        raise DomainError("order must be nonnegative")
    if z < SERIES_CUTOFF:
        return _bessel_y_series(n, z)
    return float(_hankel_asymptotic(order, z).imag)


def wronskian_residual(order: float, z: float) -> float:
    """|J_{a+1} Y_a - J_a Y_{a+1} - 2/(pi z)| at order a."""
    w = bessel_j(order + 1.0, z) * bessel_y(order, z) \
        - bessel_j(order, z) * bessel_y(order + 1.0, z)
    return abs(w - 2.0 / (math.pi * z))


def hankel_h1(order: float, z: float, self_check: bool = True) -> complex:
    """Outgoing Hankel function H^(1)_order(z) = J + iY, z > 0.

    Orders are restricted to nonnegative integers and half-integers.  With
    ``self_check`` the Wronskian identity is verified and a stability error
    raised if it drifts.
    """
    if z <= 0:
        raise DomainError("argument must be positive")
    if not (_is_half_integer(order) or abs(order - round(order)) < 1e-12):
        raise DomainError("order must be integer or half-integer")
    if order < 0:
        raise DomainError("order must be nonnegative")
    if _is_half_integer(order):
        val = _hankel_half_integer(order, z)
    elif z < SERIES_CUTOFF:
        n = int(round(order))
        val = complex(_bessel_j_series(n, z), _bessel_y_series(n, z))
    else:
        val = _hankel_asymptotic(order, z)
    if self_check:
        res = wronskian_residual(order, z) * (math.pi * z / 2.0)
        if res > WRONSKIAN_TOL:
            raise StabilityError(
                f"Wronskian self-check failed at order {order}, z={z}: residual {res:.2e}"
            )
    return val
