"""Special functions and the derivative-extraction engine.

Every closed form in this package has the shape

    prefactor * (-2)**(m+n) / (m! n!) * d^m/du1^m d^m/dv1^m d^n/du2^n d^n/dv2^n
        exp(u^T M u + b^T u) |_{u=0}

with ``u = (u1, v1, u2, v2)``. :func:`deriv_extract` evaluates it by expanding the
exponential as a truncated power series and reading off one coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np

from .errors import DomainError, OrderTooLarge

__all__ = [
    "MAX_ORDER",
    "QuadExp",
    "DerivOrder",
    "laguerre",
    "hermite_2var",
    "hermite_2var_scaled",
    "deriv_extract",
]

MAX_ORDER = 8


def laguerre(n: int, x: float) -> float:
    """Laguerre polynomial L_n(x) by the three-term recurrence."""
    if n < 0:
        raise DomainError(f"order must be non-negative, got {n}")
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def hermite_2var(m: int, n: int, x: complex, y: complex) -> complex:
    """Two-variable Hermite polynomial H_{m,n}(x, y).

    Defined through the generating function
    ``exp(-s t + s x + t y) = sum H_{m,n}(x, y) s^m t^n / (m! n!)``, i.e.

        H_{m,n}(x, y) = sum_k (-1)^k m! n! / (k! (m-k)! (n-k)!) x^(m-k) y^(n-k)
    """
    return hermite_2var_scaled(m, n, x, y, 1.0)


def hermite_2var_scaled(m: int, n: int, x: complex, y: complex, w: complex) -> complex:
    """``H_{m,n}(x/sqrt(w), y/sqrt(w)) * sqrt(w)**(m+n)`` without forming sqrt(w).

    This is a polynomial in ``(x, y, w)``, so it stays finite at ``w = 0`` where
    the plain Hermite form would divide by zero.
    """
    if m < 0 or n < 0:
        raise DomainError(f"orders must be non-negative, got ({m}, {n})")
    total = 0j
    for k in range(min(m, n) + 1):
        c = (-1) ** k * comb(m, k) * comb(n, k) * factorial(k)
        total += c * x ** (m - k) * y ** (n - k) * w**k
    return total


@dataclass(frozen=True)
class DerivOrder:
    """Orders of the derivative operator: ``m`` in (u1, v1) and ``n`` in (u2, v2)."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise DomainError(f"orders must be non-negative, got ({self.m}, {self.n})")


@dataclass(frozen=True)
class QuadExp:
    """Kernel ``prefactor * exp(u^T M u + b^T u)`` in the formal variables (u1, v1, u2, v2)."""

    M: np.ndarray
    b: np.ndarray = field(default_factory=lambda: np.zeros(4, complex))
    prefactor: complex = 1.0

    def __post_init__(self):
        M = np.array(self.M, dtype=complex)
        b = np.array(self.b, dtype=complex).reshape(-1)
        if M.shape != (4, 4) or b.shape != (4,):
            raise DomainError("kernel must be four-dimensional")
        # symmetrise exactly; only the symmetric part enters u^T M u
        M = 0.5 * (M + M.T)
        M.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return 4

    def __call__(self, u) -> complex:
        u = np.asarray(u, dtype=complex)
        return self.prefactor * np.exp(u @ self.M @ u + self.b @ u)


def _shift(a: np.ndarray, axis: int) -> np.ndarray:
    """Multiply a truncated power series by the variable ``axis``."""
    out = np.zeros_like(a)
    if a.shape[axis] < 2:
        return out
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    src[axis] = slice(0, a.shape[axis] - 1)
    dst[axis] = slice(1, None)
    out[tuple(dst)] = a[tuple(src)]
    return out


def _series_coefficient(M: np.ndarray, b: np.ndarray, caps: tuple[int, ...]) -> complex:
    # Graded recursion for E = exp(P), P = P1 + P2 (degrees 1 and 2):
    #   k E_k = P1 E_{k-1} + 2 P2 E_{k-2}
    # Arrays are truncated per variable at `caps`; only the corner entry is kept.
    shape = tuple(c + 1 for c in caps)
    degree = sum(caps)
    lin = [(i, b[i]) for i in range(4) if b[i] != 0]
    quad = [(i, j, M[i, i] if i == j else 2 * M[i, j])
            for i in range(4) for j in range(i, 4) if M[i, j] != 0]

    e_prev2 = None
    e_prev = np.zeros(shape, dtype=complex)
    e_prev[(0,) * 4] = 1.0
    corner = e_prev[caps] if degree == 0 else 0j
    for k in range(1, degree + 1):
        acc = np.zeros(shape, dtype=complex)
        for i, coef in lin:
            acc += coef * _shift(e_prev, i)
        if e_prev2 is not None:
            for i, j, coef in quad:
                acc += 2 * coef * _shift(_shift(e_prev2, i), j)
        acc /= k
        e_prev2, e_prev = e_prev, acc
        if k == degree:
            corner = acc[caps]
    return corner


def deriv_extract(kernel: QuadExp, order: DerivOrder, max_order: int = MAX_ORDER) -> complex:
    """Apply the derivative operator of order ``(m, n)`` to ``kernel`` at u = 0.

    Returns ``prefactor * (-2)**(m+n)/(m! n!) * d^{2m+2n} exp(u^T M u + b^T u)``
    with the derivatives ``d^m/du1^m d^m/dv1^m d^n/du2^n d^n/dv2^n``.
    """
    m, n = order.m, order.n
    if m > max_order or n > max_order:
        raise OrderTooLarge(f"order ({m}, {n}) exceeds cap {max_order}")
    coef = _series_coefficient(kernel.M, kernel.b, (m, m, n, n))
    deriv = coef * factorial(m) ** 2 * factorial(n) ** 2
    return kernel.prefactor * (-2) ** (m + n) / (factorial(m) * factorial(n)) * deriv
