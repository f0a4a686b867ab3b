"""Closed-form Wigner function and heralding probability of non-Gaussian TMST states.

A two-mode squeezed thermal state (squeezing ``lam = tanh r``, thermal scale
``kappa = n_th + 1/2``) has its second mode mixed with a Fock state ``|m>`` on a
beam splitter of transmissivity ``tau``; the auxiliary output is projected onto
``|n>``. Every quantity below is a derivative operator applied to a Gaussian
kernel, evaluated with :func:`ngtmst.engine.deriv_extract`.

Symbols follow the usual shorthands: ``mu = sqrt(1 - lam^2)``, ``t = sqrt(tau)``,
``r_bs = sqrt(1 - tau)``, ``T = 1 + t^2`` and ``Lam = 1 + lam^2``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .engine import MAX_ORDER, DerivOrder, QuadExp, deriv_extract, hermite_2var_scaled
from .errors import DomainError, NegligibleProbability

__all__ = [
    "PROBABILITY_FLOOR",
    "IMAG_TOL",
    "OpKind",
    "NGParams",
    "CoefficientSet",
    "KernelGrowthWarning",
    "coefficients_wigner",
    "coefficients_probability",
    "coefficients_parity",
    "wigner_kernel",
    "wigner_unnormalized",
    "wigner_unnormalized_hermite",
    "success_probability",
    "wigner_normalized",
]

PROBABILITY_FLOOR = 1e-12
IMAG_TOL = 1e-10


class KernelGrowthWarning(RuntimeWarning):
    """The Gaussian envelope exp(xi^T M1 xi) does not decay in every direction."""


class OpKind(enum.Enum):
    """Heralded operation: subtraction, addition or catalysis."""

    PS = "PS"
    PA = "PA"
    PC = "PC"

    @classmethod
    def classify(cls, m: int, n: int) -> "OpKind":
        if m < n:
            return cls.PS
        if m > n:
            return cls.PA
        return cls.PC


@dataclass(frozen=True)
class NGParams:
    """Parameters of one heralded state.

    Parameters
    ----------
    lam : float
        Squeezing parameter in [0, 1).
    kappa : float
        Thermal scale ``n_th + 1/2``; at least 1/2.
    tau : float
        Beam-splitter transmissivity in (0, 1].
    m, n : int
        Ancilla photon number and detected photon number.
    """

    lam: float
    kappa: float
    tau: float
    m: int = 0
    n: int = 0
    _r: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise DomainError(f"lam must lie in [0, 1), got {self.lam}")
        if not self.kappa >= 0.5:
            raise DomainError(f"kappa must be >= 1/2, got {self.kappa}")
        if not 0.0 < self.tau <= 1.0:
            raise DomainError(f"tau must lie in (0, 1], got {self.tau}")
        for name in ("m", "n"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))

    @classmethod
    def from_physical(cls, r_sq: float, n_th: float, tau: float, m: int = 0, n: int = 0) -> "NGParams":
        """Build from squeezing strength ``r_sq`` and thermal occupancy ``n_th``."""
        if not (math.isfinite(r_sq) and r_sq >= 0):
            raise DomainError(f"r_sq must be finite and non-negative, got {r_sq}")
        if not n_th >= 0:
            raise DomainError(f"n_th must be non-negative, got {n_th}")
        return cls(math.tanh(r_sq), n_th + 0.5, tau, m, n, _r=float(r_sq))

    def replace(self, **changes) -> "NGParams":
        kw = dict(lam=self.lam, kappa=self.kappa, tau=self.tau, m=self.m, n=self.n)
        if "lam" not in changes:
            kw["_r"] = self._r
        kw.update(changes)
        return NGParams(**kw)

    @property
    def r_sq(self) -> float:
        # keep the caller's value when given, so r -> tanh -> atanh round-off does not leak out
        return math.atanh(self.lam) if self._r is None else self._r

    @property
    def n_th(self) -> float:
        return self.kappa - 0.5

    @property
    def mu(self) -> float:
        return math.sqrt(1.0 - self.lam**2)

    @property
    def t(self) -> float:
        return math.sqrt(self.tau)

    @property
    def r_bs(self) -> float:
        return math.sqrt(1.0 - self.tau)

    @property
    def T(self) -> float:
        return 1.0 + self.tau

    @property
    def Lam(self) -> float:
        return 1.0 + self.lam**2

    @property
    def op_kind(self) -> OpKind:
        return OpKind.classify(self.m, self.n)

    @property
    def order(self) -> DerivOrder:
        return DerivOrder(self.m, self.n)


@dataclass(frozen=True)
class CoefficientSet:
    """Scalars and matrices of the closed forms; unused groups stay empty."""

    a: tuple = ()
    b: tuple = ()
    c: tuple = ()
    d: tuple = ()
    e: tuple = ()
    f: tuple = ()
    M1: np.ndarray | None = None
    M2: np.ndarray | None = None
    M3: np.ndarray | None = None
    extra: dict = field(default_factory=dict)


def _sym(M: np.ndarray) -> np.ndarray:
    M = 0.5 * (M + M.T)
    M.setflags(write=False)
    return M


def _wigner_scalars(p: NGParams):
    k, lam = p.kappa, p.lam
    mu2, t, r, T, L = p.mu**2, p.t, p.r_bs, p.T, p.Lam
    b0 = -2 * k * (2 * k * mu2 * T + L * r * r)
    b1 = 2 * k * lam * r * t
    b2 = -k * r * (2 * k * mu2 + L)
    b3 = 2 * k * lam * r
    b4 = k * r * t * (2 * k * mu2 - L)
    a0 = math.pi**2 * k * (2 * k * mu2 * T + L * r * r) / mu2
    a1 = k * r * r * (2 * k * mu2 + L) / b0
    a4 = -k * r * r * (2 * k * mu2 - L) / b0
    a7 = 4 * k * k * mu2 * t / b0
    c1 = 2 * k * L * T + mu2 * r * r
    c2 = -8 * k * lam * t
    c3 = 2 * k * L * T + 4 * k * k * mu2 * r * r
    M1 = np.array([[c1, 0, c2, 0], [0, c1, 0, -c2], [c2, 0, c3, 0], [0, -c2, 0, c3]]) / b0
    return (a0, a1, a4, a7), (b0, b1, b2, b3, b4), (c1, c2, c3), _sym(M1)


def _linear_terms(b, xi):
    """Linear kernel coefficients (a2, a3, a5, a6); ``xi`` may be batched on leading axes."""
    b0, b1, b2, b3, b4 = b
    xi = np.asarray(xi, dtype=float)
    q1, p1, q2, p2 = xi[..., 0], xi[..., 1], xi[..., 2], xi[..., 3]
    z1, z2 = q1 + 1j * p1, q2 + 1j * p2
    a2 = 2 * (b1 * np.conj(z1) + b2 * z2) / b0
    a3 = -2 * (b1 * z1 + b2 * np.conj(z2)) / b0
    a5 = -2 * (b3 * z1 + b4 * np.conj(z2)) / b0
    a6 = 2 * (b3 * np.conj(z1) + b4 * z2) / b0
    return a2, a3, a5, a6


def _check_decay(M1: np.ndarray) -> None:
    top = np.linalg.eigvalsh(M1).max()
    if top >= 0:
        warnings.warn(f"envelope matrix has eigenvalue {top:.3g} >= 0", KernelGrowthWarning, stacklevel=3)


def coefficients_wigner(p: NGParams, xi) -> CoefficientSet:
    """Coefficients a0..a7, b0..b4, c1..c3 and the envelope matrix M1 at ``xi``."""
    (a0, a1, a4, a7), b, c, M1 = _wigner_scalars(p)
    a2, a3, a5, a6 = (complex(v) for v in _linear_terms(b, np.asarray(xi, float).reshape(4)))
    return CoefficientSet(a=(a0, a1, a2, a3, a4, a5, a6, a7), b=b, c=c, M1=M1)


def coefficients_probability(p: NGParams) -> CoefficientSet:
    """Coefficients d0..d4 and matrix M2 of the success probability."""
    k, mu2, t, r, T, L = p.kappa, p.mu**2, p.t, p.r_bs, p.T, p.Lam
    d0 = 2 * mu2 / (2 * k * L * r * r + mu2 * T)
    d1 = -r * r * (mu2 + 2 * k * L)
    d2 = -2 * mu2 * t
    d3 = r * r * (mu2 - 2 * k * L)
    d4 = 8 * k * L * r * r + 4 * mu2 * T
    M2 = np.array([[0, d1, 0, d2], [d1, 0, d2, 0], [0, d2, 0, d3], [d2, 0, d3, 0]]) / d4
    return CoefficientSet(d=(d0, d1, d2, d3, d4), M2=_sym(M2))


def coefficients_parity(p: NGParams, theta: float) -> CoefficientSet:
    """Coefficients e0..e7, f1..f6 and matrix M3 for the MZI angle ``theta``.

    ``theta`` is the raw angle of the interferometer transform. The physical phase
    used by :mod:`ngtmst.interferometer` is ``theta - pi/2``.
    """
    k, lam = p.kappa, p.lam
    mu2, t, r, T, L = p.mu**2, p.t, p.r_bs, p.T, p.Lam
    C, S, S2 = math.cos(theta), math.sin(theta), math.sin(2 * theta)
    f1 = 4 * k * k - 1
    f2 = 4 * k * k + 1
    f3 = C * f1 - f2
    f4 = f2 * mu2 + 4 * k * L
    f5 = f2 * mu2 - 4 * k * L
    f6 = f3 * mu2 * r * r - 4 * k * L * T
    e7 = 4 * ((4 * k * L * T - f3 * mu2 * r * r) ** 2 - (16 * k * lam * S * t) ** 2)
    if not e7 > 0:
        raise DomainError(f"parity kernel is not normalisable (e7 = {e7})")
    e0 = 8 * mu2 / math.sqrt(e7)
    e1 = 8 * k * lam * r * r * t * (S2 * f4 - 2 * S * f1 * mu2)
    e2 = f6 * r * r * (f1 * mu2 - C * f4)
    e3 = 8 * k * lam * r * r * S * (4 * k * L * r * r - f3 * mu2 * T)
    e4 = -8 * k * t * (L * mu2 * r * r * (f2 - C * f1) + 4 * k * T * (L * L - 4 * lam * lam * S * S))
    e5 = 8 * k * lam * r * r * t * (S2 * f5 - 2 * S * f1 * mu2)
    e6 = f6 * r * r * (f1 * mu2 - C * f5)
    M3 = np.array([[e1, e2, e3, e4], [e2, e1, e4, e3], [e3, e4, e5, e6], [e4, e3, e6, e5]]) / e7
    return CoefficientSet(
        e=(e0, e1, e2, e3, e4, e5, e6, e7),
        f=(f1, f2, f3, f4, f5, f6),
        M3=_sym(M3),
        extra={"c1": C, "s1": S, "s2": S2},
    )


def wigner_kernel(p: NGParams, xi) -> QuadExp:
    """Gaussian kernel in (u1, v1, u2, v2) whose derivatives give the Wigner function."""
    cs = coefficients_wigner(p, xi)
    a0, a1, a2, a3, a4, a5, a6, a7 = cs.a
    M = np.zeros((4, 4), complex)
    M[0, 1] = M[1, 0] = -a1 / 2
    M[2, 3] = M[3, 2] = -a4 / 2
    M[0, 2] = M[2, 0] = M[1, 3] = M[3, 1] = a7 / 2
    xi = np.asarray(xi, float)
    pref = math.exp(xi @ cs.M1 @ xi) / a0
    return QuadExp(M, np.array([a2, a3, a5, a6]), pref)


def _real(z: complex, what: str, scale: float = 1.0) -> float:
    # rounding leaves an imaginary residue proportional to the kernel scale, so
    # values that cancel to ~0 are judged against that scale, not against |z|
    if abs(z.imag) > IMAG_TOL * max(abs(z), 1e-6 * scale):
        raise ArithmeticError(f"{what}: imaginary residual {z.imag:.3g} on {z.real:.3g}")
    return float(z.real)


def wigner_unnormalized(p: NGParams, xi, max_order: int = MAX_ORDER) -> float:
    """Unnormalized Wigner function of the heralded state at ``xi`` (derivative route)."""
    kern = wigner_kernel(p, xi)
    _check_decay(coefficients_wigner(p, np.zeros(4)).M1)
    return _real(deriv_extract(kern, p.order, max_order), "wigner", abs(kern.prefactor))


def wigner_unnormalized_hermite(p: NGParams, xi) -> np.ndarray:
    """Same quantity via the two-variable Hermite double sum; ``xi`` may be batched.

    ``xi`` has shape ``(..., 4)``; the result has shape ``xi.shape[:-1]``.
    """
    (a0, a1, a4, a7), b, _, M1 = _wigner_scalars(p)
    xi = np.asarray(xi, dtype=float)
    a2, a3, a5, a6 = _linear_terms(b, xi)
    m, n = p.m, p.n
    fm, fn = factorial(m), factorial(n)
    total = np.zeros(xi.shape[:-1], complex)
    for i in range(min(m, n) + 1):
        for j in range(min(m, n) + 1):
            w = (a7 ** (i + j) / (factorial(i) * factorial(j))
                 * fm / factorial(m - i) * fm / factorial(m - j)
                 * fn / factorial(n - i) * fn / factorial(n - j))
            total = total + w * hermite_2var_scaled(m - i, m - j, a2, a3, a1) \
                * hermite_2var_scaled(n - i, n - j, a5, a6, a4)
    env = np.exp(np.einsum("...i,ij,...j->...", xi, M1, xi)) / a0
    out = (-2.0) ** (m + n) / (fm * fn) * env * total
    return out.real


def success_probability(p: NGParams, max_order: int = MAX_ORDER) -> float:
    """Probability of detecting ``n`` photons given ancilla ``|m>``."""
    cs = coefficients_probability(p)
    val = deriv_extract(QuadExp(cs.M2, prefactor=cs.d[0]), p.order, max_order)
    return _real(val, "probability")


def wigner_normalized(p: NGParams, xi, eps: float = PROBABILITY_FLOOR,
                      max_order: int = MAX_ORDER) -> float:
    """Normalized Wigner function of the heralded state."""
    prob = success_probability(p, max_order)
    if prob <= eps:
        raise NegligibleProbability(f"success probability {prob:.3g} <= {eps:g}")
    return wigner_unnormalized(p, xi, max_order) / prob
