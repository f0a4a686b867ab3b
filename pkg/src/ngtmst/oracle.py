"""Truncated Fock-basis reference pipeline.

Nothing here reuses the phase-space closed forms. States are built from matrix
exponentials of truncated generators and measured directly, so this module can
falsify :mod:`ngtmst.ngstate` and :mod:`ngtmst.interferometer`.

Two representations are provided:

* :class:`FockOperator`, a dense matrix on the product number basis. It is
  simple and transparent but limited to small cutoffs.
* :class:`SectorState`, a two-mode density operator stored as blocks of fixed
  photon-number difference ``d = n1 - n2``. Squeezing, heralding on mode 2 and
  the interferometer all preserve that block structure (heralding shifts ``d`` by
  a constant), so cutoffs near 100 stay cheap.

Convention: ``a = (q + i p)/sqrt(2)``, a beam splitter of transmissivity ``tau``
is ``exp(theta (a^dag b - a b^dag))`` with ``cos theta = sqrt(tau)``, and the
interferometer is ``exp(-i theta J2)`` with ``J2 = (a1^dag a2 - a1 a2^dag)/(2i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, NegligibleProbability, TailTooLarge

__all__ = [
    "DEFAULT_CUTOFF",
    "TAIL_EPS",
    "FockOperator",
    "SectorState",
    "annihilation",
    "thermal_density",
    "two_mode_squeeze_unitary",
    "beamsplitter_unitary",
    "mzi_unitary",
    "tmst_sectors",
    "herald",
    "herald_probability",
    "parity_after_mzi",
    "wigner_point",
    "displacement",
]

DEFAULT_CUTOFF = 100
TAIL_EPS = 1e-10
GUARD = 40


def annihilation(cutoff: int) -> np.ndarray:
    """Truncated single-mode annihilation operator."""
    return np.diag(np.sqrt(np.arange(1, cutoff)), 1)


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on ``modes`` modes, each truncated to ``cutoff`` levels."""

    cutoff: int
    modes: int
    data: np.ndarray

    def __post_init__(self):
        dim = self.cutoff**self.modes
        data = np.array(self.data, dtype=complex)
        if data.shape != (dim, dim):
            raise DomainError(f"expected {dim}x{dim} matrix, got {data.shape}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.cutoff, self.modes, self.data @ other.data)

    def dag(self) -> "FockOperator":
        return FockOperator(self.cutoff, self.modes, self.data.conj().T)

    def tensor(self, other: "FockOperator") -> "FockOperator":
        if other.cutoff != self.cutoff:
            raise DomainError("cutoffs differ")
        return FockOperator(self.cutoff, self.modes + other.modes, np.kron(self.data, other.data))

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def amplitude(self, out: tuple[int, ...], inp: tuple[int, ...]) -> complex:
        """Matrix element ``<out| O |inp>`` for number-basis labels."""
        idx = lambda ns: int(np.ravel_multi_index(ns, (self.cutoff,) * self.modes))  # noqa: E731
        return complex(self.data[idx(out), idx(inp)])

    def number_distribution(self) -> np.ndarray:
        """Diagonal of a density operator reshaped to ``(cutoff,) * modes``."""
        return self.data.diagonal().real.reshape((self.cutoff,) * self.modes)


def _two_mode_ops(cutoff: int):
    a = annihilation(cutoff)
    eye = np.eye(cutoff)
    return np.kron(a, eye), np.kron(eye, a)


def thermal_density(n_th: float, cutoff: int, eps: float = TAIL_EPS) -> FockOperator:
    """Single-mode thermal state truncated to ``cutoff`` levels."""
    if n_th < 0:
        raise DomainError(f"thermal occupancy must be non-negative, got {n_th}")
    if cutoff < 2:
        raise DomainError("cutoff must be at least 2")
    p = _thermal_weights(n_th, cutoff)
    tail = 1.0 - p.sum()
    if tail > eps:
        raise TailTooLarge(f"thermal tail {tail:.3g} at cutoff {cutoff}")
    return FockOperator(cutoff, 1, np.diag(p))


def _thermal_weights(n_th: float, cutoff: int) -> np.ndarray:
    if n_th == 0:
        p = np.zeros(cutoff)
        p[0] = 1.0
        return p
    x = n_th / (1.0 + n_th)
    return (1.0 - x) * x ** np.arange(cutoff)


def two_mode_squeeze_unitary(r: float, cutoff: int, pad: int = 10) -> FockOperator:
    """``exp(r (a1^dag a2^dag - a1 a2))`` on a truncated two-mode space.

    The exponential is taken on a space padded by ``pad`` levels per mode and
    cropped, so matrix elements between low-lying states are accurate. The
    dense matrix has ``(cutoff + pad)**4`` entries; keep cutoffs small.
    """
    big = cutoff + pad
    a1, a2 = _two_mode_ops(big)
    gen = r * (a1.T @ a2.T - a1 @ a2)
    U = expm(gen).reshape(big, big, big, big)[:cutoff, :cutoff, :cutoff, :cutoff]
    return FockOperator(cutoff, 2, U.reshape(cutoff**2, cutoff**2))


def beamsplitter_unitary(tau: float, cutoff: int) -> FockOperator:
    """Two-mode beam splitter of transmissivity ``tau``.

    Built block by block in total photon number, so it is exact (and exactly
    number conserving) on every block that fits inside the cutoff.
    """
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {tau}")
    theta = math.acos(math.sqrt(tau))
    return _block_unitary(lambda N: _bs_block(theta, N), cutoff)


def mzi_unitary(theta: float, cutoff: int) -> FockOperator:
    """``exp(-i theta J2) = exp(-(theta/2)(a1^dag a2 - a1 a2^dag))``."""
    return _block_unitary(lambda N: _bs_block(-theta / 2, N), cutoff)


def _block_unitary(block, cutoff: int) -> FockOperator:
    U = np.zeros((cutoff,) * 4, dtype=complex)
    for N in range(2 * cutoff - 1):
        B = block(N)
        js = [j for j in range(N + 1) if j < cutoff and N - j < cutoff]
        for jo in js:
            U[jo, N - jo, js, [N - j for j in js]] = B[jo, js]
    return FockOperator(cutoff, 2, U.reshape(cutoff**2, cutoff**2))


@lru_cache(maxsize=4096)
def _bs_block(theta: float, N: int) -> np.ndarray:
    """``exp(theta (a^dag b - a b^dag))`` on the span of ``|j, N-j>``, j = 0..N."""
    j = np.arange(N)
    el = np.sqrt((j + 1) * (N - j)).astype(float)
    G = np.zeros((N + 1, N + 1))
    G[j + 1, j] = theta * el
    G[j, j + 1] = -theta * el
    B = expm(G)
    B.setflags(write=False)
    return B


# ----------------------------------------------------------------------------
# sector representation


@dataclass(frozen=True)
class SectorState:
    """Two-mode density operator restricted to ``n1, n2 < cutoff``.

    ``blocks[d]`` is the matrix of ``rho`` on states ``|k + max(d,0), k + max(-d,0)>``
    with ``k = 0, 1, ...``; blocks with different ``d`` do not couple.

    Attributes
    ----------
    tail : float
        Probability mass discarded by truncation (an upper estimate).
    """

    cutoff: int
    blocks: dict
    tail: float = 0.0

    @staticmethod
    def labels(d: int, size: int) -> tuple[np.ndarray, np.ndarray]:
        k = np.arange(size)
        return k + max(d, 0), k + max(-d, 0)

    def trace(self) -> float:
        return float(sum(np.trace(B).real for B in self.blocks.values()))

    def normalized(self) -> "SectorState":
        tr = self.trace()
        return SectorState(self.cutoff, {d: B / tr for d, B in self.blocks.items()}, self.tail)

    def number_distribution(self) -> np.ndarray:
        """``P[n1, n2]`` on the truncated grid."""
        P = np.zeros((self.cutoff, self.cutoff))
        for d, B in self.blocks.items():
            n1, n2 = self.labels(d, B.shape[0])
            P[n1, n2] = B.diagonal().real
        return P

    def to_dense(self) -> FockOperator:
        N = self.cutoff
        rho = np.zeros((N, N, N, N), dtype=complex)
        for d, B in self.blocks.items():
            n1, n2 = self.labels(d, B.shape[0])
            rho[n1[:, None], n2[:, None], n1[None, :], n2[None, :]] = B
        return FockOperator(N, 2, rho.reshape(N * N, N * N))


def _sector_size(d: int, cutoff: int) -> int:
    return cutoff - abs(d)


@lru_cache(maxsize=16)
def tmst_sectors(r: float, n_th: float, cutoff: int = DEFAULT_CUTOFF,
                 eps: float = TAIL_EPS, check: bool = True) -> SectorState:
    """``S(r) (rho_th x rho_th) S(r)^dag`` in sector form.

    Raises
    ------
    TailTooLarge
        If the mass lost to truncation exceeds ``eps`` and ``check`` is set.
    """
    if n_th < 0:
        raise DomainError(f"thermal occupancy must be non-negative, got {n_th}")
    work = cutoff + GUARD
    p = _thermal_weights(n_th, work)
    blocks = {}
    for d in range(-(cutoff - 1), cutoff):
        size = _sector_size(d, work)
        k = np.arange(size - 1)
        el = r * np.sqrt((k + abs(d) + 1.0) * (k + 1.0))
        G = np.zeros((size, size))
        G[k + 1, k] = el
        G[k, k + 1] = -el
        C = expm(G)
        n1, n2 = SectorState.labels(d, size)
        w = p[n1] * p[n2]
        keep = _sector_size(d, cutoff)
        Ck = C[:keep]
        B = (Ck * w) @ Ck.T
        blocks[d] = B
    state = SectorState(cutoff, blocks)
    tail = max(0.0, 1.0 - state.trace())
    state = SectorState(cutoff, blocks, tail)
    if check and tail > eps:
        raise TailTooLarge(f"TMST tail {tail:.3g} at cutoff {cutoff} (r={r}, n_th={n_th})")
    return state


def herald(state: SectorState, tau: float, m: int, n: int,
           min_prob: float = 1e-14) -> tuple[SectorState, float]:
    """Mix mode 2 with ``|m>`` on a beam splitter and project the ancilla onto ``|n>``.

    Returns
    -------
    (SectorState, float)
        Normalized conditional state and the heralding probability.
    """
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {tau}")
    if m < 0 or n < 0:
        raise DomainError("photon numbers must be non-negative")
    N = state.cutoff
    shift = m - n
    c = _kraus(tau, m, n, N)
    blocks = {}
    for d, B in state.blocks.items():
        n1, n2 = SectorState.labels(d, B.shape[0])
        m2 = n2 + shift
        ok = (m2 >= 0) & (m2 < N)
        if not ok.any():
            continue
        amp = c[n2[ok]]
        Bn = B[np.ix_(ok, ok)] * np.outer(amp, amp)
        dn = d - shift
        if abs(dn) >= N:
            continue
        # new labels are a contiguous run starting at min(n1, m2)
        start = int(min(n1[ok][0], m2[ok][0]))
        size = _sector_size(dn, N)
        full = np.zeros((size, size))
        stop = min(start + Bn.shape[0], size)
        full[start:stop, start:stop] = Bn[: stop - start, : stop - start]
        blocks[dn] = blocks.get(dn, 0) + full
    out = SectorState(N, blocks, state.tail)
    prob = out.trace()
    if prob < min_prob:
        raise NegligibleProbability(f"heralding probability {prob:.3g}")
    return out.normalized(), prob


def _kraus(tau: float, m: int, n: int, cutoff: int) -> np.ndarray:
    """``c[k] = <k + m - n, n| U_BS |k, m>``: the heralding map on mode 2."""
    theta = math.acos(math.sqrt(tau))
    c = np.zeros(cutoff)
    for k in range(cutoff):
        ko = k + m - n
        if ko >= 0:
            c[k] = _bs_block(theta, k + m)[ko, k]
    return c


def herald_probability(state: SectorState, tau: float, m: int, n: int) -> float:
    """Heralding probability alone; needs only the photon-number distribution."""
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {tau}")
    N = state.cutoff
    c2 = _kraus(tau, m, n, N) ** 2
    k = np.arange(N)
    # outcomes pushed beyond the cutoff by the shift are dropped, as in herald
    c2[(k + m - n) >= N] = 0.0
    return float(state.number_distribution().sum(axis=0) @ c2)


def parity_after_mzi(state: SectorState, theta: float) -> float:
    """``Tr[U rho U^dag (1 x (-1)^n2)]`` with ``U = exp(-i theta J2)``.

    Both ``U`` and the parity conserve total photon number, and within a block of
    fixed total number the state is diagonal, so only ``P[n1, n2]`` enters.
    """
    P = state.number_distribution()
    cut = state.cutoff
    total = 0.0
    for Ntot in range(2 * cut - 1):
        lo, hi = max(0, Ntot - cut + 1), min(Ntot, cut - 1)
        n1 = np.arange(lo, hi + 1)
        w = P[n1, Ntot - n1]
        if not w.any():
            continue
        B = _bs_block(-theta / 2, Ntot)
        sign = (-1.0) ** (Ntot - np.arange(Ntot + 1))
        total += float(w @ (sign @ np.abs(B[:, n1]) ** 2))
    return total


def displacement(beta: complex, cutoff: int) -> np.ndarray:
    """Truncated ``D(beta)``, exponentiated on a padded space and cropped."""
    big = cutoff + GUARD
    a = annihilation(big)
    return expm(beta * a.T - np.conj(beta) * a)[:cutoff, :cutoff]


def wigner_point(state: SectorState, xi) -> float:
    """Two-mode Wigner function as a displaced-parity average at ``xi = (q1, p1, q2, p2)``."""
    q1, p1, q2, p2 = np.asarray(xi, dtype=float)
    N = state.cutoff
    parity = (-1.0) ** np.arange(N)
    A1 = displacement(math.sqrt(2) * complex(q1, p1), N) * parity
    A2 = displacement(math.sqrt(2) * complex(q2, p2), N) * parity
    total = 0j
    for d, B in state.blocks.items():
        n1, n2 = SectorState.labels(d, B.shape[0])
        # Tr[rho (A1 x A2)] = sum rho[(a,b),(c,e)] A1[c,a] A2[e,b]
        K = A1[np.ix_(n1, n1)] * A2[np.ix_(n2, n2)]
        total += np.sum(B * K.T)
    return float(total.real) / math.pi**2
