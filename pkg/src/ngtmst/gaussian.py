"""Two-mode Gaussian states and symplectic maps in the (q1, p1, q2, p2) ordering.

Conventions: hbar = 1, vacuum covariance ``I/2``, ``a = (q + i p)/sqrt(2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import laguerre
from .errors import DomainError, SingularCovariance

__all__ = [
    "OMEGA",
    "GaussianState",
    "SymplecticTransform",
    "symplectic_form",
    "two_mode_squeezer",
    "beamsplitter",
    "mzi_transform",
    "thermal_state",
    "tmst_state",
    "wigner_gaussian",
    "fock_wigner",
    "apply",
]

_Z = np.diag([1.0, -1.0])
_I2 = np.eye(2)


def symplectic_form(modes: int = 2) -> np.ndarray:
    """Block-diagonal symplectic form with ``omega = [[0, 1], [-1, 0]]`` per mode."""
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(modes), omega)


OMEGA = symplectic_form(2)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class GaussianState:
    """Zero- or finite-mean two-mode Gaussian state.

    Attributes
    ----------
    d : ndarray, shape (4,)
        Quadrature means.
    V : ndarray, shape (4, 4)
        Covariance matrix ``V_ij = <{dxi_i, dxi_j}>/2``.
    """

    d: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        d = _frozen(self.d).reshape(-1)
        V = _frozen(self.V)
        if V.shape != (d.size, d.size):
            raise DomainError(f"shape mismatch: d{d.shape} vs V{V.shape}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "V", V)

    @property
    def modes(self) -> int:
        return self.d.size // 2

    def uncertainty_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of ``V + i Omega / 2``; all non-negative for a physical state."""
        return np.linalg.eigvalsh(self.V + 0.5j * symplectic_form(self.modes))


@dataclass(frozen=True)
class SymplecticTransform:
    """Linear phase-space map ``xi -> S xi``."""

    S: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "S", _frozen(self.S))

    def __matmul__(self, other: "SymplecticTransform") -> "SymplecticTransform":
        return SymplecticTransform(self.S @ other.S)

    def inverse(self) -> "SymplecticTransform":
        # S^-1 = -Omega S^T Omega for symplectic S
        om = symplectic_form(self.S.shape[0] // 2)
        return SymplecticTransform(-om @ self.S.T @ om)

    def symplectic_residual(self) -> float:
        om = symplectic_form(self.S.shape[0] // 2)
        return float(np.abs(self.S @ om @ self.S.T - om).max())


def two_mode_squeezer(r: float) -> SymplecticTransform:
    """Two-mode squeezer ``[[cosh r I, sinh r Z], [sinh r Z, cosh r I]]``."""
    ch, sh = np.cosh(r), np.sinh(r)
    return SymplecticTransform(np.block([[ch * _I2, sh * _Z], [sh * _Z, ch * _I2]]))


def beamsplitter(tau: float) -> SymplecticTransform:
    """Beam splitter of transmissivity ``tau`` acting on two modes."""
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {tau}")
    t, r = np.sqrt(tau), np.sqrt(1.0 - tau)
    return SymplecticTransform(np.block([[t * _I2, r * _I2], [-r * _I2, t * _I2]]))


def mzi_transform(phi: float) -> SymplecticTransform:
    """Lossless Mach-Zehnder interferometer, the image of ``exp(-i phi J2)``."""
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return SymplecticTransform(np.block([[c * _I2, -s * _I2], [s * _I2, c * _I2]]))


def thermal_state(n_th: float, modes: int = 2) -> GaussianState:
    """Product of identical thermal modes with mean photon number ``n_th``."""
    if n_th < 0:
        raise DomainError(f"thermal occupancy must be non-negative, got {n_th}")
    return GaussianState(np.zeros(2 * modes), (n_th + 0.5) * np.eye(2 * modes))


def tmst_state(r: float, n_th: float) -> GaussianState:
    """Two-mode squeezed thermal state; ``n_th = 0`` gives the squeezed vacuum."""
    return apply(two_mode_squeezer(r), thermal_state(n_th))


def apply(S: SymplecticTransform, state: GaussianState) -> GaussianState:
    """Evolve ``state`` under ``S``: ``d -> S d``, ``V -> S V S^T``."""
    return GaussianState(S.S @ state.d, S.S @ state.V @ S.S.T)


def wigner_gaussian(state: GaussianState, xi) -> np.ndarray:
    """Wigner function of a Gaussian state; ``xi`` may carry leading batch axes."""
    V = state.V
    det = np.linalg.det(V)
    if not det > 0:
        raise SingularCovariance(f"det V = {det}")
    xi = np.asarray(xi, dtype=float)
    x = xi - state.d
    Vinv = np.linalg.inv(V)
    quad = np.einsum("...i,ij,...j->...", x, Vinv, x)
    n = state.modes
    return np.exp(-0.5 * quad) / ((2 * np.pi) ** n * np.sqrt(det))


def fock_wigner(n: int, q, p):
    """Wigner function of the Fock state |n> at (q, p)."""
    if n < 0:
        raise DomainError(f"photon number must be non-negative, got {n}")
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    rho2 = q * q + p * p
    lag = np.vectorize(lambda x: laguerre(n, x), otypes=[float])(2 * rho2)
    out = (-1) ** n / np.pi * np.exp(-rho2) * lag
    return out if out.ndim else float(out)
