"""Phase sensitivity of parity-detection interferometers fed with heralded
non-Gaussian two-mode squeezed thermal states.

Closed forms live in :mod:`ngtmst.ngstate` and :mod:`ngtmst.interferometer`; an
independent truncated-Fock reference is in :mod:`ngtmst.oracle`.
"""

from .engine import DerivOrder, QuadExp, deriv_extract, hermite_2var, laguerre
from .errors import (ConfigError, DomainError, NegligibleProbability, NGTMSTError,
                     NoMinimumInRange, OrderTooLarge, SingularCovariance, TailTooLarge)
from .gaussian import (GaussianState, SymplecticTransform, apply, beamsplitter, fock_wigner,
                       mzi_transform, tmst_state, two_mode_squeezer, wigner_gaussian)
from .interferometer import (PhaseSensitivityRecord, find_optimal_squeezing, merit_thermal,
                             merit_vacuum, parity_expectation, parity_expectation_tmst,
                             phase_uncertainty, phase_uncertainty_tmst)
from .ngstate import (CoefficientSet, NGParams, OpKind, coefficients_parity,
                      coefficients_probability, coefficients_wigner, success_probability,
                      wigner_normalized, wigner_unnormalized)

__version__ = "0.1.0"
