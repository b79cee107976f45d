"""Exit times of Brownian motion from affine Weyl alcoves.

Closed-form survival probabilities, expected exit times, alcove
eigenfunctions, De Bruijn integral identities, and independent oracles
(image sums and Monte Carlo) to check them.
"""
from .errors import DomainError, UnsupportedFormulaError
from .rootsys import RootDatum
from .kernels1d import SeriesControl, phi, psi
from .exitprob import (SurvivalQuery, SurvivalResult, survival, survival_A, survival_B,
                       survival_C, survival_D, survival_G2, survival_images)
from .expected import expected_exit_A
from .montecarlo import SimConfig, mc_survival, mc_expected_exit

__version__ = "0.1.0"
