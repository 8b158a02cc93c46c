"""Rank-one rational Dunkl harmonic analysis.

Kernels, the Dunkl transform, Poisson and conjugate Poisson integrals,
Riesz transforms, and BMO / BMC / H^1 estimators on the line with the
reflection group Z_2.  ``dunklkit._backend.BACKEND`` names the kernel core
in use (compiled or numpy).
"""

from . import functions
from ._backend import BACKEND
from .dunkl_core import (MultiplicityConfig, ball_measure, dunkl_derivative, dunkl_kernel,
                         dunkl_kernel_i, weight)
from .errors import (DomainError, DunklkitError, FamilyOutsideGrid, FrequencyProjectionFailed,
                     GrowthConditionFailed, InvalidAtom, MeanNotZero, NonConvergence,
                     SingularPoint, TailBoundExceeded)
from .functions import Fn, parse_fn
from .poisson import (conjugate_kernel, conjugate_poisson_integral, kappa_gradient_poisson,
                      poisson_field, poisson_integral, poisson_kernel)
from .riesz import (phi0_example, regularized_riesz, riesz_image, riesz_kernel, riesz_pv,
                    riesz_transform_l2, truncated_riesz)
from .spaces import (BallFamily, NormReport, bmc_seminorm, bmo_norm, bmo_orbit_norm,
                     carleson_norm, clean_frequency, duality_residual, h1_norm, make_atom)
from .transform import Grid, SampledFunction, forward_transform, inverse_transform, sample

__version__ = "0.1.0"
