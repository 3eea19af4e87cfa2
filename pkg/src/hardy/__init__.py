"""Sharp fractional Hardy constants and numerical checks of Hardy inequalities
for Sobolev-Bregman forms on the half-space, intervals and convex bodies."""

import os as _os

# HARDY_THREADS caps the BLAS/OpenMP pools; it must be set before numpy loads
_threads = _os.environ.get("HARDY_THREADS")
if _threads and _threads.isdigit() and int(_threads) > 0:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .bodies import Ball, Box, ConvexBody, Interval, IntervalSet, Polytope, half_space, parse_body  # noqa: E402
from .bregman import bregman_f, bregman_naive, comparability_ratio, comparability_scan, signed_pow  # noqa: E402
from .convex import (  # noqa: E402
    ConvexAlphaError,
    PotentialSpec,
    directional_form,
    m_alpha,
    potential_limit,
    potential_v,
    verify_convex,
    verify_interval,
)
from .forms import EngineConfig  # noqa: E402
from .halfspace import (  # noqa: E402
    ExtremalSpec,
    decomposition_residual,
    extremal_sweep,
    extremal_u,
    form_ep,
    ground_state_residual,
    verify_halfspace,
    weighted_norm,
)
from .quadrature import DivergenceError, Estimate, QuadratureError  # noqa: E402
from .report import HardyReport  # noqa: E402
from .specfun import (  # noqa: E402
    DomainError,
    HardyParams,
    a_const,
    angular_factor,
    gamma_ab_closed,
    gamma_ab_quad,
    kappa,
    kappa_bd,
)

__version__ = "0.1.0"
