"""Signaling problem for the heat equation with memory.

Kernels, characteristic symbol and front jet, Laplace inversion, a
time-domain solver, the exact telegraph solution and front measurements.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    FitError,
    GPMemoryError,
    GridError,
    InfiniteSpeedKernel,
    NoFront,
    ParseError,
    ValidationError,
)
from .kernels import (  # noqa: E402
    AbelKernel,
    ConstantKernel,
    ExponentialKernel,
    PowerLawKernel,
    SampledKernel,
    asymptotic_coeffs,
    eval_laplace,
    eval_time,
)
from .signals import Delta, MollifiedDelta, SampledSignal, mollify_delta  # noqa: E402
from .symbol import Finite, Infinite, classify_speed, front_jet, phi, symbol_expansion  # noqa: E402
from .laplace_inversion import InversionParams, invert, theta_hat  # noqa: E402
from .timedomain import Field, Grid, solve  # noqa: E402
from .telegraph import TelegraphParams, telegraph_mollified, telegraph_regular_part  # noqa: E402
from .front_analysis import analyze, detect_front, fit_front, plateau_level  # noqa: E402
from .config import ExperimentConfig, parse_kernel_spec, run_preset  # noqa: E402
