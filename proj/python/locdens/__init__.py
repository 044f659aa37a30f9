"""Local estimation of densities, log-densities and their first two derivatives."""

from ._locdens import (
    Kernel,
    LocdensError,
    TestDensity,
    __version__,
    apply_J,
    bias_constants,
    estimate,
    expected_estimate,
    invert_J,
    moment_triple,
    sylvester_solve,
)

__all__ = [
    "Kernel",
    "LocdensError",
    "TestDensity",
    "__version__",
    "apply_J",
    "bias_constants",
    "estimate",
    "expected_estimate",
    "invert_J",
    "moment_triple",
    "sylvester_solve",
]
