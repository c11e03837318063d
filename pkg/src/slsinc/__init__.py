"""Cardinal-series machinery for one-dimensional Sturm-Liouville problems.

Forward solves, spectrum completion from a finite set of eigenvalues,
Weyl-function reconstruction from two spectra, and the two-spectra
inverse problem for complex potentials.
"""

from .core import (
    BoundaryCondition,
    OmegaConstants,
    Potential,
    SLProblem,
    Spectrum,
    add_noise,
    sqrt_lambda,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition",
    "OmegaConstants",
    "Potential",
    "SLProblem",
    "Spectrum",
    "add_noise",
    "sqrt_lambda",
    "__version__",
]
