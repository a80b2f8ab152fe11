"""Discrete Dirac systems, block Toeplitz moments and their spectral theory.

Submodules: ``numkernel`` (dense Hermitian linear algebra), ``dirac``
(potentials and fundamental solutions), ``gbdt`` (explicit systems from
admissible triples), ``toeplitz`` (moments, ``S(N)`` and transfer functions),
``inverse`` (potential from moments), ``kernels`` (kernel analogs, Weyl disks),
``szego`` (spectral density, outer factor, limits), ``io`` and ``cli``.
"""

from .dirac import Potential, fundamental_solution, validate_potential
from .errors import DiracToeplitzError, NumericalError, ValidationError
from .gbdt import AdmissibleTriple, gbdt_iterate, gbdt_moments, gbdt_weyl, validate_triple
from .inverse import recover_potential, weyl_to_moments
from .kernels import eval_M, eval_R, weyl_disk
from .toeplitz import MomentData, assemble, semiseparable_matvec

__version__ = "0.1.0"

__all__ = [
    "AdmissibleTriple",
    "DiracToeplitzError",
    "MomentData",
    "NumericalError",
    "Potential",
    "ValidationError",
    "assemble",
    "eval_M",
    "eval_R",
    "fundamental_solution",
    "gbdt_iterate",
    "gbdt_moments",
    "gbdt_weyl",
    "recover_potential",
    "semiseparable_matvec",
    "validate_potential",
    "validate_triple",
    "weyl_disk",
    "weyl_to_moments",
]
