"""Quantum cluster variables by mutation and by finite-field Grassmannian counts.

The mutation engine (:mod:`qcluster.cluster`) produces exact Laurent
expansions in a quantum torus; :mod:`qcluster.cc` rebuilds the same elements
from counting polynomials of quiver Grassmannians and compares the two.
"""

from .cc import Verifier, assemble_F, assemble_X, check_specialized_at_prime, phi
from .cluster import (
    CompatiblePair,
    IceQuiver,
    Quiver,
    extract_g_and_F,
    load_quiver,
    pair_from_quiver,
    walk,
)
from .errors import (
    InputError,
    LaurentViolation,
    NotPolynomialCount,
    QClusterError,
    ResourceCeiling,
    RigiditySamplingError,
)
from .exact import IntPolyQ, LaurentV, gaussian_binomial
from .grass import counting_polynomial, refute_counting_polynomial
from .reps import QuiverRep, count_subreps, euler_form, hom_dim
from .torus import SkewForm, TorusElement

__version__ = "0.1.0"

__all__ = [
    "CompatiblePair", "IceQuiver", "InputError", "IntPolyQ", "LaurentV", "LaurentViolation",
    "NotPolynomialCount", "QClusterError", "Quiver", "QuiverRep", "ResourceCeiling",
    "RigiditySamplingError", "SkewForm", "TorusElement", "Verifier", "assemble_F", "assemble_X",
    "check_specialized_at_prime", "count_subreps", "counting_polynomial", "euler_form",
    "extract_g_and_F", "gaussian_binomial", "hom_dim", "load_quiver", "pair_from_quiver", "phi",
    "refute_counting_polynomial", "walk",
]
