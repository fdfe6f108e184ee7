"""Exact computer algebra for Z2-graded Poisson structures.

Graded polynomial arithmetic, Schouten-bracket calculus on
multiderivations, codifferential and Maurer-Cartan checks, brute-force
bigraded Poisson cohomology, and closed-form cohomology for structures
on algebras of shape 0|1, 1|1 and 2|1.
"""

from .algebra import (
    EVEN,
    ODD,
    AlgebraSignature,
    GradedPolynomial,
    gcd_univariate,
    substitute_linear,
)
from .multiderivation import (
    LinearAutomorphism,
    MultiDerivation,
    apply_higher_automorphism,
    apply_linear_automorphism,
    coboundary,
    commutator_oracle,
    evaluate,
    is_codifferential,
    maurer_cartan_residual,
    modified_bracket,
    schouten_bracket,
)

__all__ = [
    "EVEN",
    "ODD",
    "AlgebraSignature",
    "GradedPolynomial",
    "MultiDerivation",
    "LinearAutomorphism",
    "gcd_univariate",
    "substitute_linear",
    "schouten_bracket",
    "modified_bracket",
    "evaluate",
    "commutator_oracle",
    "is_codifferential",
    "coboundary",
    "maurer_cartan_residual",
    "apply_linear_automorphism",
    "apply_higher_automorphism",
]

__version__ = "0.1.0"
