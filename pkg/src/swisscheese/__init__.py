"""Truncated Swiss cheese sets and numerical checks of the derivation
``D(f)(g) = int_T f'(z) g(z) dz`` on ``R_0(X)``."""

from .derivation import D, DerivationCheckRecord
from .geometry import Disc, SwissCheese, certified_bound, generate_cheese, lemma21_sum, validate
from .quadrature import QuadratureSpec, circle_integral, pairing_T, residue_oracle_T
from .rational import RationalFunction, random_member

__version__ = "0.1.0"

__all__ = [
    "D",
    "DerivationCheckRecord",
    "Disc",
    "QuadratureSpec",
    "RationalFunction",
    "SwissCheese",
    "certified_bound",
    "circle_integral",
    "generate_cheese",
    "lemma21_sum",
    "pairing_T",
    "random_member",
    "residue_oracle_T",
    "validate",
]
