"""
kmeis: exact root systems and Weyl groups of symmetrizable Kac-Moody
algebras, with high-precision evaluation of the Weyl-group series attached
to Borel Eisenstein series.
"""
import sys

from kmeis.cartan import CartanMatrix, is_finite_type, validate_gcm
from kmeis.errors import KacMoodyError
from kmeis.lattice import RootSystem, RootVector, WeightVector
from kmeis.special import PrecisionContext
from kmeis.weyl import WeylElement, WeylGroup

__all__ = [
    "CartanMatrix",
    "KacMoodyError",
    "PrecisionContext",
    "RootSystem",
    "RootVector",
    "WeightVector",
    "WeylElement",
    "WeylGroup",
    "is_finite_type",
    "validate_gcm",
    "main",
]


def main() -> None:
    from kmeis.cli import main as cli_main

    sys.exit(cli_main())
