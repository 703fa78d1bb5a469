"""Numerical laboratory for the dilute A2(2) loop model on a strip.

The package is organised around the dilute Temperley-Lieb algebra dTL_N(beta)
(`dtl`), the trigonometric weight functions of the model (`coeffs`), local
face/boundary operators and their diagrammatic identities (`local_ops`), the
double-row transfer matrix (`transfer`), the fused hierarchy with its
determinant forms and braid limits (`fusion`), functional relations --
T-system, Y-system and root-of-unity closures (`funrel`) -- and spectra /
free energies (`spectra`).  `cli` exposes everything as a command line tool.
"""

from .coeffs import ModelParams, RootOfUnity, lambda_ab
from .dtl import (
    AlgebraElement,
    Connectivity,
    LinkState,
    Representation,
    enumerate_connectivities,
    identity_element,
    regular_representation,
    standard_module,
)

__all__ = [
    "ModelParams",
    "RootOfUnity",
    "lambda_ab",
    "AlgebraElement",
    "Connectivity",
    "LinkState",
    "Representation",
    "enumerate_connectivities",
    "identity_element",
    "regular_representation",
    "standard_module",
]

__version__ = "0.1.0"
