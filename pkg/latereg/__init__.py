"""latereg: ideals whose regularity appears late in the resolution."""

__version__ = "0.1.0"

from latereg.arith import Polynomial, RingContext
from latereg.construct import (
    JmCertificate,
    ModuleInput,
    PureModuleSpec,
    build_jm,
    pure_module,
    scan,
    verify,
)
from latereg.freemod import Complex, GradedFreeModule, GradedMatrix, ModuleElement
from latereg.groebner import GroebnerBasis, ModuleOrder, buchberger
from latereg.resolution import BettiTable, betti_table, free_resolution, minimize, resolve

__all__ = [
    "BettiTable",
    "Complex",
    "GradedFreeModule",
    "GradedMatrix",
    "GroebnerBasis",
    "JmCertificate",
    "ModuleElement",
    "ModuleInput",
    "ModuleOrder",
    "Polynomial",
    "PureModuleSpec",
    "RingContext",
    "betti_table",
    "buchberger",
    "build_jm",
    "free_resolution",
    "minimize",
    "pure_module",
    "resolve",
    "scan",
    "verify",
]
