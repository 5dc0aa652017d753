"""Exact central elements of U_q(g) (types A and D) and their Markov generators."""
from .cartan import CartanType, UnsupportedType, build_root_data
from .central import CentralElement, assemble_central, central_for, coefficient_report
from .qsym import QRat, parse_qrat
from .uqalg import Convention

__version__ = "0.1.0"

__all__ = [
    "CartanType",
    "UnsupportedType",
    "build_root_data",
    "CentralElement",
    "assemble_central",
    "central_for",
    "coefficient_report",
    "QRat",
    "parse_qrat",
    "Convention",
    "__version__",
]
