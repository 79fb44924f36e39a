"""Long-range fanout and QFT protocol synthesis, simulation, and analysis.

Subpackage map: ``lattice`` (geometry and qubit placement), ``schedule``
(pulses, layers, makespans), ``protocols`` (broadcast/fanout planners),
``simulator`` (dense state-vector engine), ``qft`` (exact/approximate
transforms), ``spreading`` (Pauli-weight analysis), ``bounds`` (scaling
regimes and fits), ``cli`` (experiment runner).

The hot numeric loops live in the compiled ``_core`` extension with a numpy
fallback (``kernels.COMPILED`` reports which one is active).
"""
from . import bounds, kernels, lattice, protocols, qft, schedule, simulator, spreading

__version__ = "0.1.0"

__all__ = [
    "bounds",
    "kernels",
    "lattice",
    "protocols",
    "qft",
    "schedule",
    "simulator",
    "spreading",
    "__version__",
]
