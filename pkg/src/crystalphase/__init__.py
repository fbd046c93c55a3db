"""Exact classification of symmorphic crystalline phases, with lattice numerics.

The package has two halves that check each other.  The algebraic half
(:mod:`crystalphase.exactlinalg`, :mod:`crystalphase.crystal`,
:mod:`crystalphase.cohomology`) computes classification groups exactly over
the integers.  The numerical half (:mod:`crystalphase.manybody`,
:mod:`crystalphase.berry`) builds finite-size interacting lattice models and
measures the quantized invariants the classification predicts.
"""

from crystalphase.exactlinalg import (
    FinAbGroup,
    IntMatrix,
    SmithForm,
    cokernel,
    exterior_power_matrix,
    kernel_basis,
    smith_normal_form,
)

__version__ = "0.1.0"

__all__ = [
    "FinAbGroup",
    "IntMatrix",
    "SmithForm",
    "cokernel",
    "exterior_power_matrix",
    "kernel_basis",
    "smith_normal_form",
    "__version__",
]
