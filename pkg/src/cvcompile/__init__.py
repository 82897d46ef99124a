"""cvcompile: decompose continuous-variable quantum gates into a universal set.

Subpackages cover exact symbolic algebra over quadrature polynomials, a
circuit IR with gate-count accounting, exact Gaussian and non-Gaussian
compilers, an approximate commutator-expansion compiler, driven-Kerr frame
synthesis, and a truncated-Fock-space verification oracle.
"""

DEFAULT_HBAR = 2.0

from .algebra import (  # noqa: E402,F401
    Coeff,
    QuadPoly,
    commutator,
    mono,
    product_as_power_sum,
    rewrite_to_commutators,
    sym_xp,
)
from .circuit import Circuit, Gate, count_gates  # noqa: E402,F401
