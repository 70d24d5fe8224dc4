"""Exact reduction of chirp phase arguments.

Phases are tracked in cycles (units of 2*pi radians). Steep phase laws produce
cycle counts far beyond 2^53 (e.g. c2*m^b with b = 10 and m = 63 is ~1e17), so
reducing them in double precision destroys the phase long before the complex
exponential is taken. A binary float is an exact rational, and the phase
arguments of interest are float coefficients times exact integers, so the
residue can be computed exactly with `fractions.Fraction`; only the final
residue is rounded back to float.
"""

from fractions import Fraction


def reduce_mod(coeff: float, factor: int, modulus: int, offset: float = 0.0) -> float:
    """((coeff + offset) * factor) mod modulus, reduced in exact rational arithmetic.

    `coeff` and `offset` are binary floats (exact rationals); `factor` is an
    arbitrary-precision integer. The offset is added before the multiply so
    that perturbations far below the float resolution of `coeff` survive.
    """
    q = Fraction(coeff)
    if offset != 0.0:
        q += Fraction(offset)
    return float((q * factor) % modulus)


def is_nonneg_int(x: float) -> bool:
    return x >= 0 and float(x) == int(x)
