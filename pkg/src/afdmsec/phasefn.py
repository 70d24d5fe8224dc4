"""Chirp phase laws f(c2, m), their derivatives, and the diagonals they induce.

Two families are provided. The conventional quadratic law

    f(c2, m) = c2 * m**2

and a cosine-modulated family with exponents (a, b) and scale kappa

    f(c2, m) = kappa * m**a * cos(pi * c2 * m**b)

whose sensitivity to c2 grows like m**(a+b), which is what makes it useful
for hardening the waveform against parameter search.

All phases are in cycles. For integer b the cosine argument c2 * m**b is
reduced modulo 2 in exact rational arithmetic before the trig call, so the
family stays accurate for arbitrarily steep laws (b = 10 reaches ~1e17
cycles, far past double precision). Mismatch offsets in c2 are applied inside
that exact reduction, so offsets much smaller than the float resolution of c2
itself (needed when probing steep laws) are honored exactly. Non-integer b is
supported but reduced in plain float arithmetic, which limits accuracy once
c2 * m**b grows past ~1e12.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._cycles import is_nonneg_int, reduce_mod
from .errors import ConfigurationError, UnsupportedOperationError

CONVENTIONAL = "conventional"
COSINE_FAMILY = "cosine"

MODULATE = "modulate"
DEMODULATE = "demodulate"

DEFAULT_KAPPA = math.sqrt(2.0) - 1.0


@dataclass(frozen=True)
class PhaseFunction:
    """Chirp phase law with its parameters.

    kappa, a, b are ignored by the conventional kind, which always computes
    c2 * m**2. The stored c2 must lie in (0, 1], the effective search range;
    mismatched evaluations beyond that range go through the offset arguments
    of the evaluation functions rather than through this field.
    """

    kind: str
    c2: float
    kappa: float = DEFAULT_KAPPA
    a: float = 2.0
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in (CONVENTIONAL, COSINE_FAMILY):
            raise ConfigurationError(f"unknown phase kind {self.kind!r}")
        if not 0.0 < self.c2 <= 1.0:
            raise ConfigurationError(f"c2 must be in (0, 1], got {self.c2}")
        if self.b < 0:
            raise ConfigurationError(f"b must be >= 0, got {self.b}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "c2": self.c2, "kappa": self.kappa,
                "a": self.a, "b": self.b}

    @classmethod
    def from_dict(cls, d: dict) -> "PhaseFunction":
        return cls(**d)


def conventional(c2: float) -> PhaseFunction:
    return PhaseFunction(kind=CONVENTIONAL, c2=c2)


def cosine_family(c2: float, kappa: float = DEFAULT_KAPPA, a: float = 2.0,
                  b: float = 1.0) -> PhaseFunction:
    return PhaseFunction(kind=COSINE_FAMILY, c2=c2, kappa=kappa, a=a, b=b)


def _pow(m: int, p: float) -> float:
    # exact integer power when the exponent is a non-negative integer
    if is_nonneg_int(p):
        return float(m ** int(p))
    return float(m) ** p


def _sinpi(u: float) -> float:
    """sin(pi*u) for u in [0, 2), exact at the representable zeros u = 0, 1.

    The argument reduction made u an exact residue, so the zeros of the
    derivative (the degenerate operating points) are detected exactly
    instead of evaluating to sin(pi) ~ 1e-16.
    """
    if u >= 1.0:
        return -_sinpi(u - 1.0)
    if u == 0.0:
        return 0.0
    if u > 0.5:
        u = 1.0 - u
    return math.sin(math.pi * u)


def _cospi(u: float) -> float:
    """cos(pi*u) for u in [0, 2), exact at the zeros u = 0.5, 1.5."""
    return _sinpi((u + 0.5) % 2.0)


def _cos_arg_mod2(c2: float, m: int, b: float, c2_offset: float) -> float:
    """(c2 + offset) * m**b reduced modulo 2; exact for integer b."""
    if m == 0:
        return 0.0
    if is_nonneg_int(b):
        return reduce_mod(c2, m ** int(b), 2, offset=c2_offset)
    return math.fmod((c2 + c2_offset) * float(m) ** b, 2.0)


def f_eval(phase: PhaseFunction, m: int, *, c2_offset: float = 0.0,
           kappa_offset: float = 0.0) -> float:
    """Phase f(c2 + c2_offset, m) in cycles."""
    if phase.kind == CONVENTIONAL:
        return (phase.c2 + c2_offset) * (m * m)
    u = _cos_arg_mod2(phase.c2, m, phase.b, c2_offset)
    return (phase.kappa + kappa_offset) * _pow(m, phase.a) * _cospi(u)


def df_dc2(phase: PhaseFunction, m: int, *, c2_offset: float = 0.0,
           kappa_offset: float = 0.0) -> float:
    """Signed first derivative of f with respect to c2; callers take |.|."""
    if phase.kind == CONVENTIONAL:
        return float(m * m)
    if m == 0:
        return 0.0
    u = _cos_arg_mod2(phase.c2, m, phase.b, c2_offset)
    return (-(phase.kappa + kappa_offset) * math.pi * _pow(m, phase.a + phase.b)
            * _sinpi(u))


def df_dkappa(phase: PhaseFunction, m: int, *, c2_offset: float = 0.0) -> float:
    """First derivative of f with respect to kappa (cosine family only)."""
    if phase.kind != COSINE_FAMILY:
        raise UnsupportedOperationError(
            "kappa derivative is undefined for the conventional phase law"
        )
    if m == 0:
        return 0.0
    u = _cos_arg_mod2(phase.c2, m, phase.b, c2_offset)
    return _pow(m, phase.a) * _cospi(u)


def _cycles_mod1(phase: PhaseFunction, n: int, c2_offset: float,
                 kappa_offset: float) -> np.ndarray:
    """f(c2 + offset, m) mod 1 for m = 0..n-1, keeping the reduction exact
    where the representation allows it."""
    if phase.kind == CONVENTIONAL:
        return np.array(
            [reduce_mod(phase.c2, m * m, 1, offset=c2_offset) for m in range(n)]
        )
    vals = [f_eval(phase, m, c2_offset=c2_offset, kappa_offset=kappa_offset)
            for m in range(n)]
    return np.asarray(vals, dtype=np.float64) % 1.0


def phase_cycles(phase: PhaseFunction, n: int, *, c2_offset: float = 0.0,
                 kappa_offset: float = 0.0) -> np.ndarray:
    """Unreduced f values for m = 0..n-1, in cycles."""
    return np.array(
        [f_eval(phase, m, c2_offset=c2_offset, kappa_offset=kappa_offset)
         for m in range(n)],
        dtype=np.float64,
    )


def phase_diag(phase: PhaseFunction, n: int, direction: str, *,
               c2_offset: float = 0.0, kappa_offset: float = 0.0) -> np.ndarray:
    """Diagonal entries of the phase chirp matrix.

    `modulate` gives exp(+j*2*pi*f(c2, m)) (the Hermitian-transposed diagonal
    the modulator applies), `demodulate` its conjugate.
    """
    sign = {MODULATE: 1.0, DEMODULATE: -1.0}[direction]
    cyc = _cycles_mod1(phase, n, c2_offset, kappa_offset)
    return np.exp(sign * 2j * np.pi * cyc)


def mismatch_rotation_diag(phase: PhaseFunction, n: int, *, c2_offset: float = 0.0,
                           kappa_offset: float = 0.0) -> np.ndarray:
    """Per-subcarrier rotation exp(j*2*pi*(f(c2,m) - f(c2+offset,m))).

    This is the exact factor a receiver mismatched by the given offsets sees
    on each demodulated symbol; with zero offsets it is exactly ones.
    """
    if c2_offset == 0.0 and kappa_offset == 0.0:
        return np.ones(n, dtype=np.complex128)
    if phase.kind == CONVENTIONAL:
        # f(c2) - f(c2 + d) = -d * m^2 exactly, so reduce the offset term alone
        diff = np.array([-reduce_mod(c2_offset, m * m, 1) for m in range(n)])
        return np.exp(2j * np.pi * diff)
    base = phase_cycles(phase, n)
    off = phase_cycles(phase, n, c2_offset=c2_offset, kappa_offset=kappa_offset)
    return np.exp(2j * np.pi * (base - off))
