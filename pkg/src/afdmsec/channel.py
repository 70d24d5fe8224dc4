"""Doubly dispersive LTV channel in matrix form, plus a time-domain oracle.

The post-CPP channel matrix is

    H = sum_p h_p * G_p * D^(nu_p) * Pi^(l_p)

with Pi the forward cyclic shift, D^nu = diag(exp(-j*2*pi*nu*n/N)) applied at
the receive sample index, and G_p the diagonal that models the chirp-periodic
prefix: entries exp(-j*2*pi*c1*(N^2 - 2*N*(l_p - n))) for n < l_p, else 1.

The Doppler phase reference is anchored so sample 0 of the post-CPP block
carries phase 0 (the n = 0 entry of D^nu). With that convention, removing the
prefix from a direct tapped-delay-line propagation of the extended frame
reproduces H exactly, for fractional Doppler included; the taps-after-shift
ordering differs from writing the shift last only by a constant per-path
phase, which the random tap coefficient absorbs.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._cycles import reduce_mod
from .errors import ConfigurationError
from .modem import AfdmParams

FIXED_MAGNITUDE = "fixed-magnitude-random-phase"
COMPLEX_GAUSSIAN = "complex-gaussian"


@dataclass(frozen=True)
class ChannelProfile:
    """Statistical tap description: powers, integer delays, Doppler shifts.

    Powers are normalized to sum to one; dopplers are in cycles across the
    N-sample block (fractional allowed) and bounded by nu_max.
    """

    powers: tuple
    delays: tuple
    dopplers: tuple
    nu_max: float
    coefficient_model: str = FIXED_MAGNITUDE

    def __post_init__(self):
        p = np.asarray(self.powers, dtype=np.float64)
        l = np.asarray(self.delays)
        nu = np.asarray(self.dopplers, dtype=np.float64)
        if not (len(p) == len(l) == len(nu)):
            raise ConfigurationError("powers, delays, dopplers must have equal length")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ConfigurationError(f"tap powers must sum to 1, got {p.sum()!r}")
        if np.any(p <= 0):
            raise ConfigurationError("tap powers must be positive")
        if np.any(l < 0):
            raise ConfigurationError("delays must be non-negative")
        if len(l) > 1 and np.any(np.diff(l) <= 0):
            raise ConfigurationError("delays must be strictly sorted")
        if np.any(l != l.astype(int)):
            raise ConfigurationError("delays must be integers (sample units)")
        if np.any(np.abs(nu) > self.nu_max):
            raise ConfigurationError("|doppler| must not exceed nu_max")
        if self.coefficient_model not in (FIXED_MAGNITUDE, COMPLEX_GAUSSIAN):
            raise ConfigurationError(
                f"unknown coefficient model {self.coefficient_model!r}"
            )
        object.__setattr__(self, "powers", tuple(float(v) for v in p))
        object.__setattr__(self, "delays", tuple(int(v) for v in l))
        object.__setattr__(self, "dopplers", tuple(float(v) for v in nu))

    @property
    def num_paths(self) -> int:
        return len(self.powers)

    @property
    def max_delay(self) -> int:
        return max(self.delays)

    def to_dict(self) -> dict:
        return {
            "powers": list(self.powers),
            "delays": list(self.delays),
            "dopplers": list(self.dopplers),
            "nu_max": self.nu_max,
            "coefficient_model": self.coefficient_model,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelProfile":
        d = dict(d)
        for key in ("powers", "delays", "dopplers"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def paper_profile(coefficient_model: str = FIXED_MAGNITUDE) -> ChannelProfile:
    """The four-tap LTV benchmark profile used throughout the experiments."""
    return ChannelProfile(
        powers=(0.1941, 0.4056, 0.2388, 0.1615),
        delays=(0, 1, 2, 3),
        dopplers=(0.0, -0.3, 0.8, 3.0),
        nu_max=3.0,
        coefficient_model=coefficient_model,
    )


@dataclass(frozen=True)
class ChannelRealization:
    """One drawn tap set: complex gains with their delays and Dopplers."""

    gains: tuple
    delays: tuple
    dopplers: tuple

    @property
    def taps(self):
        return tuple(zip(self.gains, self.delays, self.dopplers))


def draw_realization(profile: ChannelProfile, rng: np.random.Generator) -> ChannelRealization:
    """Draw tap coefficients; deterministic in the generator state."""
    p = np.asarray(profile.powers)
    if profile.coefficient_model == FIXED_MAGNITUDE:
        theta = rng.uniform(0.0, 2.0 * np.pi, size=len(p))
        h = np.sqrt(p) * np.exp(1j * theta)
    else:
        g = rng.standard_normal((2, len(p)))
        h = np.sqrt(p / 2.0) * (g[0] + 1j * g[1])
    return ChannelRealization(
        gains=tuple(complex(v) for v in h),
        delays=profile.delays,
        dopplers=profile.dopplers,
    )


def _cpp_correction(c1: float, n: int, l: int) -> np.ndarray:
    """Diagonal modeling the prefix effect for a path of delay l."""
    gamma = np.ones(n, dtype=np.complex128)
    if l > 0:
        cyc = [reduce_mod(c1, n * n - 2 * n * (l - k), 1) for k in range(l)]
        gamma[:l] = np.exp(-2j * np.pi * np.asarray(cyc))
    return gamma


def build_channel_matrix(real: ChannelRealization, params: AfdmParams) -> np.ndarray:
    """Post-CPP N x N channel matrix for one realization."""
    n = params.n
    rows = np.arange(n)
    h_mat = np.zeros((n, n), dtype=np.complex128)
    for h, l, nu in real.taps:
        if l > params.cpp_len:
            raise ConfigurationError(
                f"path delay {l} exceeds cpp_len {params.cpp_len}"
            )
        gamma = _cpp_correction(params.c1, n, l)
        doppler = np.exp(-2j * np.pi * nu * rows / n)
        h_mat[rows, (rows - l) % n] += h * gamma * doppler
    return h_mat


def apply_channel(h_mat: np.ndarray, s: np.ndarray, snr_db: float,
                  rng: np.random.Generator) -> np.ndarray:
    """r = H s + w with per-sample noise variance 10**(-snr_db/10).

    Unit signal-energy convention: unit-energy constellation and unit total
    tap power, so SNR is per-sample Es/sigma^2. snr_db = +inf disables noise.
    """
    r = h_mat @ np.asarray(s, dtype=np.complex128)
    if math.isinf(snr_db):
        return r
    sigma = math.sqrt(10.0 ** (-snr_db / 10.0))
    g = rng.standard_normal((2, len(r)))
    return r + sigma * (g[0] + 1j * g[1]) / np.sqrt(2.0)


def propagate_time_domain(real: ChannelRealization, s_cpp: np.ndarray,
                          params: AfdmParams) -> np.ndarray:
    """Direct tapped-delay-line oracle over the CPP-extended frame.

    output[n] = sum_p h_p * exp(-j*2*pi*nu_p*(n - L)/N) * s_cpp[n - l_p],
    out-of-range inputs zero. After remove_cpp this equals H s from
    build_channel_matrix to numerical precision (the module's central
    equivalence, asserted by test).
    """
    s_cpp = np.asarray(s_cpp, dtype=np.complex128)
    total = len(s_cpp)
    n, L = params.n, params.cpp_len
    idx = np.arange(total)
    out = np.zeros(total, dtype=np.complex128)
    for h, l, nu in real.taps:
        shifted = np.zeros(total, dtype=np.complex128)
        if l == 0:
            shifted[:] = s_cpp
        else:
            shifted[l:] = s_cpp[:-l]
        out += h * np.exp(-2j * np.pi * nu * (idx - L) / n) * shifted
    return out
