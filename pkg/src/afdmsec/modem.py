"""AFDM modulation/demodulation and the chirp-periodic prefix.

The modulation matrix is Q = L1^H F^H L2^H, where L1 = diag(exp(-j*2*pi*c1*n^2)),
L2 is the phase-law diagonal from `phasefn`, and F is the unitary DFT. Both an
explicit matrix path (for tests) and a diagonal-FFT-diagonal fast path (for
Monte Carlo throughput) are provided; their agreement is a standing test.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._cycles import reduce_mod
from .errors import ConfigurationError, InputShapeError
from .phasefn import DEMODULATE, MODULATE, PhaseFunction, phase_diag


@dataclass(frozen=True)
class AfdmParams:
    """System configuration: subcarrier count, c1 chirp, phase law, CPP length.

    c1 is stored reduced modulo 1; it only ever enters through
    exp(+/- j*2*pi*c1*n^2) with integer n^2.
    """

    n: int
    c1: float
    phase: PhaseFunction
    cpp_len: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"subcarrier count must be >= 1, got {self.n}")
        if not 0 <= self.cpp_len <= self.n:
            raise ConfigurationError(
                f"cpp_len must be in [0, {self.n}], got {self.cpp_len}"
            )
        object.__setattr__(self, "c1", float(self.c1) % 1.0)


def default_c1(nu_max: float, n: int) -> float:
    """Doppler-derived chirp rate (2*nu_max + 1) / (2*N)."""
    return (2.0 * nu_max + 1.0) / (2.0 * n)


@dataclass(frozen=True, eq=False)
class AfdmFrame:
    """One modulated frame, before and after prefix insertion."""

    affine_symbols: np.ndarray
    time_samples: np.ndarray
    time_with_cpp: np.ndarray


def unitary_dft(v: np.ndarray, direction: str) -> np.ndarray:
    """Normalized DFT: forward has entries exp(-j*2*pi*p*q/N)/sqrt(N)."""
    if direction == "forward":
        return np.fft.fft(v, norm="ortho")
    if direction == "inverse":
        return np.fft.ifft(v, norm="ortho")
    raise ValueError(f"unknown direction {direction!r}")


@lru_cache(maxsize=256)
def _c1_diag(c1: float, n: int) -> np.ndarray:
    """diag entries exp(-j*2*pi*c1*m^2) (the demodulation-side sign)."""
    cyc = np.array([reduce_mod(c1, m * m, 1) for m in range(n)])
    d = np.exp(-2j * np.pi * cyc)
    d.setflags(write=False)
    return d


@lru_cache(maxsize=256)
def _cached_phase_diag(phase: PhaseFunction, n: int, direction: str) -> np.ndarray:
    d = phase_diag(phase, n, direction)
    d.setflags(write=False)
    return d


def _diags(params: AfdmParams, direction: str, c2_offset: float,
           kappa_offset: float) -> tuple[np.ndarray, np.ndarray]:
    """(c1 diagonal, phase diagonal), each with the sign for `direction`."""
    lam1 = _c1_diag(params.c1, params.n)
    if direction == MODULATE:
        lam1 = lam1.conj()
    if c2_offset == 0.0 and kappa_offset == 0.0:
        lam2 = _cached_phase_diag(params.phase, params.n, direction)
    else:
        lam2 = phase_diag(params.phase, params.n, direction,
                          c2_offset=c2_offset, kappa_offset=kappa_offset)
    return lam1, lam2


def build_modulation_matrix(params: AfdmParams, *, c2_offset: float = 0.0,
                            kappa_offset: float = 0.0) -> np.ndarray:
    """Explicit N x N modulation matrix Q = L1^H F^H L2^H."""
    if c2_offset == 0.0 and kappa_offset == 0.0:
        return _cached_modulation_matrix(params)
    return _modulation_matrix(params, c2_offset, kappa_offset)


@lru_cache(maxsize=64)
def _cached_modulation_matrix(params: AfdmParams) -> np.ndarray:
    q = _modulation_matrix(params, 0.0, 0.0)
    q.setflags(write=False)
    return q


def _modulation_matrix(params: AfdmParams, c2_offset: float,
                       kappa_offset: float) -> np.ndarray:
    n = params.n
    lam1, lam2 = _diags(params, MODULATE, c2_offset, kappa_offset)
    p = np.arange(n)
    # F^H entries exp(+j*2*pi*p*q/N)/sqrt(N); p*q reduced mod N keeps it exact
    fh = np.exp(2j * np.pi * ((np.outer(p, p) % n) / n)) / np.sqrt(n)
    return lam1[:, None] * fh * lam2[None, :]


def modulate(x: np.ndarray, params: AfdmParams) -> np.ndarray:
    """Time samples s = Q x via diagonal-IFFT-diagonal (O(N log N))."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (params.n,):
        raise InputShapeError(f"expected {params.n} symbols, got shape {x.shape}")
    lam1, lam2 = _diags(params, MODULATE, 0.0, 0.0)
    return lam1 * np.fft.ifft(lam2 * x, norm="ortho")


def demodulate(r: np.ndarray, params: AfdmParams, *, c2_offset: float = 0.0,
               kappa_offset: float = 0.0) -> np.ndarray:
    """Affine-domain symbols y = Q^H r.

    The offsets demodulate with a mismatched phase law f(c2 + c2_offset, .),
    which is how an eavesdropper's candidate demodulation is expressed.
    """
    r = np.asarray(r, dtype=np.complex128)
    if r.shape != (params.n,):
        raise InputShapeError(f"expected {params.n} samples, got shape {r.shape}")
    lam1, lam2 = _diags(params, DEMODULATE, c2_offset, kappa_offset)
    return lam2 * np.fft.fft(lam1 * r, norm="ortho")


def _cpp_phase(params: AfdmParams) -> np.ndarray:
    """Prefix factors exp(-j*2*pi*c1*(N^2 + 2*N*n)) for n = -L..-1."""
    n, L = params.n, params.cpp_len
    cyc = np.array(
        [reduce_mod(params.c1, n * n + 2 * n * k, 1) for k in range(-L, 0)]
    )
    return np.exp(-2j * np.pi * cyc)


def add_cpp(s: np.ndarray, params: AfdmParams) -> np.ndarray:
    """Prepend the chirp-periodic prefix: s[n] = s[N+n]*exp(-j*2*pi*c1*(N^2+2*N*n))."""
    s = np.asarray(s, dtype=np.complex128)
    if s.shape != (params.n,):
        raise InputShapeError(f"expected {params.n} samples, got shape {s.shape}")
    L = params.cpp_len
    if L == 0:
        return s.copy()
    prefix = s[params.n - L:] * _cpp_phase(params)
    return np.concatenate([prefix, s])


def remove_cpp(r_ext: np.ndarray, params: AfdmParams) -> np.ndarray:
    r_ext = np.asarray(r_ext)
    expected = params.n + params.cpp_len
    if r_ext.shape != (expected,):
        raise InputShapeError(
            f"expected {expected} samples (N + L), got shape {r_ext.shape}"
        )
    return r_ext[params.cpp_len:]


def make_frame(x: np.ndarray, params: AfdmParams) -> AfdmFrame:
    s = modulate(x, params)
    return AfdmFrame(
        affine_symbols=np.asarray(x, dtype=np.complex128),
        time_samples=s,
        time_with_cpp=add_cpp(s, params),
    )
