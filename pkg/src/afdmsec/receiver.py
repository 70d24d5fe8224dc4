"""Affine-domain effective channel and MMSE equalization."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InputShapeError, NumericalRankError
from .modem import AfdmParams, build_modulation_matrix


@dataclass(frozen=True, eq=False)
class EffectiveChannel:
    """H_eff = Q^H H Q together with the noise variance the equalizer uses."""

    h_eff: np.ndarray
    sigma2: float


def effective_channel(h_mat: np.ndarray, params: AfdmParams, sigma2: float = 0.0,
                      *, c2_offset: float = 0.0,
                      kappa_offset: float = 0.0) -> EffectiveChannel:
    """Conjugate the time-domain channel into the affine domain.

    Offsets build the effective channel seen through a mismatched
    (de)modulation matrix Q-hat, for eavesdropper candidate evaluation.
    """
    h_mat = np.asarray(h_mat, dtype=np.complex128)
    n = params.n
    if h_mat.shape != (n, n):
        raise InputShapeError(f"expected ({n}, {n}) channel matrix, got {h_mat.shape}")
    q = build_modulation_matrix(params, c2_offset=c2_offset,
                                kappa_offset=kappa_offset)
    return EffectiveChannel(h_eff=q.conj().T @ h_mat @ q, sigma2=float(sigma2))


class MmseSolver:
    """Cached Cholesky factorization of (H^H H + sigma^2 I) for repeated solves."""

    def __init__(self, eff: EffectiveChannel):
        h = eff.h_eff
        gram = h.conj().T @ h
        gram[np.diag_indices_from(gram)] += eff.sigma2
        try:
            self._chol = (np.linalg.cholesky(gram), True)
        except np.linalg.LinAlgError as exc:
            raise NumericalRankError(
                f"regularized normal equations are singular (sigma2={eff.sigma2})"
            ) from exc
        self._hh = h.conj().T

    def solve(self, y: np.ndarray) -> np.ndarray:
        return scipy.linalg.cho_solve(self._chol, self._hh @ y, check_finite=False)

    def solve_from_rhs(self, rhs: np.ndarray) -> np.ndarray:
        """Solve with a precomputed right-hand side H^H y."""
        return scipy.linalg.cho_solve(self._chol, rhs, check_finite=False)


def mmse_equalize(y: np.ndarray, eff: EffectiveChannel) -> np.ndarray:
    """x-hat = (H^H H + sigma^2 I)^{-1} H^H y by Hermitian solve, no inverse."""
    return MmseSolver(eff).solve(np.asarray(y, dtype=np.complex128))


def mmse_gain_matrix(eff: EffectiveChannel) -> np.ndarray:
    """Explicit G = (H^H H + sigma^2 I)^{-1} H^H; diagnostic/reference route."""
    h = eff.h_eff
    gram = h.conj().T @ h
    gram[np.diag_indices_from(gram)] += eff.sigma2
    return np.linalg.inv(gram) @ h.conj().T
