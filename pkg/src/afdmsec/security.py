"""Mismatch analysis and the eavesdropper brute-force harness.

A receiver whose phase-law parameter is off by delta sees each demodulated
symbol rotated by exactly 2*pi*(f(c2,k) - f(c2+delta,k)); to first order the
rotation is -2*pi*delta*df/dc2(k). The admissible mismatch for a tolerable
phase error eps is therefore eps / (2*pi*|df/dc2|), its minimum over
subcarriers sets the system-wide interval, and the brute-force search cost
over a parameter range scales with range/interval. This module provides the
analytic bounds, the Monte Carlo interval measurement, complexity reporting,
and the grid-search attack itself.
"""

import math
import time
import warnings
from dataclasses import dataclass, replace
from itertools import product

import numpy as np
from threadpoolctl import threadpool_limits

from .constellation import ConstellationSpec, demap_hard
from .errors import ConfigurationError
from .experiments import SimScenario, _sigma, _trial_state, run_ber_vs_mismatch
from .modem import AfdmParams, demodulate, modulate
from .phasefn import CONVENTIONAL, PhaseFunction, df_dc2, df_dkappa, phase_cycles
from .receiver import MmseSolver, effective_channel

DEFAULT_EPSILON = 0.1
DEFAULT_BER_THRESHOLD = 1e-3


def predict_mismatched_symbol(x_k: complex, phase: PhaseFunction, delta: float,
                              k: int) -> complex:
    """First-order prediction x_k * exp(-j*2*pi*delta*df/dc2(k)).

    Valid while |delta * df/dc2| stays small; the exact rotation is what the
    modem produces when demodulating with a c2 offset.
    """
    return x_k * np.exp(-2j * np.pi * delta * df_dc2(phase, k))


@dataclass(frozen=True)
class MismatchBound:
    """Analytic admissible mismatch at one subcarrier."""

    delta_max: float
    degenerate: bool


def mismatch_bound(phase: PhaseFunction, m: int,
                   epsilon: float = DEFAULT_EPSILON, *,
                   axis: str = "c2") -> MismatchBound:
    """eps / (2*pi*|df/d(axis)|); infinite with a flag where the derivative vanishes."""
    d = df_dc2(phase, m) if axis == "c2" else df_dkappa(phase, m)
    if d == 0.0:
        return MismatchBound(delta_max=math.inf, degenerate=True)
    return MismatchBound(delta_max=epsilon / (2.0 * math.pi * abs(d)),
                         degenerate=False)


@dataclass(frozen=True)
class SystemBound:
    """Per-subcarrier bounds and their binding minimum."""

    delta_max: float
    argmin_m: int
    per_m: tuple
    degenerate_count: int


def system_mismatch_bound(phase: PhaseFunction, n: int,
                          epsilon: float = DEFAULT_EPSILON, *,
                          axis: str = "c2") -> SystemBound:
    """Minimum per-subcarrier bound over m = 0..n-1 (degenerate m excluded)."""
    bounds = [mismatch_bound(phase, m, epsilon, axis=axis) for m in range(n)]
    per_m = tuple(b.delta_max for b in bounds)
    finite = [(b.delta_max, m) for m, b in enumerate(bounds) if not b.degenerate]
    degenerate = sum(b.degenerate for b in bounds)
    if not finite:
        return SystemBound(math.inf, -1, per_m, degenerate)
    delta, argmin = min(finite)
    return SystemBound(delta, argmin, per_m, degenerate)


def count_degenerate_subcarriers(phase: PhaseFunction, n: int, *,
                                 axis: str = "c2") -> int:
    return system_mismatch_bound(phase, n, axis=axis).degenerate_count


@dataclass(frozen=True)
class ComplexityEstimate:
    """Search-order exponent and estimated candidate counts per axis."""

    order_exponent: float
    per_axis_counts: dict
    total_count: float


def complexity_estimate(phase: PhaseFunction, n: int,
                        axes: tuple = ("c2",), *,
                        epsilon: float = DEFAULT_EPSILON,
                        c2_range: tuple = (0.0, 1.0),
                        kappa_range: tuple = (0.0, 1.0),
                        measured: dict | None = None) -> ComplexityEstimate:
    """Brute-force complexity: order exponent plus range/interval counts.

    The order exponent is 2 for the conventional law, a+b for the cosine
    family on the c2 axis, and a+b+a with the kappa axis added. Counts divide
    each axis's search range by its measured interval when one is supplied,
    else by the analytic bound, and multiply across axes.
    """
    if phase.kind == CONVENTIONAL:
        if axes != ("c2",):
            raise ConfigurationError("conventional law has no kappa axis to search")
        exponent = 2.0
    else:
        exponent = phase.a + phase.b
        if "kappa" in axes:
            exponent += phase.a
    measured = measured or {}
    counts = {}
    for axis in axes:
        if axis not in ("c2", "kappa"):
            raise ConfigurationError(f"unknown search axis {axis!r}")
        lo, hi = c2_range if axis == "c2" else kappa_range
        interval = measured.get(axis)
        if interval is None:
            interval = system_mismatch_bound(phase, n, epsilon, axis=axis).delta_max
        counts[axis] = (hi - lo) / interval
    total = 1.0
    for v in counts.values():
        total *= v
    return ComplexityEstimate(order_exponent=exponent, per_axis_counts=counts,
                              total_count=total)


@dataclass(frozen=True)
class MismatchSweepSpec:
    """Grid and budget for a mismatch-interval measurement."""

    delta_grid: tuple
    snr_db: float = 25.0
    trials_per_point: int = 10_000
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        grid = tuple(float(d) for d in self.delta_grid)
        if len(grid) < 2 or any(d <= 0 for d in grid):
            raise ConfigurationError("delta grid must hold >= 2 positive values")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("delta grid must be strictly ascending")
        object.__setattr__(self, "delta_grid", grid)


STATUS_OK = "ok"
STATUS_BELOW_GRID = "below-grid"
STATUS_ABOVE_GRID = "above-grid"


@dataclass(frozen=True)
class MeasuredInterval:
    """Measured mismatch interval with its BER curve.

    delta_star is NaN when the threshold crossing falls outside the grid; the
    status and boundary fields then record which side was hit.
    """

    delta_star: float
    status: str
    bracket: tuple | None
    boundary: float | None
    threshold: float
    points: tuple


def find_threshold_crossing(points, threshold: float) -> MeasuredInterval:
    """First upward crossing of a running-max envelope, log-log interpolated.

    The envelope guards against noise-induced local dips; the interpolation
    uses the bracketing grid points, substituting half an error for an
    exactly-zero lower BER so the log is defined.
    """
    pts = tuple(points)
    deltas = np.array([p.sweep_value for p in pts])
    env = np.maximum.accumulate([p.ber for p in pts])
    above = env >= threshold
    if not above.any():
        return MeasuredInterval(math.nan, STATUS_ABOVE_GRID, None,
                                float(deltas[-1]), threshold, pts)
    i = int(np.argmax(above))
    if i == 0:
        return MeasuredInterval(math.nan, STATUS_BELOW_GRID, None,
                                float(deltas[0]), threshold, pts)
    lo, hi = i - 1, i
    ber_lo = env[lo] if env[lo] > 0 else 0.5 / pts[lo].bits
    ber_hi = env[hi]
    t = (math.log(threshold) - math.log(ber_lo)) / (math.log(ber_hi) - math.log(ber_lo))
    log_star = math.log(deltas[lo]) + t * (math.log(deltas[hi]) - math.log(deltas[lo]))
    return MeasuredInterval(math.exp(log_star), STATUS_OK,
                            (float(deltas[lo]), float(deltas[hi])), None,
                            threshold, pts)


def measure_mismatch_interval(scenario: SimScenario, sweep: MismatchSweepSpec, *,
                              axis: str = "c2",
                              threshold: float = DEFAULT_BER_THRESHOLD,
                              early_stop_errors: int | None = None) -> MeasuredInterval:
    """Monte Carlo BER over the mismatch grid, then threshold crossing."""
    scn = replace(scenario, trials=sweep.trials_per_point, snr_db=sweep.snr_db)
    points = run_ber_vs_mismatch(scn, sweep.delta_grid, axis=axis,
                                 early_stop_errors=early_stop_errors)
    interval = find_threshold_crossing(points, threshold)
    if interval.status != STATUS_OK:
        warnings.warn(
            f"mismatch grid does not span the BER threshold crossing "
            f"({interval.status} at {interval.boundary:g})",
            stacklevel=2,
        )
    return interval


@dataclass(frozen=True)
class SearchAxis:
    """One unknown parameter axis with its candidate grid."""

    name: str
    grid: tuple

    def __post_init__(self):
        if self.name not in ("c2", "kappa"):
            raise ConfigurationError(f"unknown search axis {self.name!r}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigurationError("search grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigurationError("search grid must be strictly increasing")
        if self.name == "c2" and not all(0.0 < v <= 1.0 for v in grid):
            raise ConfigurationError("c2 search grid must lie in (0, 1]")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class EveModel:
    """Eavesdropper knowledge set and search space.

    The template phase carries what Eve knows about the law (kind, a, b and
    any non-searched parameter); the axes are the unknowns she grids over.
    Success means best pilot BER at or below the threshold.
    """

    axes: tuple
    template: PhaseFunction
    success_ber_threshold: float = DEFAULT_BER_THRESHOLD


@dataclass(frozen=True, eq=False)
class Interception:
    """What Eve observes: received frames, perfect CSI, pilots, and c1."""

    received: tuple
    channels: tuple
    pilot_bits: tuple
    n: int
    c1: float
    sigma2: float
    constellation: ConstellationSpec


def intercept(scenario: SimScenario, n_frames: int,
              start_trial: int = 0) -> Interception:
    """Record pilot frames as transmitted by the legitimate chain."""
    received, channels, pilot_bits = [], [], []
    sigma = _sigma(scenario.snr_db)
    params = scenario.afdm
    for t in range(start_trial, start_trial + n_frames):
        bits, x, h_mat, w = _trial_state(scenario, t)
        r = h_mat @ modulate(x, params) + sigma * w
        received.append(r)
        channels.append(h_mat)
        pilot_bits.append(bits)
    return Interception(
        received=tuple(received),
        channels=tuple(channels),
        pilot_bits=tuple(pilot_bits),
        n=params.n,
        c1=params.c1,
        sigma2=sigma * sigma,
        constellation=scenario.constellation,
    )


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a brute-force parameter search."""

    best_params: dict
    best_ber: float
    evaluated: int
    success: bool
    elapsed_s: float
    per_candidate_s: float


def _candidate_phase(template: PhaseFunction, names, values) -> PhaseFunction:
    return replace(template, **dict(zip(names, values)))


def _eve_reference_estimates(eve: EveModel, obs: Interception):
    """Matched-filter-plus-MMSE estimates under the template parameters.

    A candidate differing from the template only in the phase diagonal sees
    these estimates rotated by exp(j*2*pi*(f_template - f_candidate)), so the
    grid search reduces to diagonal rotations of the reference estimates.
    """
    params = AfdmParams(n=obs.n, c1=obs.c1, phase=eve.template, cpp_len=0)
    estimates = []
    for r, h_mat in zip(obs.received, obs.channels):
        y = demodulate(r, params)
        eff = effective_channel(h_mat, params, obs.sigma2)
        estimates.append(MmseSolver(eff).solve(y))
    return params, estimates


def brute_force_search(eve: EveModel, obs: Interception, *,
                       chunk_size: int = 4096) -> SearchResult:
    """Grid-search the unknown phase parameters against known pilots.

    Evaluates every grid point, scoring pilot BER with the full candidate
    receiver (demodulate with the candidate law, MMSE with its effective
    channel); the evaluation is exact but factored so candidates cost one
    diagonal rotation each. Ties keep the earliest grid point.
    """
    t0 = time.perf_counter()
    names = tuple(ax.name for ax in eve.axes)
    grids = [ax.grid for ax in eve.axes]
    params, estimates = _eve_reference_estimates(eve, obs)
    n = obs.n
    base_cycles = phase_cycles(eve.template, n)
    total_bits = sum(len(b) for b in obs.pilot_bits)

    best_errors = None
    best_values = None
    evaluated = 0
    candidates = product(*grids)
    with threadpool_limits(limits=1):
        while True:
            chunk = []
            for _ in range(chunk_size):
                try:
                    chunk.append(next(candidates))
                except StopIteration:
                    break
            if not chunk:
                break
            rot = np.empty((len(chunk), n), dtype=np.complex128)
            for i, values in enumerate(chunk):
                cand = _candidate_phase(eve.template, names, values)
                rot[i] = np.exp(2j * np.pi * (base_cycles - phase_cycles(cand, n)))
            errors = np.zeros(len(chunk), dtype=np.int64)
            for bits, est in zip(obs.pilot_bits, estimates):
                rx = demap_hard(rot * est[None, :], obs.constellation)
                errors += np.count_nonzero(rx != np.asarray(bits)[None, :], axis=1)
            i_min = int(np.argmin(errors))
            if best_errors is None or errors[i_min] < best_errors:
                best_errors = int(errors[i_min])
                best_values = chunk[i_min]
            evaluated += len(chunk)

    elapsed = time.perf_counter() - t0
    best_ber = best_errors / total_bits
    return SearchResult(
        best_params=dict(zip(names, best_values)),
        best_ber=best_ber,
        evaluated=evaluated,
        success=best_ber <= eve.success_ber_threshold,
        elapsed_s=elapsed,
        per_candidate_s=elapsed / max(1, evaluated),
    )


def brute_force_search_naive(eve: EveModel, obs: Interception) -> SearchResult:
    """Reference route: rebuild the candidate receiver for every grid point.

    Kept as the independent check for the rotation-factored search; costs a
    full effective-channel build and factorization per candidate.
    """
    t0 = time.perf_counter()
    names = tuple(ax.name for ax in eve.axes)
    total_bits = sum(len(b) for b in obs.pilot_bits)
    best_errors = None
    best_values = None
    evaluated = 0
    with threadpool_limits(limits=1):
        for values in product(*(ax.grid for ax in eve.axes)):
            cand = _candidate_phase(eve.template, names, values)
            params = AfdmParams(n=obs.n, c1=obs.c1, phase=cand, cpp_len=0)
            errors = 0
            for r, h_mat, bits in zip(obs.received, obs.channels, obs.pilot_bits):
                y = demodulate(r, params)
                eff = effective_channel(h_mat, params, obs.sigma2)
                rx = demap_hard(MmseSolver(eff).solve(y), obs.constellation)
                errors += int(np.count_nonzero(rx != np.asarray(bits)))
            if best_errors is None or errors < best_errors:
                best_errors = errors
                best_values = values
            evaluated += 1
    elapsed = time.perf_counter() - t0
    best_ber = best_errors / total_bits
    return SearchResult(
        best_params=dict(zip(names, best_values)),
        best_ber=best_ber,
        evaluated=evaluated,
        success=best_ber <= eve.success_ber_threshold,
        elapsed_s=elapsed,
        per_candidate_s=elapsed / max(1, evaluated),
    )
