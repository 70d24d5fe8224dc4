"""Monte Carlo engine and sweep campaigns (mismatch, SNR, c2).

Per-trial randomness comes from stateless streams derived from
(master_seed, trial_index, purpose), so trials are order-independent work
items and a sweep's results are a pure function of the scenario. All sweep
points of one trial share that trial's bits, channel, and noise (common
random numbers): a receiver mismatched only in the phase law sees exactly the
matched MMSE output rotated per-subcarrier, so each grid point costs one
diagonal multiply instead of a fresh factorization.
"""

import hashlib
import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np
from threadpoolctl import threadpool_limits

from .channel import ChannelProfile, build_channel_matrix, draw_realization
from .constellation import ConstellationSpec, count_bit_errors, demap_hard, map_bits, qpsk
from .errors import ConfigurationError
from .modem import AfdmParams, default_c1, demodulate, modulate
from .phasefn import COSINE_FAMILY, mismatch_rotation_diag
from .receiver import EffectiveChannel, MmseSolver, effective_channel

_PURPOSES = {"bits": 0, "channel": 1, "noise": 2}

CHANNEL_PER_TRIAL = "per-trial"
CHANNEL_FIXED = "fixed"


@dataclass(frozen=True)
class SimScenario:
    """One simulation setup: waveform, channel, constellation, seed, budget."""

    afdm: AfdmParams
    channel: ChannelProfile
    constellation: ConstellationSpec
    master_seed: int
    trials: int
    snr_db: float
    channel_draw: str = CHANNEL_PER_TRIAL

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigurationError("master_seed must be a 64-bit unsigned integer")
        if self.channel_draw not in (CHANNEL_PER_TRIAL, CHANNEL_FIXED):
            raise ConfigurationError(f"unknown channel_draw {self.channel_draw!r}")
        if self.channel.max_delay > self.afdm.cpp_len:
            raise ConfigurationError(
                f"max delay {self.channel.max_delay} exceeds cpp_len {self.afdm.cpp_len}"
            )

    @property
    def bits_per_frame(self) -> int:
        return self.afdm.n * self.constellation.bits_per_symbol


def make_scenario(phase, profile: ChannelProfile, *, n: int = 64,
                  snr_db: float = 25.0, trials: int = 10_000,
                  master_seed: int = 1, c1: float | None = None,
                  cpp_len: int | None = None,
                  constellation: ConstellationSpec | None = None,
                  channel_draw: str = CHANNEL_PER_TRIAL) -> SimScenario:
    """Build a scenario with the derived defaults.

    c1 defaults to (2*nu_max + 1)/(2*N) from the channel's maximum Doppler;
    the CPP length defaults to the channel's maximum delay.
    """
    params = AfdmParams(
        n=n,
        c1=default_c1(profile.nu_max, n) if c1 is None else c1,
        phase=phase,
        cpp_len=profile.max_delay if cpp_len is None else cpp_len,
    )
    return SimScenario(
        afdm=params,
        channel=profile,
        constellation=constellation if constellation is not None else qpsk(),
        master_seed=master_seed,
        trials=trials,
        snr_db=snr_db,
        channel_draw=channel_draw,
    )


@dataclass(frozen=True)
class BerPoint:
    """One Monte Carlo measurement at a sweep coordinate."""

    sweep_value: float
    bits: int
    errors: int

    @property
    def ber(self) -> float:
        return self.errors / self.bits

    @property
    def ci95_halfwidth(self) -> float:
        """Normal-approximation 95% half-width of the BER estimate."""
        p = self.ber
        return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / self.bits)


def ber_agrees_3sigma(a: BerPoint, b: BerPoint) -> bool:
    """Two-proportion comparison at 3 pooled binomial standard errors."""
    pooled = (a.errors + b.errors) / (a.bits + b.bits)
    se = math.sqrt(max(pooled * (1.0 - pooled), 0.0) * (1.0 / a.bits + 1.0 / b.bits))
    return abs(a.ber - b.ber) <= 3.0 * se


def trial_rng(master_seed: int, trial_index: int, purpose: str) -> np.random.Generator:
    seq = np.random.SeedSequence((master_seed, trial_index, _PURPOSES[purpose]))
    return np.random.default_rng(seq)


def _sigma(snr_db: float) -> float:
    if math.isinf(snr_db):
        return 0.0
    return math.sqrt(10.0 ** (-snr_db / 10.0))


def _trial_state(scenario: SimScenario, trial_index: int):
    """Draw (bits, symbols, H, unit noise) for one trial from its streams."""
    bits_rng = trial_rng(scenario.master_seed, trial_index, "bits")
    bits = bits_rng.integers(0, 2, size=scenario.bits_per_frame).astype(np.uint8)
    x = map_bits(bits, scenario.constellation)
    chan_index = 0 if scenario.channel_draw == CHANNEL_FIXED else trial_index
    real = draw_realization(
        scenario.channel, trial_rng(scenario.master_seed, chan_index, "channel")
    )
    h_mat = build_channel_matrix(real, scenario.afdm)
    g = trial_rng(scenario.master_seed, trial_index, "noise").standard_normal(
        (2, scenario.afdm.n)
    )
    w = (g[0] + 1j * g[1]) / np.sqrt(2.0)
    return bits, x, h_mat, w


def _matched_estimate(scenario: SimScenario, x, h_mat, w, sigma: float):
    """Transmit x through H, receive with the matched chain, MMSE-equalize."""
    params = scenario.afdm
    s = modulate(x, params)
    r = h_mat @ s + sigma * w
    y = demodulate(r, params)
    eff = effective_channel(h_mat, params, sigma * sigma)
    return MmseSolver(eff).solve(y)


def run_frame(scenario: SimScenario, trial_index: int, *, delta_c2: float = 0.0,
              delta_kappa: float = 0.0, snr_db: float | None = None) -> tuple[int, int]:
    """One full frame through the honest chain; returns (bit count, error count).

    The deltas demodulate and equalize with a mismatched phase law, the way
    an eavesdropper with a wrong candidate would. Deterministic in
    (master_seed, trial_index, overrides).
    """
    params = scenario.afdm
    spec = scenario.constellation
    sigma = _sigma(scenario.snr_db if snr_db is None else snr_db)
    bits, x, h_mat, w = _trial_state(scenario, trial_index)
    if delta_c2 == 0.0 and delta_kappa == 0.0:
        x_hat = _matched_estimate(scenario, x, h_mat, w, sigma)
    else:
        s = modulate(x, params)
        r = h_mat @ s + sigma * w
        y = demodulate(r, params, c2_offset=delta_c2, kappa_offset=delta_kappa)
        eff = effective_channel(h_mat, params, sigma * sigma,
                                c2_offset=delta_c2, kappa_offset=delta_kappa)
        x_hat = MmseSolver(eff).solve(y)
    rx_bits = demap_hard(x_hat, spec)
    return len(bits), count_bit_errors(bits, rx_bits)


def _rotation_bank(scenario: SimScenario, values, axis: str) -> np.ndarray:
    """(len(values), N) exact mismatch rotations for the sweep axis."""
    phase = scenario.afdm.phase
    n = scenario.afdm.n
    if axis == "c2":
        rows = [mismatch_rotation_diag(phase, n, c2_offset=v) for v in values]
    elif axis == "kappa":
        rows = [mismatch_rotation_diag(phase, n, kappa_offset=v) for v in values]
    else:
        raise ConfigurationError(f"unknown sweep axis {axis!r}")
    return np.stack(rows)


def run_ber_vs_mismatch(scenario: SimScenario, delta_grid, *, axis: str = "c2",
                        early_stop_errors: int | None = None) -> list[BerPoint]:
    """BER at each mismatch offset, common random numbers across the grid.

    With early_stop_errors set, a grid point stops accumulating once it has
    that many bit errors (standard BER practice); disabled by default so
    curves compared pointwise share identical trial counts.
    """
    deltas = [float(d) for d in delta_grid]
    rot = _rotation_bank(scenario, deltas, axis)
    spec = scenario.constellation
    sigma = _sigma(scenario.snr_db)
    bpf = scenario.bits_per_frame
    npts = len(deltas)
    errors = np.zeros(npts, dtype=np.int64)
    bits_seen = np.zeros(npts, dtype=np.int64)
    active = np.ones(npts, dtype=bool)
    # 64x64 BLAS kernels lose badly to thread-pool wakeups inside tight loops
    with threadpool_limits(limits=1):
        for t in range(scenario.trials):
            if not active.any():
                break
            bits, x, h_mat, w = _trial_state(scenario, t)
            x_hat = _matched_estimate(scenario, x, h_mat, w, sigma)
            est = rot[active] * x_hat[None, :]
            rx = demap_hard(est, spec)
            errors[active] += np.count_nonzero(rx != bits[None, :], axis=1)
            bits_seen[active] += bpf
            if early_stop_errors is not None:
                active &= errors < early_stop_errors
    return [BerPoint(deltas[i], int(bits_seen[i]), int(errors[i]))
            for i in range(npts)]


def snr_delta_grid_counts(scenario: SimScenario, snr_grid, deltas, *,
                          axis: str = "c2"):
    """Error counts over an (SNR, delta) product grid with shared trials.

    Noise is drawn once per trial and scaled per SNR point; demodulation is
    linear, so signal and noise are demodulated separately and each SNR point
    costs one factorization plus one triangular solve pair. Returns
    (bits_per_point, errors array of shape (len(snr_grid), len(deltas))).
    """
    params = scenario.afdm
    spec = scenario.constellation
    snrs = [float(v) for v in snr_grid]
    deltas = [float(d) for d in deltas]
    rot = _rotation_bank(scenario, deltas, axis)
    errors = np.zeros((len(snrs), len(deltas)), dtype=np.int64)
    with threadpool_limits(limits=1):
        for t in range(scenario.trials):
            bits, x, h_mat, w = _trial_state(scenario, t)
            s = modulate(x, params)
            y0 = demodulate(h_mat @ s, params)
            yw = demodulate(w, params)
            h_eff = effective_channel(h_mat, params, 0.0).h_eff
            hh = h_eff.conj().T
            rhs0 = hh @ y0
            rhsw = hh @ yw
            for si, snr in enumerate(snrs):
                sigma = _sigma(snr)
                solver = MmseSolver(EffectiveChannel(h_eff, sigma * sigma))
                x_hat = solver.solve_from_rhs(rhs0 + sigma * rhsw)
                est = rot * x_hat[None, :]
                rx = demap_hard(est, spec)
                errors[si] += np.count_nonzero(rx != bits[None, :], axis=1)
    bits_per_point = scenario.trials * scenario.bits_per_frame
    return bits_per_point, errors


def run_ber_vs_snr(scenario: SimScenario, snr_grid, delta: float = 0.0, *,
                   axis: str = "c2") -> list[BerPoint]:
    """BER versus SNR at a fixed mismatch offset (0 = legitimate receiver)."""
    bits_per_point, errors = snr_delta_grid_counts(scenario, snr_grid, [delta],
                                                   axis=axis)
    return [BerPoint(float(snr), bits_per_point, int(errors[i, 0]))
            for i, snr in enumerate(snr_grid)]


def run_c2_sweep(scenario: SimScenario, c2_values, b: float, sweep, *,
                 threshold: float = 1e-3):
    """Measured mismatch interval for each c2 at fixed b (cosine family).

    Returns a list of (c2, MeasuredInterval, degenerate_count) tuples; the
    degenerate count is the number of subcarriers with zero c2-derivative.
    """
    from .security import count_degenerate_subcarriers, measure_mismatch_interval

    out = []
    for c2 in c2_values:
        phase = replace(scenario.afdm.phase, kind=COSINE_FAMILY, c2=float(c2), b=float(b))
        scn = replace(scenario, afdm=replace(scenario.afdm, phase=phase))
        interval = measure_mismatch_interval(scn, sweep, threshold=threshold)
        out.append((float(c2), interval,
                    count_degenerate_subcarriers(phase, scenario.afdm.n)))
    return out


def log_grid(start: float, stop: float, points_per_decade: int = 10) -> tuple:
    """Log-spaced grid from start to stop inclusive."""
    if not 0 < start < stop:
        raise ConfigurationError("grid needs 0 < start < stop")
    decades = math.log10(stop / start)
    npts = max(2, int(round(points_per_decade * decades)) + 1)
    return tuple(float(v) for v in np.geomspace(start, stop, npts))


def config_digest(obj) -> str:
    """Stable digest of a JSON-serializable configuration object."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def write_sweep_csv(path: str, sweep_name: str, points: list[BerPoint],
                    bits_per_frame: int, summary: dict | None = None) -> None:
    """One sweep per file: header, one point per row, '#' summary trailer."""
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    lines = [f"{sweep_name},trials,bits,bit_errors,ber,ci95"]
    for p in points:
        lines.append(
            f"{p.sweep_value:.10e},{p.bits // bits_per_frame},{p.bits},"
            f"{p.errors},{p.ber:.6e},{p.ci95_halfwidth:.6e}"
        )
    for key in sorted(summary or {}):
        lines.append(f"# {key} = {summary[key]}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
