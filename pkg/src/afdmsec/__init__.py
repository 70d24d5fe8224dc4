"""AFDM link simulation with security-oriented chirp phase functions."""

from .channel import (COMPLEX_GAUSSIAN, FIXED_MAGNITUDE, ChannelProfile,
                      ChannelRealization, apply_channel, build_channel_matrix,
                      draw_realization, paper_profile, propagate_time_domain)
from .constellation import (ConstellationSpec, count_bit_errors, demap_hard,
                            map_bits, qpsk)
from .errors import (ConfigurationError, InputShapeError, NumericalRankError,
                     UnsupportedOperationError)
from .experiments import (BerPoint, SimScenario, ber_agrees_3sigma, log_grid,
                          make_scenario, run_ber_vs_mismatch, run_ber_vs_snr,
                          run_c2_sweep, run_frame, write_sweep_csv)
from .modem import (AfdmFrame, AfdmParams, add_cpp, build_modulation_matrix,
                    default_c1, demodulate, make_frame, modulate, remove_cpp,
                    unitary_dft)
from .phasefn import (CONVENTIONAL, COSINE_FAMILY, DEFAULT_KAPPA, PhaseFunction,
                      conventional, cosine_family, df_dc2, df_dkappa, f_eval,
                      mismatch_rotation_diag, phase_diag)
from .receiver import (EffectiveChannel, MmseSolver, effective_channel,
                       mmse_equalize, mmse_gain_matrix)
from .security import (EveModel, Interception, MeasuredInterval, MismatchBound,
                       MismatchSweepSpec, SearchAxis, SearchResult,
                       brute_force_search, complexity_estimate,
                       count_degenerate_subcarriers, find_threshold_crossing,
                       intercept, measure_mismatch_interval, mismatch_bound,
                       predict_mismatched_symbol, system_mismatch_bound)

__version__ = "0.1.0"
