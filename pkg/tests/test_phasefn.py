import math

import numpy as np
import pytest

from afdmsec import (ConfigurationError, DEFAULT_KAPPA, PhaseFunction,
                     UnsupportedOperationError, conventional, cosine_family,
                     df_dc2, df_dkappa, f_eval, mismatch_rotation_diag,
                     phase_diag)

KAPPA = DEFAULT_KAPPA


def central_difference_dc2(phase, m, step):
    up = f_eval(phase, m, c2_offset=step)
    dn = f_eval(phase, m, c2_offset=-step)
    return (up - dn) / (2.0 * step)


def central_difference_dkappa(phase, m, step):
    up = f_eval(phase, m, kappa_offset=step)
    dn = f_eval(phase, m, kappa_offset=-step)
    return (up - dn) / (2.0 * step)


def fd_step_for(phase, m):
    # keep the cosine-argument perturbation ~1e-3 rad so truncation and
    # rounding both stay far below the 1e-5 relative tolerance
    if phase.kind == "conventional":
        return 1e-7
    return 1e-3 / (math.pi * float(m) ** phase.b + 1.0)


class TestEval:
    def test_conventional_direct(self):
        assert f_eval(conventional(0.2), 3) == pytest.approx(1.8, abs=1e-15)

    def test_cosine_zero_at_m0(self):
        assert f_eval(cosine_family(0.37, b=4.0), 0) == 0.0

    def test_cosine_cos_pi_case(self):
        # c2=0.2, b=1, m=5: cos(pi * 0.2 * 5) = cos(pi) = -1
        ph = cosine_family(0.2, kappa=KAPPA, a=2.0, b=1.0)
        assert f_eval(ph, 5) == pytest.approx(-25.0 * KAPPA, rel=1e-14)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            PhaseFunction(kind="cosine", c2=0.2, b=-1.0)
        with pytest.raises(ConfigurationError):
            PhaseFunction(kind="cosine", c2=0.0)
        with pytest.raises(ConfigurationError):
            PhaseFunction(kind="cosine", c2=1.2)
        with pytest.raises(ConfigurationError):
            PhaseFunction(kind="polynomial", c2=0.2)

    def test_conventional_ignores_family_parameters(self):
        assert f_eval(conventional(0.2), 7) == f_eval(
            PhaseFunction(kind="conventional", c2=0.2, kappa=9.0, a=5.0, b=3.0), 7
        )

    def test_dict_roundtrip(self):
        ph = cosine_family(0.3, kappa=0.7, a=2.0, b=5.0)
        assert PhaseFunction.from_dict(ph.to_dict()) == ph


class TestDerivativeC2:
    def test_conventional_m63(self):
        assert df_dc2(conventional(0.2), 63) == 3969.0

    def test_cosine_zero_at_m0(self):
        assert df_dc2(cosine_family(0.2, b=1.0), 0) == 0.0

    def test_cosine_closed_form_and_fd(self):
        # m=4: -kappa*pi*4^3*sin(0.8*pi), cross-checked against the central
        # finite difference of f_eval with step 1e-7
        ph = cosine_family(0.2, kappa=KAPPA, a=2.0, b=1.0)
        expected = -KAPPA * math.pi * 64.0 * math.sin(0.8 * math.pi)
        assert df_dc2(ph, 4) == pytest.approx(expected, rel=1e-12)
        fd = central_difference_dc2(ph, 4, 1e-7)
        assert df_dc2(ph, 4) == pytest.approx(fd, rel=1e-6)

    def test_magnitude_identity(self):
        # |df/dc2| = |kappa * pi * m^(a+b) * sin(pi c2 m^b)| by recomputation;
        # dyadic c2 keeps the reference reduction exact too
        ph = cosine_family(0.375, kappa=0.9, a=2.0, b=2.0)
        for m in range(1, 32):
            u = (0.375 * m * m) % 2
            mag = abs(0.9 * math.pi * m**4 * math.sin(math.pi * u)) if u not in (0.0, 1.0) else 0.0
            assert abs(df_dc2(ph, m)) == pytest.approx(mag, rel=1e-9, abs=1e-12)

    def test_finite_difference_property(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(1000):
            b = float(rng.choice([0.0, 1.0, 2.0, 5.0, 10.0]))
            c2 = float(rng.uniform(0.01, 1.0))
            kappa = float(rng.uniform(0.1, 1.0))
            m = int(rng.integers(0, 64))
            ph = cosine_family(c2, kappa=kappa, a=2.0, b=b)
            d = df_dc2(ph, m)
            fd = central_difference_dc2(ph, m, fd_step_for(ph, m))
            assert abs(d - fd) <= 1e-5 * max(1.0, abs(d))
            checked += 1
        assert checked == 1000


class TestDerivativeKappa:
    def test_zero_at_m0(self):
        assert df_dkappa(cosine_family(0.2, b=1.0), 0) == 0.0

    def test_direct_b0(self):
        ph = cosine_family(0.2, a=2.0, b=0.0)
        assert df_dkappa(ph, 3) == pytest.approx(9.0 * math.cos(0.2 * math.pi), rel=1e-12)

    def test_direct_b1_with_fd(self):
        ph = cosine_family(0.2, a=2.0, b=1.0)
        expected = 36.0 * math.cos(1.2 * math.pi)
        assert df_dkappa(ph, 6) == pytest.approx(expected, rel=1e-12)
        fd = central_difference_dkappa(ph, 6, 1e-7)
        assert df_dkappa(ph, 6) == pytest.approx(fd, rel=1e-7)

    def test_conventional_unsupported(self):
        with pytest.raises(UnsupportedOperationError):
            df_dkappa(conventional(0.2), 3)

    def test_finite_difference_property(self):
        rng = np.random.default_rng(77)
        for _ in range(1000):
            b = float(rng.choice([0.0, 1.0, 2.0, 5.0, 10.0]))
            ph = cosine_family(float(rng.uniform(0.01, 1.0)),
                               kappa=float(rng.uniform(0.1, 1.0)), a=2.0, b=b)
            m = int(rng.integers(0, 64))
            d = df_dkappa(ph, m)
            fd = central_difference_dkappa(ph, m, 1e-7)
            assert abs(d - fd) <= 1e-5 * max(1.0, abs(d))


class TestDiagonals:
    def test_n1_is_one(self):
        assert phase_diag(conventional(0.7), 1, "modulate")[0] == pytest.approx(1.0)

    def test_unit_modulus(self):
        for ph in (conventional(0.3), cosine_family(0.2, b=1.0),
                   cosine_family(0.9, b=10.0)):
            d = phase_diag(ph, 64, "modulate")
            assert np.max(np.abs(np.abs(d) - 1.0)) < 1e-14

    def test_modulate_demodulate_conjugate(self):
        ph = cosine_family(0.41, b=5.0)
        prod = phase_diag(ph, 64, "modulate") * phase_diag(ph, 64, "demodulate")
        assert np.max(np.abs(prod - 1.0)) < 1e-12

    def test_conventional_period_one(self):
        # c2 and c2+1 differ by the integer cycle count m^2 at every entry
        base = phase_diag(conventional(0.3), 64, "modulate")
        shifted = phase_diag(conventional(0.3), 64, "modulate", c2_offset=1.0)
        assert np.max(np.abs(base - shifted)) < 1e-12

    def test_growth_ratio_scales_with_exponent(self):
        # max_m |df/dc2| grows like N^(a+b): ratio between N=64 and N=32
        # within [2^(a+b)/4, 4*2^(a+b)] for non-degenerate c2
        rng = np.random.default_rng(5)
        for b in (0.0, 1.0, 2.0, 5.0, 10.0):
            scale = 2.0 ** (2.0 + b)
            for _ in range(20):
                ph = cosine_family(float(rng.uniform(0.02, 0.98)), a=2.0, b=b)
                hi = max(abs(df_dc2(ph, m)) for m in range(64))
                lo = max(abs(df_dc2(ph, m)) for m in range(32))
                if lo == 0.0:
                    continue
                ratio = hi / lo
                assert scale / 4.0 <= ratio <= 4.0 * scale


class TestSteepLawPrecision:
    def test_exact_reduction_matches_fraction_reference(self):
        # independent reference: full-precision rational arithmetic
        from fractions import Fraction

        ph = cosine_family(0.2, b=10.0)
        for m in (3, 17, 63):
            u_ref = float((Fraction(0.2) * m**10) % 2)
            assert f_eval(ph, m) == pytest.approx(
                KAPPA * m * m * math.cos(math.pi * u_ref), rel=1e-12, abs=1e-12
            )

    def test_tiny_offsets_survive(self):
        # offsets far below the float spacing of c2 must still rotate;
        # delta is small enough that first-order Taylor is tight
        ph = cosine_family(0.2, b=10.0)
        delta = 1e-24
        rot = mismatch_rotation_diag(ph, 64, c2_offset=delta)
        angle63 = np.angle(rot[63])
        predicted = 2.0 * np.pi * delta * df_dc2(ph, 63)
        assert abs(predicted) > 0.01  # the offset is far from negligible
        assert angle63 == pytest.approx(-predicted, rel=1e-4)

    def test_degenerate_zeros_exact(self):
        ph = cosine_family(1.0, b=1.0)
        assert all(df_dc2(ph, m) == 0.0 for m in range(64))


def test_rotation_diag_zero_offset_is_ones():
    rot = mismatch_rotation_diag(cosine_family(0.2, b=1.0), 16)
    assert np.array_equal(rot, np.ones(16))
