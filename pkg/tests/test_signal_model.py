import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anetf.errors import PathEvaluationError
from anetf.scenario import make_scenario
from anetf.signal_model import (
    FirPath,
    GainTablePath,
    NoiseField,
    PathMatrix,
    ReferenceSpec,
    filtered_reference,
    noise_matrix,
    path_gain,
    path_gains,
    primary_noise,
    reference_matrices,
    tone_pair,
    true_filtered_reference,
    wrap_phase,
)

taps = st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=6).filter(lambda c: any(c))
angles = st.floats(-math.pi, math.pi, allow_nan=False)
radii = st.floats(0.05, 3.0)


def ref(f=0.125, a=1.0, ph=0.0):
    return ReferenceSpec((f,), (a,), (ph,))


class TestTonePair:
    @pytest.mark.parametrize(
        "amp, phase, n, expected",
        [(1.0, 0.0, 0, (1.0, 0.0)), (1.0, 0.0, 2, (0.0, 1.0)), (2.0, math.pi, 0, (-2.0, 0.0))],
    )
    def test_examples(self, amp, phase, n, expected):
        x, xh = tone_pair(0, n, ref(0.125, amp, phase))
        assert x == pytest.approx(expected[0], abs=1e-15)
        assert xh == pytest.approx(expected[1], abs=1e-15)

    def test_bad_tone_index(self):
        with pytest.raises(IndexError):
            tone_pair(1, 0, ref())

    @given(st.floats(0.001, 0.499), st.floats(0.01, 10), angles, st.integers(0, 10**6))
    def test_quadrature_identity(self, f, a, ph, n):
        x, xh = tone_pair(0, n, ref(f, a, ph))
        assert x * x + xh * xh == pytest.approx(a * a, rel=1e-12)

    def test_matrices_match_per_sample(self):
        r = ReferenceSpec((0.1, 0.37), (1.0, 0.5), (0.3, -1.0))
        xc, xs = reference_matrices(r, 50)
        for n in (0, 7, 49):
            for l in range(2):
                assert (xc[n, l], xs[n, l]) == pytest.approx(tone_pair(l, n, r), abs=1e-13)


class TestPrimaryNoise:
    def test_quarter_band_zero(self):
        nf = NoiseField((0.25,), ((1.0,),), ((0.0,),))
        assert primary_noise(0, 1, nf) == pytest.approx(0.0, abs=1e-15)

    def test_two_tone_sum(self):
        nf = NoiseField((0.1, 0.2), ((1.0, 0.5),), ((0.0, 0.0),))
        assert primary_noise(0, 0, nf) == 1.5

    def test_phase_quarter_turn(self):
        nf = NoiseField((0.1,), ((1.0,),), ((math.pi / 2,),))
        assert primary_noise(0, 0, nf) == pytest.approx(0.0, abs=1e-15)

    def test_bad_sensor(self):
        nf = NoiseField((0.1,), ((1.0,),), ((0.0,),))
        with pytest.raises(IndexError):
            primary_noise(1, 0, nf)

    def test_period_eight(self):
        nf = NoiseField((0.125,), ((1.0,), (0.3,)), ((0.2,), (-2.0,)))
        d = noise_matrix(nf, 64)
        np.testing.assert_allclose(d[8:], d[:-8], atol=1e-12)
        for k in range(2):
            for n in (0, 5, 13):
                assert primary_noise(k, n, nf) == pytest.approx(primary_noise(k, n + 8, nf), abs=1e-12)


class TestPathGain:
    def test_identity(self):
        for z in (1.0, -1j, 0.3 + 0.4j, 5.0):
            assert path_gain(FirPath((1.0,)), z) == 1.0

    def test_unit_delay_quarter_band(self):
        assert path_gain(FirPath((0.0, 1.0)), np.exp(1j * math.pi / 2)) == pytest.approx(-1j, abs=1e-15)

    def test_dc_sum(self):
        assert path_gain(FirPath((0.5, 0.5)), 1.0) == 1.0

    def test_radius_floor(self):
        p = FirPath((1.0, 0.5))
        path_gain(p, 0.05 * np.exp(0.7j))  # the floor itself is evaluable
        with pytest.raises(PathEvaluationError):
            path_gain(p, 0.049)
        with pytest.raises(PathEvaluationError):
            path_gains(p, np.array([0.5, 0.01]))

    def test_zero_taps_rejected(self):
        with pytest.raises(ValueError):
            FirPath((0.0, 0.0))

    def test_gain_table(self):
        p = GainTablePath((0.1,), (2.0,), (0.5,))
        z = np.exp(2j * math.pi * 0.1)
        assert path_gain(p, z) == pytest.approx(2.0 * np.exp(0.5j))
        assert path_gain(p, z.conjugate()) == pytest.approx(2.0 * np.exp(-0.5j))
        with pytest.raises(PathEvaluationError):
            path_gain(p, np.exp(2j * math.pi * 0.11))

    @given(taps, radii, angles)
    def test_conjugate_symmetry(self, c, r, th):
        p = FirPath(tuple(c))
        z = r * complex(math.cos(th), math.sin(th))
        assert path_gain(p, z.conjugate()) == pytest.approx(path_gain(p, z).conjugate(), rel=1e-12, abs=1e-12)

    @given(taps, radii, angles)
    def test_matches_direct_power_sum(self, c, r, th):
        z = r * complex(math.cos(th), math.sin(th))
        direct = sum(ct * z ** (-t) for t, ct in enumerate(c))
        scale = sum(abs(ct) * r ** (-t) for t, ct in enumerate(c))
        assert abs(path_gain(FirPath(tuple(c)), z) - direct) <= 1e-12 * scale
        assert abs(path_gains(FirPath(tuple(c)), np.array([z]))[0] - direct) <= 1e-12 * scale


class TestFilteredReference:
    def test_identity_estimate_is_tone_pair(self):
        sc = make_scenario(0.125, [[0.5]], 0.01)
        for n in range(10):
            got = filtered_reference(0, 0, 0, n, sc.paths, sc.reference)
            assert got == pytest.approx(tone_pair(0, n, sc.reference), abs=1e-15)

    def test_quarter_turn_gain(self):
        p = GainTablePath((0.125,), (2.0,), (math.pi / 2,))
        pm = PathMatrix(((p,),), ((p,),), True)
        x, xh = filtered_reference(0, 0, 0, 0, pm, ref())
        assert (x, xh) == pytest.approx((0.0, 2.0), abs=1e-15)

    def test_unit_delay_estimate(self):
        # independent oracle: the gain of z^-1 at e^{i pi/4} is e^{-i pi/4}
        g = np.exp(-1j * math.pi / 4)
        pm = PathMatrix.perfect([[FirPath((0.0, 1.0))]])
        x, xh = filtered_reference(0, 0, 0, 0, pm, ref())
        assert (x, xh) == pytest.approx((g.real, g.imag), abs=1e-15)
        assert x == pytest.approx(math.cos(-math.pi / 4)) and xh == pytest.approx(math.sin(-math.pi / 4))

    def test_perfect_estimates_match_true_paths(self):
        sc = make_scenario([0.1, 0.3], [[0.2, 0.4], [0.6, 0.0]], 0.01,
                           paths_true=[[[1.0, 0.3], [0.2, -0.5]], [[0.7], [0.1, 0.1, 0.9]]])
        for l in range(2):
            for j in range(2):
                for k in range(2):
                    for n in (0, 3, 99):
                        assert filtered_reference(l, j, k, n, sc.paths, sc.reference) == \
                            true_filtered_reference(l, j, k, n, sc.paths, sc.reference)


class TestWrapPhase:
    @given(st.floats(-100, 100, allow_nan=False))
    def test_range_and_idempotence(self, phi):
        w = wrap_phase(phi)
        assert -math.pi < w <= math.pi
        assert wrap_phase(w) == w
        assert math.cos(w) == pytest.approx(math.cos(phi), abs=1e-9)

    def test_minus_pi_maps_to_pi(self):
        assert wrap_phase(-math.pi) == math.pi
