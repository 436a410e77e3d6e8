"""Tests for rsl.features: STFT, mel/MFCC, CQT, gammatone cochleogram and post-processing."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from rsl.audio import FramePlan, Waveform, dft, frame_signal, window
from rsl.errors import DataError
from rsl.features import (
    LOG_ENERGY_FLOOR,
    REPRESENTATIONS,
    AtomTooLongError,
    CochleaConfig,
    CQTConfig,
    DegenerateFilterbankError,
    MelConfig,
    TFMatrix,
    cochleogram,
    condition,
    cqt,
    cqt_atoms,
    decode_tfm,
    encode_tfm,
    erb,
    erb_number,
    extract,
    gammatone_bandwidth,
    gammatone_filterbank,
    gammatone_impulse_response,
    impulse_response_duration,
    load_tfm,
    log_compress_normalize,
    mel_cepstrum,
    mel_edge_frequencies,
    mel_filterbank,
    mel_scale,
    mel_to_hz,
    mfcc,
    minmax_normalize,
    quantize_f32,
    render_viridis,
    resize_to_grid,
    save_tfm,
    stft,
    viridis_rgb,
)

FS = 4000


def tone(f, seconds=1.0, rate=FS, amp=1.0):
    t = np.arange(int(rate * seconds)) / rate
    return Waveform(amp * np.sin(2 * np.pi * f * t), rate)


# ---------------------------------------------------------------------------
# TFMatrix
# ---------------------------------------------------------------------------


class TestTFMatrix:
    def test_negative_rejected_for_magnitudes(self):
        with pytest.raises(ValueError):
            TFMatrix(-np.ones((2, 2)), np.arange(2.0), 0.01, "stft")

    def test_negative_allowed_for_mfcc(self):
        assert TFMatrix(-np.ones((2, 2)), np.arange(2.0), 0.01, "mfcc").shape == (2, 2)

    def test_axis_length_checked(self):
        with pytest.raises(ValueError):
            TFMatrix(np.ones((3, 2)), np.arange(2.0), 0.01, "stft")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            TFMatrix(np.ones((2, 2)), np.arange(2.0), 0.01, "wavelet")


# ---------------------------------------------------------------------------
# STFT
# ---------------------------------------------------------------------------


class TestSTFT:
    def test_zero_signal(self):
        tf = stft(Waveform(np.zeros(1000), FS), FramePlan(64, 32))
        assert tf.shape == (33, (1000 - 64) // 32 + 1)
        assert np.all(tf.values == 0)

    def test_bin_aligned_sine_rectangular(self):
        n = np.arange(640)
        tf = stft(Waveform(np.sin(2 * np.pi * 4 * n / 64), FS), FramePlan(64, 16, "rectangular"))
        assert np.all(np.argmax(tf.values, axis=0) == 4)

    def test_constant_hann_leakage(self):
        tf = stft(Waveform(np.ones(512), FS), FramePlan(64, 32, "hann"))
        oracle = np.abs(dft(window("hann", 64)))[:33]
        np.testing.assert_allclose(tf.values, np.repeat(oracle[:, None], tf.shape[1], axis=1), atol=1e-9)
        assert np.all(np.argmax(tf.values, axis=0) == 0)
        # The symmetric window leaks a little past bin 2; only the DFT-periodic variant confines it exactly.
        assert tf.values[3:].max() < 3e-3 * tf.values[0].max()
        n = np.arange(64)
        periodic = np.abs(dft(0.5 * (1 - np.cos(2 * np.pi * n / 64))))
        assert periodic[3:62].max() < 1e-6

    def test_matches_dft_oracle(self):
        x = np.random.default_rng(0).standard_normal(700)
        plan = FramePlan(128, 50, "blackman-harris")
        tf = stft(Waveform(x, FS), plan)
        frames = frame_signal(Waveform(x, FS), plan)
        oracle = np.stack([np.abs(dft(f))[:65] for f in frames], axis=1)
        np.testing.assert_allclose(tf.values, oracle, atol=1e-9)

    def test_axes(self):
        tf = stft(Waveform(np.zeros(512), FS), FramePlan(256, 128))
        assert tf.freq_axis_hz[-1] == FS / 2
        assert tf.frame_hop_s == 128 / FS

    def test_hop_shift_covariance(self):
        x = np.random.default_rng(1).standard_normal(2000)
        plan = FramePlan(256, 128)
        a = stft(Waveform(x, FS), plan).values
        b = stft(Waveform(np.concatenate([np.zeros(128), x]), FS), plan).values
        np.testing.assert_allclose(b[:, 1:-1], a[:, :-1][:, : b.shape[1] - 2], atol=1e-6)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.01, 100))
    def test_amplitude_scaling(self, a):
        x = np.random.default_rng(2).standard_normal(600)
        plan = FramePlan(128, 64)
        np.testing.assert_allclose(stft(Waveform(a * x, FS), plan).values, a * stft(Waveform(x, FS), plan).values, rtol=1e-9, atol=1e-12)


# ---------------------------------------------------------------------------
# Mel scale, filterbank and MFCC
# ---------------------------------------------------------------------------


class TestMelScale:
    def test_zero(self):
        assert mel_scale(0.0) == 0.0

    @pytest.mark.parametrize("f", [700.0, 1000.0, 123.4, 1999.0])
    def test_against_mpmath(self, f):
        mpmath.mp.dps = 40
        oracle = 1127 * mpmath.log(1 + mpmath.mpf(f) / 700)
        assert mel_scale(f) == pytest.approx(float(oracle), rel=1e-12)

    def test_known_values(self):
        assert mel_scale(700.0) == pytest.approx(781.17, abs=0.01)
        assert mel_scale(1000.0) == pytest.approx(999.99, abs=0.01)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            mel_scale(-1.0)

    @settings(max_examples=50)
    @given(st.floats(0, 1e5))
    def test_inverse(self, f):
        assert mel_to_hz(mel_scale(f)) == pytest.approx(f, rel=1e-9, abs=1e-9)


class TestMelFilterbank:
    cfg = MelConfig(n_filters=20, n_coeffs=13, plan=FramePlan(256, 128))

    def test_peaks_and_neighbour_zeros(self):
        bank = mel_filterbank(self.cfg, 129, FS)
        centres = bank.argmax(axis=1)
        for m, c in enumerate(centres):
            assert bank[m, c] == 1.0
            if m > 0:
                assert bank[m, centres[m - 1]] == 0.0
            if m + 1 < len(centres):
                assert bank[m, centres[m + 1]] == 0.0

    def test_row_sums_positive(self):
        assert np.all(mel_filterbank(self.cfg, 129, FS).sum(axis=1) > 0)

    def test_two_filter_centres(self):
        delta = 300.0
        cfg = MelConfig(n_filters=2, n_coeffs=2, fmin_hz=0.0, fmax_hz=float(mel_to_hz(3 * delta)))
        edges = mel_edge_frequencies(cfg, FS)
        # interior points of a uniform 3-interval mel grid, inverted analytically
        expected = [700 * (math.exp(delta / 1127) - 1), 700 * (math.exp(2 * delta / 1127) - 1)]
        np.testing.assert_allclose(edges[1:3], expected, rtol=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateFilterbankError):
            mel_filterbank(MelConfig(n_filters=64, plan=FramePlan(128, 64)), 65, FS)

    def test_fmax_above_nyquist(self):
        with pytest.raises(ValueError):
            mel_filterbank(MelConfig(n_filters=4, n_coeffs=4, fmax_hz=3000.0), 257, FS)


class TestMFCC:
    def test_constant_energies(self):
        c, m = 2.5, 16
        y = mel_cepstrum(np.full(m, c), m)
        assert y[0] == pytest.approx(math.sqrt(2 / m) * m * c, rel=1e-12)
        assert np.max(np.abs(y[1:])) < 1e-9

    def test_impulse_at_zero(self):
        s = np.zeros(8)
        s[0] = 1.0
        n = np.arange(8)
        np.testing.assert_allclose(mel_cepstrum(s, 8), math.sqrt(2 / 8) * np.cos(np.pi * n / 16), atol=1e-12)

    def test_zero_signal_identical_columns(self):
        tf = mfcc(Waveform(np.zeros(4000), FS))
        assert tf.kind == "mfcc"
        assert np.all(tf.values == tf.values[:, :1])
        expected = mel_cepstrum(np.full(64, math.log(LOG_ENERGY_FLOOR)), 64)
        np.testing.assert_allclose(tf.values[:, 0], expected, rtol=1e-12, atol=1e-12)

    def test_matches_direct_implementation(self):
        """Independent loop-level MFCC on 20 random frames."""
        cfg = MelConfig(n_filters=24, n_coeffs=12, fmin_hz=50.0, fmax_hz=1800.0, plan=FramePlan(256, 256, "hann"))
        rng = np.random.default_rng(3)
        x = rng.standard_normal(256 * 20)
        ours = mfcc(Waveform(x, FS), cfg).values

        big_n, m_count = 256, 24
        mel = lambda f: 1127 * math.log(1 + f / 700)  # noqa: E731
        inv = lambda v: 700 * (math.exp(v / 1127) - 1)  # noqa: E731
        pts = [inv(mel(50) + i * (mel(1800) - mel(50)) / (m_count + 1)) for i in range(m_count + 2)]
        bins = [int(round(p / (FS / big_n))) for p in pts]
        win = [0.5 * (1 - math.cos(2 * math.pi * n / (big_n - 1))) for n in range(big_n)]
        for frame in range(20):
            seg = x[frame * big_n : (frame + 1) * big_n]
            power = []
            for k in range(big_n // 2 + 1):
                acc = sum(seg[n] * win[n] * complex(math.cos(2 * math.pi * k * n / big_n), -math.sin(2 * math.pi * k * n / big_n)) for n in range(big_n))
                power.append(abs(acc) ** 2)
            s = []
            for m in range(m_count):
                lo, c, hi = bins[m], bins[m + 1], bins[m + 2]
                e = 0.0
                for k in range(lo, hi + 1):
                    h = (k - lo) / (c - lo) if k <= c else (hi - k) / (hi - c)
                    e += power[k] * h
                s.append(math.log(e + 1e-10))
            y = [math.sqrt(2 / m_count) * sum(s[m] * math.cos(math.pi * n / m_count * (m + 0.5)) for m in range(m_count)) for n in range(12)]
            np.testing.assert_allclose(ours[:, frame], y, rtol=1e-6, atol=1e-6)


# ---------------------------------------------------------------------------
# CQT
# ---------------------------------------------------------------------------


class TestCQT:
    def test_octave_doubling_exact(self):
        f = CQTConfig().centre_frequencies()
        assert f[12] == 200.0
        b = 12
        assert np.all(f[b:] == 2 * f[:-b])

    def test_default_top_bin_below_nyquist(self):
        assert CQTConfig().centre_frequencies()[-1] < FS / 2

    def test_q_and_atom_length(self):
        cfg = CQTConfig()
        assert cfg.q_factor == pytest.approx(1 / (2 ** (1 / 12) - 1), rel=1e-12)
        assert cfg.atom_lengths(FS)[0] == pytest.approx(cfg.q_factor * FS / 100, rel=1e-12)

    @pytest.mark.parametrize("k", [0, 7, 20, 33, 51])
    def test_tone_at_bin_centre_wins(self, k):
        cfg = CQTConfig()
        f = cfg.centre_frequencies()[k]
        tf = cqt(tone(f, seconds=2.0), cfg)
        energy = (tf.values[:, 20:-20] ** 2).sum(axis=1)
        assert int(np.argmax(energy)) == k

    def test_matches_direct_summation(self):
        cfg = CQTConfig(f1_hz=200.0, n_bins=12, hop_samples=200)
        x = np.random.default_rng(4).standard_normal(1500)
        tf = cqt(Waveform(x, FS), cfg)
        atoms = cqt_atoms(cfg, FS)
        for k in (0, 5, 11):
            atom = atoms[k]
            half = atom.shape[0] // 2
            for m, centre in enumerate(range(0, 1500, 200)):
                acc = 0j
                for j, n in enumerate(range(-half, half + 1)):
                    if 0 <= centre + n < 1500:
                        acc += x[centre + n] * np.conj(atom[j])
                assert tf.values[k, m] == pytest.approx(abs(acc), abs=1e-9)

    def test_constant_q_from_minus_3db_width(self):
        cfg = CQTConfig()
        qs = []
        for fk, atom in zip(cfg.centre_frequencies(), cqt_atoms(cfg, FS)):
            nfft = 1 << 17
            mag = np.abs(np.fft.fft(atom, nfft))
            freqs = np.fft.fftfreq(nfft, 1 / FS)
            # the atom is analytic-like (negative exponent): its response peaks at -f_k
            pk = np.argmax(mag)
            above = mag >= mag[pk] / math.sqrt(2)
            lo = pk
            while above[(lo - 1) % nfft]:
                lo -= 1
            hi = pk
            while above[(hi + 1) % nfft]:
                hi += 1
            width = (hi - lo) * FS / nfft
            assert abs(abs(freqs[pk]) - fk) < 2 * FS / nfft
            qs.append(fk / width)
        qs = np.array(qs)
        assert np.max(np.abs(qs / np.median(qs) - 1)) < 0.01

    def test_atom_too_long(self):
        with pytest.raises(AtomTooLongError):
            cqt(Waveform(np.zeros(300), FS), CQTConfig())

    def test_bins_beyond_nyquist_rejected(self):
        with pytest.raises(ValueError):
            cqt(Waveform(np.zeros(4000), FS), CQTConfig(n_bins=80))

    def test_default_shape(self):
        tf = cqt(Waveform(np.zeros(24000), FS))
        assert tf.shape == (52, 188)


# ---------------------------------------------------------------------------
# Gammatone and cochleogram
# ---------------------------------------------------------------------------


class TestGammatone:
    def test_erb_and_b_at_1khz(self):
        assert erb(1000.0) == pytest.approx(132.639, abs=5e-4)
        assert gammatone_bandwidth(1000.0) == pytest.approx(135.159, abs=5e-4)

    def test_first_sample_zero(self):
        g = gammatone_impulse_response(1000.0, CochleaConfig(), 0.05, FS)
        assert g[0] == 0.0

    def test_peak_normalised(self):
        g = gammatone_impulse_response(500.0, CochleaConfig(), 0.05, FS)
        assert np.abs(g).max() == pytest.approx(1.0)

    def test_envelope_peak_time(self):
        b = gammatone_bandwidth(1000.0)
        t_peak = 3 / (2 * math.pi * b)
        assert t_peak == pytest.approx(3.53e-3, abs=5e-6)
        fine = 400000
        t = np.arange(1, 4000) / fine
        env = t**3 * np.exp(-2 * math.pi * b * t)
        assert t[np.argmax(env)] == pytest.approx(t_peak, abs=2 / fine)

    def test_matches_formula(self):
        cfg = CochleaConfig(order=3)
        g = gammatone_impulse_response(300.0, cfg, 0.02, FS)
        t = np.arange(80) / FS
        raw = t**2 * np.exp(-2 * math.pi * gammatone_bandwidth(300.0) * t) * np.cos(2 * math.pi * 300 * t)
        np.testing.assert_allclose(g, raw / np.abs(raw).max(), atol=1e-12)

    def test_nyquist_rejected(self):
        with pytest.raises(ValueError):
            gammatone_impulse_response(2000.0, CochleaConfig(), 0.01, FS)

    def test_truncation_cap(self):
        assert impulse_response_duration(100.0, CochleaConfig(ir_floor=1e-12), FS) == pytest.approx(0.128)

    @pytest.mark.parametrize("fc", [100.0, 400.0, 1900.0])
    def test_truncation_at_envelope_floor(self, fc):
        cfg = CochleaConfig()
        dur = impulse_response_duration(fc, cfg, FS)
        assert dur < 0.128
        b = gammatone_bandwidth(fc)
        t_peak = 3 / (2 * math.pi * b)
        ratio = lambda t: (t / t_peak) ** 3 * math.exp(-2 * math.pi * b * (t - t_peak))  # noqa: E731
        # last kept sample is the first below the floor; the one before is still above it
        assert ratio(dur) < 1e-5
        assert ratio(dur - 1 / FS) >= 1e-5

    def test_centres_even_in_erb_number(self):
        fc = CochleaConfig().centre_frequencies(FS)
        assert fc.shape == (64,)
        assert fc[0] == pytest.approx(100.0)
        assert fc[-1] < FS / 2
        steps = np.diff(erb_number(fc))
        np.testing.assert_allclose(steps, steps[0], rtol=1e-9)

    def test_centre_gain_unity(self):
        cfg = CochleaConfig()
        n = None
        for fc, g in zip(cfg.centre_frequencies(FS), gammatone_filterbank(cfg, FS)):
            n = np.arange(g.shape[0])
            assert abs(np.sum(g * np.exp(-2j * np.pi * fc * n / FS))) == pytest.approx(1.0, rel=1e-12)

    def test_peak_gain_option(self):
        bank = gammatone_filterbank(CochleaConfig(channel_gain="peak"), FS)
        assert all(np.abs(g).max() == pytest.approx(1.0) for g in bank)

    def test_bandwidth_grows_with_fc(self):
        cfg = CochleaConfig(n_filters=16)
        widths = []
        for g in gammatone_filterbank(cfg, FS):
            mag = np.abs(np.fft.rfft(g, 1 << 16))
            pk = np.argmax(mag)
            above = np.nonzero(mag >= mag[pk] / math.sqrt(2))[0]
            widths.append(above[-1] - above[0])
        assert all(b >= a for a, b in zip(widths, widths[1:]))


class TestCochleogram:
    def test_zero_signal(self):
        tf = cochleogram(Waveform(np.zeros(24000), FS))
        assert tf.shape == (64, 141)
        assert np.all(tf.values == 0)

    def test_tone_at_channel_centre_wins(self):
        cfg = CochleaConfig()
        for j, fc in enumerate(cfg.centre_frequencies(FS)):
            tf = cochleogram(tone(fc, seconds=1.0), cfg)
            assert int(np.argmax((tf.values**2).sum(axis=1))) == j

    def test_matches_direct_convolution(self):
        cfg = CochleaConfig(n_filters=4, fc_min_hz=300.0, fc_max_hz=1500.0)
        x = np.random.default_rng(5).standard_normal(1200)
        tf = cochleogram(Waveform(x, FS), cfg)
        bank = gammatone_filterbank(cfg, FS)
        plan = cfg.frame_plan(FS)
        win = window("hann", plan.frame_len_samples)
        for k, g in enumerate(bank):
            y = np.array([sum(g[i] * x[n - i] for i in range(min(len(g), n + 1))) for n in range(1200)])
            for m in range(tf.shape[1]):
                seg = np.abs(y[m * plan.hop_samples : m * plan.hop_samples + plan.frame_len_samples])
                assert tf.values[k, m] == pytest.approx(float(seg @ win), rel=1e-9, abs=1e-9)

    def test_hop_shift_covariance(self):
        x = np.random.default_rng(6).standard_normal(6000)
        a = cochleogram(Waveform(x, FS)).values
        b = cochleogram(Waveform(np.concatenate([np.zeros(168), x]), FS)).values
        np.testing.assert_allclose(b[:, 1:a.shape[1]], a[:, : a.shape[1] - 1], rtol=1e-6, atol=1e-6)

    def test_amplitude_scaling(self):
        x = np.random.default_rng(7).standard_normal(3000)
        a = cochleogram(Waveform(x, FS)).values
        np.testing.assert_allclose(cochleogram(Waveform(3.5 * x, FS)).values, 3.5 * a, rtol=1e-9)


# ---------------------------------------------------------------------------
# Post-processing
# ---------------------------------------------------------------------------


def _tf(values, kind="stft"):
    values = np.asarray(values, dtype=float)
    return TFMatrix(values, np.arange(values.shape[0], dtype=float), 0.01, kind)


class TestNormalisation:
    def test_zero_stays_zero(self):
        assert np.all(log_compress_normalize(_tf(np.zeros((3, 4)))).values == 0)

    def test_constant_to_zero(self):
        assert np.all(minmax_normalize(_tf(np.full((2, 2), 7.0))).values == 0)

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (4, 5), elements=st.floats(0, 1e3)))
    def test_range_and_monotone(self, v):
        out = log_compress_normalize(_tf(v)).values
        assert out.min() >= 0 and out.max() <= 1
        if v.max() > v.min():
            assert out.max() == 1.0
        flat_v, flat_o = v.ravel(), out.ravel()
        order = np.argsort(flat_v, kind="stable")
        assert np.all(np.diff(flat_o[order]) >= -1e-15)

    def test_mfcc_rejected(self):
        with pytest.raises(ValueError):
            log_compress_normalize(_tf(np.zeros((2, 2)), "mfcc"))

    def test_condition_dispatch(self):
        v = np.array([[-3.0, 1.0], [0.0, 5.0]])
        np.testing.assert_allclose(condition(_tf(v, "mfcc")).values, (v + 3) / 8)


class TestResize:
    def test_identity(self):
        v = np.random.default_rng(0).random((5, 7))
        np.testing.assert_array_equal(resize_to_grid(_tf(v), 5, 7).values, v)

    @settings(max_examples=20)
    @given(st.integers(1, 20), st.integers(1, 20), st.floats(0, 10))
    def test_constant(self, r, c, value):
        out = resize_to_grid(_tf(np.full((3, 4), value)), r, c).values
        assert out.shape == (r, c)
        np.testing.assert_allclose(out, value, rtol=1e-12)

    def test_midpoint(self):
        out = resize_to_grid(_tf([[0.0, 1.0], [0.0, 1.0]]), 2, 3).values
        np.testing.assert_allclose(out[:, 1], [0.5, 0.5])

    def test_to_classifier_grid(self):
        assert resize_to_grid(_tf(np.ones((129, 186))), 64, 144).shape == (64, 144)


class TestViridis:
    def test_endpoints(self):
        assert tuple(viridis_rgb(0.0)) == (68, 1, 84)
        assert tuple(viridis_rgb(1.0)) == (253, 231, 37)

    def test_png_orientation_and_size(self, tmp_path):
        v = np.zeros((3, 2))
        v[0] = 1.0  # lowest frequency row
        path = render_viridis(_tf(v), tmp_path / "img.png")
        img = np.asarray(Image.open(path))
        assert img.shape == (3, 2, 3)
        assert tuple(img[-1, 0]) == (253, 231, 37)
        assert tuple(img[0, 0]) == (68, 1, 84)

    def test_one_pixel(self, tmp_path):
        path = render_viridis(_tf([[0.0]]), tmp_path / "one.png")
        assert Image.open(path).size == (1, 1)

    def test_unnormalised_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            render_viridis(_tf([[2.0]]), tmp_path / "x.png")

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError):
            render_viridis(_tf([[0.5]]), blocker / "sub" / "x.png")


class TestTFMContainer:
    def test_roundtrip(self, tmp_path):
        tf = quantize_f32(_tf(np.random.default_rng(1).random((6, 9)), "cochleogram"))
        back = load_tfm(save_tfm(tf, tmp_path / "a.tfm"))
        np.testing.assert_array_equal(back.values, tf.values)
        np.testing.assert_array_equal(back.freq_axis_hz, tf.freq_axis_hz)
        assert (back.kind, back.frame_hop_s) == ("cochleogram", 0.01)

    def test_layout(self):
        blob = encode_tfm(_tf(np.array([[1.0, 2.0]]), "cqt"))
        assert blob[:4] == b"TFM1"
        assert len(blob) == 4 + 4 + 4 + 8 + 1 + 4 * 2 + 4

    def test_bad_magic(self):
        with pytest.raises(DataError):
            decode_tfm(b"NOPE" + bytes(40))

    def test_truncated(self):
        with pytest.raises(DataError):
            decode_tfm(encode_tfm(_tf(np.ones((2, 2))))[:-3])


class TestExtract:
    @pytest.mark.parametrize("rep,shape", [("stft", (129, 186)), ("mfcc", (64, 186)), ("cqt", (52, 188)), ("cochleogram", (64, 141))])
    def test_default_shapes(self, rep, shape):
        x = np.random.default_rng(8).standard_normal(24000) * 0.1
        assert extract(rep, Waveform(x, FS)).shape == shape

    def test_unknown(self):
        with pytest.raises(ValueError):
            extract("wavelet", Waveform(np.zeros(24000), FS))

    def test_representations_listed(self):
        assert REPRESENTATIONS == ("stft", "mfcc", "cqt", "cochleogram")
