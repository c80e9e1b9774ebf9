"""Waveform synthesis, noise, and scan-simulation contracts."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from jamscan import synth
from jamscan.errors import DegenerateGeometryError, DomainError, SpecificationError
from jamscan.localize import make_pattern
from support import FS_BPSK, FS_CHIRP, bpsk_spec, chirp_spec, cw_spec


class TestWaveformValidation:
    def test_chirp_requires_sweep_time(self):
        spec = synth.WaveformSpec(kind=synth.CHIRP, bandwidth_hz=1e6)
        with pytest.raises(SpecificationError):
            synth.synth_waveform(spec, 1e-3, 15e6)

    def test_cw_rejects_chip_rate(self):
        spec = synth.WaveformSpec(kind=synth.CW, chip_rate_cps=1e6)
        with pytest.raises(SpecificationError):
            spec.validate()

    def test_cw_rejects_sweep_time(self):
        spec = synth.WaveformSpec(kind=synth.CW, sweep_time_s=1e-4)
        with pytest.raises(SpecificationError):
            spec.validate()

    def test_bpsk_requires_chip_rate(self):
        spec = synth.WaveformSpec(kind=synth.BPSK_PRN, prn_length=1023)
        with pytest.raises(SpecificationError):
            spec.validate()

    def test_unknown_kind(self):
        with pytest.raises(SpecificationError):
            synth.WaveformSpec(kind="FM").validate()

    def test_nonpositive_duration_or_rate(self):
        with pytest.raises(DomainError):
            synth.synth_waveform(cw_spec(), -1.0, 15e6)
        with pytest.raises(DomainError):
            synth.synth_waveform(cw_spec(), 1e-3, 0.0)

    def test_rate_too_low_for_offset(self):
        spec = synth.WaveformSpec(kind=synth.CW, center_offset_hz=8e6)
        with pytest.raises(SpecificationError):
            synth.synth_waveform(spec, 1e-3, 15e6)


class TestCw:
    def test_constant_magnitude(self):
        snap = synth.synth_waveform(cw_spec(jnr_db=0.0), 1e-3, 15e6)
        mags = np.abs(snap.samples)
        assert np.allclose(mags, mags[0], rtol=1e-12)

    def test_energy_matches_linear_power(self):
        # Parseval-style: mean per-sample energy equals configured power
        for db in (0.0, 10.0, -3.0):
            snap = synth.synth_waveform(cw_spec(jnr_db=db), 1e-3, 15e6)
            energy = np.mean(np.abs(snap.samples) ** 2)
            assert abs(energy / 10 ** (db / 10.0) - 1.0) < 1e-9


class TestChirp:
    def test_narrow_chirp_sweep_trace(self):
        # 1 MHz / 100 us sweep at 15 MS/s: peak frequency spans +-0.5 MHz and
        # repeats every 1500 samples, measured by an independent STFT trace
        snap = synth.synth_waveform(chirp_spec(1e6, 100e-6), 8192 / FS_CHIRP, FS_CHIRP)
        frame = 64
        trace = oracle.stft_peak_trace(snap.samples, frame)
        freqs = (trace - frame // 2) * FS_CHIRP / frame
        assert freqs.min() <= -0.35e6 and freqs.max() >= 0.35e6
        assert abs(freqs.min()) <= 0.65e6 and freqs.max() <= 0.65e6
        period = oracle.sweep_period_samples(snap.samples, frame)
        assert abs(period - 1500) <= frame

    def test_wideband_fast_sweep_period(self):
        # 20 MHz / 13 us sweep needs a wider front end; 30 MS/s keeps it clean
        fs = 30e6
        snap = synth.synth_waveform(chirp_spec(20e6, 13e-6), 8192 / fs, fs)
        period = oracle.sweep_period_samples(snap.samples, 32)
        assert abs(period - round(13e-6 * fs)) <= 32

    @pytest.mark.parametrize("shape", ["sawtooth", "triangle"])
    def test_exact_periodicity(self, shape):
        spec = synth.WaveformSpec(kind=synth.CHIRP, bandwidth_hz=1e6,
                                  sweep_time_s=100e-6, sweep_shape=shape)
        snap = synth.synth_waveform(spec, 8192 / FS_CHIRP, FS_CHIRP)
        step = round(100e-6 * FS_CHIRP)
        assert np.allclose(snap.samples[:-step], snap.samples[step:], atol=1e-6)

    def test_swept_kind_generates(self):
        spec = synth.WaveformSpec(kind=synth.SWEPT, bandwidth_hz=15e6,
                                  sweep_time_s=6e-6)
        snap = synth.synth_waveform(spec, 4096 / 40e6, 40e6)
        assert len(snap) == 4096


class TestBpsk:
    def test_chip_boundaries_and_constant_phase(self):
        fs, rate = FS_BPSK, 1.023e6
        snap = synth.synth_waveform(bpsk_spec(rate, 1023, jnr_db=0.0), 4096 / fs, fs)
        samples_per_chip = fs / rate
        assert samples_per_chip == 16.0
        blocks = snap.samples.reshape(-1, 16)
        # constant phase between boundaries (baseband, zero offset)
        assert np.allclose(blocks, blocks[:, :1], rtol=1e-12)
        # chips are +-1 scaled by the amplitude
        chips = blocks[:, 0].real
        assert set(np.sign(chips)) <= {-1.0, 1.0}

    def test_msequence_properties(self):
        chips = synth.mseq_chips(10)
        assert chips.size == 1023
        assert set(chips) == {-1.0, 1.0}
        assert abs(chips.sum()) == 1.0  # maximal-length balance

    def test_prn_repeats_at_sequence_length(self):
        fs, rate, length = FS_BPSK, 1.023e6, 63
        n = int(2.5 * length * fs / rate)
        snap = synth.synth_waveform(bpsk_spec(rate, length), n / fs, fs)
        period = int(length * fs / rate)
        assert np.allclose(snap.samples[:-period], snap.samples[period:], rtol=1e-12)

    def test_non_mseq_length_reproducible(self):
        a = synth.prn_chips(100, seed=7)
        b = synth.prn_chips(100, seed=7)
        assert np.array_equal(a, b)
        assert set(a) <= {-1.0, 1.0}


class TestAwgn:
    def test_zero_sigma_is_identity(self):
        snap = synth.synth_waveform(cw_spec(), 1e-3, 15e6)
        out = synth.add_awgn(snap, 0.0, seed=3)
        assert np.array_equal(out.samples, snap.samples)

    def test_negative_sigma_rejected(self):
        snap = synth.synth_waveform(cw_spec(), 1e-3, 15e6)
        with pytest.raises(DomainError):
            synth.add_awgn(snap, -1.0)

    def test_mean_energy_on_zero_input(self):
        # Monte-Carlo expectation: variance 2 noise has mean energy 2 +- 5%
        empty = synth.IqSnapshot(samples=np.zeros(100_000, dtype=complex),
                                 sample_rate_hz=15e6)
        out = synth.add_awgn(empty, 2.0, seed=11)
        assert abs(oracle.mean_energy(out.samples) - 2.0) < 0.1

    def test_component_variance_split(self):
        empty = synth.IqSnapshot(samples=np.zeros(200_000, dtype=complex),
                                 sample_rate_hz=15e6)
        out = synth.add_awgn(empty, 2.0, seed=5)
        assert abs(np.var(out.samples.real) - 1.0) < 0.05
        assert abs(np.var(out.samples.imag) - 1.0) < 0.05

    def test_same_seed_identical(self):
        snap = synth.synth_waveform(cw_spec(), 1e-3, 15e6)
        a = synth.add_awgn(snap, 1.0, seed=42)
        b = synth.add_awgn(snap, 1.0, seed=42)
        assert np.array_equal(a.samples, b.samples)


def _scenario(jammer_xy=(0.0, 0.0), power_db=20.0, poses=None, noise=1.0):
    poses = poses or [(-500.0, 0.0, list(np.linspace(-np.pi, np.pi, 8, endpoint=False)))]
    return synth.MissionScenario(
        jammer_position=jammer_xy,
        jammer_spec=cw_spec(jnr_db=power_db),
        noise_floor=noise,
        scan_poses=poses,
    )


class TestSimulateScan:
    def test_max_energy_at_bearing(self):
        pattern = make_pattern(np.deg2rad(60), 0.05)
        scans = synth.simulate_scan(_scenario(), pattern)
        pose = scans[0]
        best = pose.headings[np.argmax(pose.energies)]
        # jammer due east of the pose: bearing +pi/2
        assert abs(best - np.pi / 2) < 2 * np.pi / 8 + 1e-9

    def test_pathloss_doubling_distance(self):
        pattern = make_pattern(np.deg2rad(60), 0.05)
        near = synth.simulate_scan(_scenario(poses=[(-100.0, 0.0, [np.pi / 2])]), pattern)
        far = synth.simulate_scan(_scenario(poses=[(-200.0, 0.0, [np.pi / 2])]), pattern)
        ratio = (near[0].energies[0] - 1.0) / (far[0].energies[0] - 1.0)
        assert abs(ratio - 4.0) < 1e-9

    def test_zero_power_reports_noise_floor(self):
        scenario = _scenario(power_db=-np.inf, noise=0.7)
        scans = synth.simulate_scan(scenario, make_pattern(np.deg2rad(60)))
        assert np.all(scans[0].energies == 0.7)

    def test_pose_on_jammer_rejected(self):
        scenario = _scenario(poses=[(0.0, 0.0, [0.0])])
        with pytest.raises(DegenerateGeometryError):
            synth.simulate_scan(scenario, make_pattern(np.deg2rad(60)))

    @settings(max_examples=25, deadline=None)
    @given(theta=st.floats(-np.pi, np.pi, allow_nan=False))
    def test_rotation_equivariance(self, theta):
        pattern = make_pattern(np.deg2rad(60), 0.05)
        headings = list(np.linspace(-np.pi, np.pi, 8, endpoint=False))
        base = synth.simulate_scan(
            _scenario(poses=[(-400.0, 120.0, headings)]), pattern)
        c, s = np.cos(theta), np.sin(theta)
        # rotate pose, jammer, and headings together (headings are compass
        # angles: +theta rotation of the plane subtracts from north bearing)
        rx, ry = c * -400.0 - s * 120.0, s * -400.0 + c * 120.0
        rotated_headings = [float(h - np.arctan2(s, c)) for h in headings]
        rotated = synth.simulate_scan(
            _scenario(poses=[(rx, ry, rotated_headings)]), pattern)
        assert np.allclose(base[0].energies, rotated[0].energies, rtol=1e-9)


class TestDeterminism:
    def test_waveforms_deterministic(self):
        for spec, fs in [(cw_spec(), 15e6), (chirp_spec(), 15e6),
                         (bpsk_spec(), FS_BPSK)]:
            a = synth.synth_waveform(spec, 1e-3, fs, seed=9)
            b = synth.synth_waveform(spec, 1e-3, fs, seed=9)
            assert np.array_equal(a.samples, b.samples)

    def test_mission_records_deterministic(self):
        scenario = _scenario(poses=[(-500.0, 0.0, [0.0, np.pi / 2]),
                                    (400.0, 300.0, [0.0, -np.pi / 2])])
        pattern = make_pattern(np.deg2rad(60), 0.05)
        a = synth.simulate_mission_records(scenario, pattern, 15e6, 512, seed=4)
        b = synth.simulate_mission_records(scenario, pattern, 15e6, 512, seed=4)
        assert all(np.array_equal(x.samples, y.samples) for x, y in zip(a, b))
        assert [x.tow for x in a] == [y.tow for y in b]
