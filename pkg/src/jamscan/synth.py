"""Jammer waveform synthesis, noise injection, and scan-mission simulation.

Waveforms are complex baseband with powers on a relative linear scale (no
absolute dBm calibration).  All generators are pure functions of their
arguments and seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometryError, DomainError, SpecificationError
from .localize import RadiationPattern, ScanPose, bearing

BANDS = ("L1", "L2", "L5", "OTHER")

CW = "CW"
CHIRP = "CHIRP"
SWEPT = "SWEPT"
BPSK_PRN = "BPSK_PRN"
_KINDS = (CW, CHIRP, SWEPT, BPSK_PRN)

# m-sequence feedback taps (1-based register indices) per register length
_MSEQ_TAPS = {
    3: (3, 2), 4: (4, 3), 5: (5, 3), 6: (6, 5), 7: (7, 6),
    8: (8, 6, 5, 4), 9: (9, 5), 10: (10, 7), 11: (11, 9),
    12: (12, 11, 10, 4), 13: (13, 12, 11, 8), 14: (14, 13, 12, 2),
    15: (15, 14), 16: (16, 15, 13, 4),
}


@dataclass
class WaveformSpec:
    """One jammer emission: kind, spectral placement, and modulation rates.

    ``sweep_time_s`` is required for CHIRP/SWEPT, ``chip_rate_cps`` and
    ``prn_length`` for BPSK_PRN; each must be absent otherwise.
    ``power_dbm`` is a relative dB level (0 dB = unit linear power).
    """

    kind: str
    center_offset_hz: float = 0.0
    bandwidth_hz: float = 0.0
    sweep_time_s: float | None = None
    chip_rate_cps: float | None = None
    prn_length: int | None = None
    power_dbm: float = 0.0
    phase_offset_rad: float = 0.0
    sweep_shape: str = "sawtooth"  # or "triangle"

    def validate(self) -> None:
        if self.kind not in _KINDS:
            raise SpecificationError(f"unknown waveform kind {self.kind!r}")
        if self.bandwidth_hz < 0:
            raise SpecificationError("bandwidth must be >= 0")
        needs_sweep = self.kind in (CHIRP, SWEPT)
        if needs_sweep and (self.sweep_time_s is None or self.sweep_time_s <= 0):
            raise SpecificationError(f"{self.kind} requires sweep_time_s > 0")
        if not needs_sweep and self.sweep_time_s is not None:
            raise SpecificationError(f"{self.kind} must not set sweep_time_s")
        needs_chips = self.kind == BPSK_PRN
        if needs_chips:
            if self.chip_rate_cps is None or self.chip_rate_cps <= 0:
                raise SpecificationError("BPSK_PRN requires chip_rate_cps > 0")
            if self.prn_length is None or self.prn_length < 1:
                raise SpecificationError("BPSK_PRN requires prn_length >= 1")
        else:
            if self.chip_rate_cps is not None or self.prn_length is not None:
                raise SpecificationError(
                    f"{self.kind} must not set chip_rate_cps/prn_length"
                )
        if self.sweep_shape not in ("sawtooth", "triangle"):
            raise SpecificationError(f"unknown sweep shape {self.sweep_shape!r}")

    @property
    def linear_power(self) -> float:
        return 10.0 ** (self.power_dbm / 10.0)


@dataclass
class IqSnapshot:
    """One timestamped block of complex baseband samples."""

    samples: np.ndarray
    sample_rate_hz: float
    center_freq_hz: float = 0.0
    tow: float = 0.0
    band: str = "L1"

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)

    def validate(self) -> None:
        if self.samples.size == 0:
            raise DomainError("snapshot has no samples")
        if not np.all(np.isfinite(self.samples.view(np.float64))):
            raise DomainError("snapshot contains non-finite samples")
        if self.sample_rate_hz <= 0:
            raise DomainError("sample rate must be positive")

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass
class MissionScenario:
    """Ground truth for a simulated scanning mission."""

    jammer_position: tuple[float, float]
    jammer_spec: WaveformSpec
    noise_floor: float
    scan_poses: list[tuple[float, float, list[float]]] = field(default_factory=list)
    pathloss_exponent: float = 2.0

    def validate(self, for_localization: bool = False) -> None:
        self.jammer_spec.validate()
        if self.noise_floor < 0:
            raise DomainError("noise floor must be >= 0")
        if for_localization and len(self.scan_poses) < 2:
            raise SpecificationError("localization needs at least 2 scan poses")


def mseq_chips(register_bits: int, seed_state: int = 1) -> np.ndarray:
    """Maximal-length +-1 shift-register sequence of length 2^bits - 1."""
    taps = _MSEQ_TAPS[register_bits]
    state = [(seed_state >> i) & 1 for i in range(register_bits)]
    if not any(state):
        state[0] = 1
    n = (1 << register_bits) - 1
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        out[i] = 1.0 - 2.0 * state[-1]
        fb = 0
        for t in taps:
            fb ^= state[t - 1]
        state = [fb] + state[:-1]
    return out


def prn_chips(length: int, seed: int) -> np.ndarray:
    """+-1 chip sequence: an m-sequence when length is 2^m - 1, else seeded RNG."""
    bits = int(round(np.log2(length + 1)))
    if (1 << bits) - 1 == length and bits in _MSEQ_TAPS:
        return mseq_chips(bits)
    rng = np.random.default_rng(seed)
    return rng.choice([-1.0, 1.0], size=length)


def _sweep_fraction(t: np.ndarray, period: float, shape: str) -> np.ndarray:
    """Instantaneous sweep position in [0, 1] as a function of time in-period."""
    frac = np.mod(t, period) / period
    if shape == "triangle":
        return 1.0 - np.abs(2.0 * frac - 1.0)
    return frac


def synth_waveform(
    spec: WaveformSpec,
    duration_s: float,
    sample_rate_hz: float,
    seed: int = 0,
    tow: float = 0.0,
    band: str = "L1",
    center_freq_hz: float = 0.0,
) -> IqSnapshot:
    """Generate a noiseless jammer snapshot from its specification.

    CW emits a constant complex exponential at the center offset.  CHIRP and
    SWEPT sweep the instantaneous frequency linearly across the bandwidth
    each sweep period (sawtooth retrace by default, triangle by flag); the
    phase is a function of time-within-period only, so the waveform is
    exactly periodic.  BPSK_PRN multiplies the offset carrier by a +-1
    pseudorandom chip sequence at the chip rate.
    """
    spec.validate()
    if duration_s <= 0 or sample_rate_hz <= 0:
        raise DomainError("duration and sample rate must be positive")
    n = int(round(duration_s * sample_rate_hz))
    if n < 2:
        raise DomainError("snapshot must contain at least 2 samples")
    if sample_rate_hz <= 2.0 * abs(spec.center_offset_hz) + spec.bandwidth_hz / 2.0:
        raise SpecificationError(
            "sample rate too low for the requested offset/bandwidth"
        )

    t = np.arange(n) / sample_rate_hz
    amp = np.sqrt(spec.linear_power)

    if spec.kind == CW:
        phase = 2.0 * np.pi * spec.center_offset_hz * t + spec.phase_offset_rad
        samples = amp * np.exp(1j * phase)
    elif spec.kind in (CHIRP, SWEPT):
        period = spec.sweep_time_s
        tau = np.mod(t, period)
        if spec.sweep_shape == "triangle":
            half = period / 2.0
            up = tau < half
            f_lo = spec.center_offset_hz - spec.bandwidth_hz / 2.0
            rate = spec.bandwidth_hz / half
            # phase integral of the triangle frequency law, per segment
            phase = np.where(
                up,
                f_lo * tau + 0.5 * rate * tau**2,
                f_lo * half + 0.5 * rate * half**2
                + (f_lo + spec.bandwidth_hz) * (tau - half)
                - 0.5 * rate * (tau - half) ** 2,
            )
            phase = 2.0 * np.pi * phase + spec.phase_offset_rad
        else:
            f_lo = spec.center_offset_hz - spec.bandwidth_hz / 2.0
            phase = (
                2.0 * np.pi
                * (f_lo * tau + spec.bandwidth_hz * tau**2 / (2.0 * period))
                + spec.phase_offset_rad
            )
        samples = amp * np.exp(1j * phase)
    else:  # BPSK_PRN
        chips = prn_chips(spec.prn_length, seed)
        # epsilon absorbs float error at exact chip boundaries (commensurate rates)
        frac = np.arange(n) * (spec.chip_rate_cps / sample_rate_hz)
        idx = np.floor(frac + 1e-9).astype(np.int64) % spec.prn_length
        carrier = np.exp(
            1j * (2.0 * np.pi * spec.center_offset_hz * t + spec.phase_offset_rad)
        )
        samples = amp * chips[idx] * carrier

    return IqSnapshot(samples=samples, sample_rate_hz=sample_rate_hz,
                      center_freq_hz=center_freq_hz, tow=tow, band=band)


def add_awgn(snapshot: IqSnapshot, sigma2: float, seed: int = 0) -> IqSnapshot:
    """Add circular complex Gaussian noise of total per-sample variance sigma2."""
    if sigma2 < 0:
        raise DomainError("noise variance must be >= 0")
    if sigma2 == 0:
        noisy = snapshot.samples.copy()
    else:
        rng = np.random.default_rng(seed)
        n = snapshot.samples.size
        scale = np.sqrt(sigma2 / 2.0)
        noisy = snapshot.samples + scale * (
            rng.standard_normal(n) + 1j * rng.standard_normal(n)
        )
    return IqSnapshot(samples=noisy, sample_rate_hz=snapshot.sample_rate_hz,
                      center_freq_hz=snapshot.center_freq_hz, tow=snapshot.tow,
                      band=snapshot.band)


def simulate_scan(scenario: MissionScenario, pattern: RadiationPattern) -> list[ScanPose]:
    """Analytic per-heading energies for every pose of a mission.

    energy = jammer linear power * distance^-exponent * gain(bearing-to-jammer
    minus heading) + noise floor.  No IQ synthesis; use
    :func:`simulate_mission_records` for sample-level simulation.
    """
    scenario.validate()
    jx, jy = scenario.jammer_position
    power = scenario.jammer_spec.linear_power
    poses = []
    for px, py, headings in scenario.scan_poses:
        headings = np.asarray(headings, dtype=float)
        d = float(np.hypot(jx - px, jy - py))
        if d == 0.0:
            raise DegenerateGeometryError("scan pose coincides with the jammer")
        brg = bearing((px, py), jx, jy)
        gains = pattern.gain(brg - headings)
        energies = power * d ** (-scenario.pathloss_exponent) * gains + scenario.noise_floor
        poses.append(ScanPose(position=(px, py), headings=headings, energies=energies))
    return poses


def simulate_mission_records(
    scenario: MissionScenario,
    pattern: RadiationPattern,
    sample_rate_hz: float,
    snapshot_len: int = 2048,
    seed: int = 0,
    cadence_s: float = 2.0,
    band: str = "L1",
) -> list[IqSnapshot]:
    """IQ-level mission simulation: one snapshot per (pose, heading).

    The jammer waveform amplitude at each heading is scaled by the square
    root of the propagation-and-pattern energy factor, then noise at the
    scenario noise floor is added.  Snapshots are tagged with tow values
    advancing at the snapshot cadence (default 0.5 Hz), pose-major and
    heading-minor, matching the pose list order.
    """
    scenario.validate()
    jx, jy = scenario.jammer_position
    duration = snapshot_len / sample_rate_hz
    records = []
    tow = 0.0
    seq = np.random.SeedSequence(seed)
    for px, py, headings in scenario.scan_poses:
        d = float(np.hypot(jx - px, jy - py))
        if d == 0.0:
            raise DegenerateGeometryError("scan pose coincides with the jammer")
        brg = float(bearing((px, py), jx, jy))
        for psi in headings:
            child = seq.spawn(1)[0]
            sub_seed = int(child.generate_state(1)[0])
            gain = float(pattern.gain(brg - psi))
            factor = d ** (-scenario.pathloss_exponent) * gain
            snap = synth_waveform(scenario.jammer_spec, duration, sample_rate_hz,
                                  seed=sub_seed, tow=tow, band=band)
            snap.samples *= np.sqrt(factor)
            snap = add_awgn(snap, scenario.noise_floor, seed=sub_seed)
            records.append(snap)
            tow += cadence_s
    return records
