"""Energy-detector hypothesis test, peak extraction/tracking, and jammer labeling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cyclo import AlphaProfile, AutocorrResult, CoherenceMap, SpectralCorrelation
from .errors import (
    CalibrationError,
    ConfigurationError,
    InsufficientDataError,
    SequencingError,
)
from .synth import IqSnapshot

H0 = "H0_benign"
H1 = "H1_jamming"

NONE = "NONE"
CW_TONE = "CW_TONE"
CHIRP = "CHIRP"
SWEPT = "SWEPT"
BPSK_PRN = "BPSK_PRN"
COMPOUND = "COMPOUND"

ACTIVE = "active"
COASTING = "coasting"
CLOSED = "closed"


@dataclass(frozen=True)
class DetectionThresholds:
    energy: float
    profile: float


@dataclass
class DetectionReport:
    """Per-snapshot hypothesis decision with the statistics that drove it."""

    decision: str
    band_energy: float
    profile_max: float
    threshold_energy: float
    threshold_profile: float
    tow: float
    band: str


@dataclass
class Peak:
    magnitude: float
    freq_center_hz: float
    alpha_center: float
    bins: tuple[int, ...]


@dataclass
class PeakTrack:
    """Time-linked sequence of surface peaks assumed to be one emitter."""

    track_id: int
    history: list[tuple[float, Peak]] = field(default_factory=list)
    status: str = ACTIVE
    missed: int = 0

    @property
    def last_freq(self) -> float:
        return self.history[-1][1].freq_center_hz

    @property
    def last_tow(self) -> float:
        return self.history[-1][0]


@dataclass
class JammerClass:
    label: str
    evidence: dict[str, float] = field(default_factory=dict)


def band_energy(snapshot: IqSnapshot) -> float:
    """Mean per-sample squared magnitude of the snapshot."""
    if snapshot.samples.size == 0:
        raise InsufficientDataError("cannot compute energy of an empty snapshot")
    return float(np.mean(np.abs(snapshot.samples) ** 2))


def energy_decide(e: float, threshold: float) -> str:
    """H1 iff the measured energy strictly exceeds the threshold."""
    if threshold <= 0:
        raise ConfigurationError("energy threshold must be positive")
    return H1 if e > threshold else H0


def calibrate_thresholds(
    benign_profiles: list[AlphaProfile],
    benign_energies: list[float],
    margin: float = 1.0,
) -> DetectionThresholds:
    """Thresholds from benign data: margin times the benign maxima.

    Any statistic exceeding the corresponding threshold on fresh data is
    treated as adversarial.
    """
    if not benign_profiles or not len(benign_energies):
        raise CalibrationError("calibration needs at least one benign sample")
    if margin < 1.0:
        raise ConfigurationError("margin must be >= 1")
    profile_max = max(float(np.max(p.values)) for p in benign_profiles)
    energy_max = float(np.max(benign_energies))
    return DetectionThresholds(energy=margin * energy_max, profile=margin * profile_max)


def detection_report(
    energy: float,
    profile_max: float,
    thresholds: DetectionThresholds,
    tow: float = 0.0,
    band: str = "L1",
    policy: str = "either",
) -> DetectionReport:
    """Combine the energy and profile statistics into one decision.

    ``policy`` selects whether one ("either", default) or both ("both")
    statistics must strictly exceed their thresholds for H1.
    """
    if policy not in ("either", "both"):
        raise ConfigurationError(f"unknown decision policy {policy!r}")
    hits = (energy > thresholds.energy, profile_max > thresholds.profile)
    jamming = any(hits) if policy == "either" else all(hits)
    return DetectionReport(
        decision=H1 if jamming else H0,
        band_energy=energy,
        profile_max=profile_max,
        threshold_energy=thresholds.energy,
        threshold_profile=thresholds.profile,
        tow=tow,
        band=band,
    )


def find_peaks(surface, threshold: float) -> list[Peak]:
    """Strict local maxima at or above ``threshold``, strongest first.

    2-D surfaces use the 8-neighborhood, profiles the 2-neighborhood.
    Equal-magnitude peaks are ordered by lowest bin index.
    """
    if isinstance(surface, SpectralCorrelation):
        grid = surface.magnitude()
        return _peaks_2d(grid, threshold, surface.freq_axis, surface.alpha_axis)
    if isinstance(surface, CoherenceMap):
        return _peaks_2d(surface.values, threshold, surface.freq_axis, surface.alpha_axis)
    if isinstance(surface, AlphaProfile):
        return _peaks_1d(surface.values, threshold, surface.alpha_axis)
    raise ConfigurationError(f"cannot find peaks on {type(surface).__name__}")


def _peaks_2d(grid, threshold, freq_axis, alpha_axis):
    padded = np.full((grid.shape[0] + 2, grid.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = grid
    center = padded[1:-1, 1:-1]
    is_max = np.ones(grid.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = padded[1 + di : 1 + di + grid.shape[0], 1 + dj : 1 + dj + grid.shape[1]]
            is_max &= center > nb
    is_max &= grid >= threshold
    rows, cols = np.nonzero(is_max)
    peaks = [
        Peak(magnitude=float(grid[r, c]), freq_center_hz=float(freq_axis[r]),
             alpha_center=float(alpha_axis[c]), bins=(int(r), int(c)))
        for r, c in zip(rows, cols)
    ]
    peaks.sort(key=lambda p: (-p.magnitude, p.bins))
    return peaks


def _peaks_1d(values, threshold, alpha_axis):
    v = np.asarray(values, dtype=float)
    is_max = np.zeros(v.size, dtype=bool)
    if v.size >= 3:
        is_max[1:-1] = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    is_max &= v >= threshold
    idx = np.nonzero(is_max)[0]
    peaks = [
        Peak(magnitude=float(v[i]), freq_center_hz=0.0,
             alpha_center=float(alpha_axis[i]), bins=(int(i),))
        for i in idx
    ]
    peaks.sort(key=lambda p: (-p.magnitude, p.bins))
    return peaks


def track_peaks(
    tracks: list[PeakTrack],
    peaks: list[Peak],
    tow: float,
    gate_hz: float,
    coast_limit: int = 2,
) -> list[PeakTrack]:
    """Associate new peaks to tracks by greedy minimum frequency distance.

    Peaks farther than ``gate_hz`` from every open track open new tracks.
    Open tracks with no peak this update coast, and close after
    ``coast_limit`` consecutive misses.  Tow values must strictly increase
    across calls.
    """
    open_tracks = [t for t in tracks if t.status != CLOSED]
    if open_tracks:
        last = max(t.last_tow for t in open_tracks if t.history)
        if tow <= last:
            raise SequencingError(f"tow {tow} not after previous update {last}")

    pairs = sorted(
        (abs(t.last_freq - p.freq_center_hz), ti, pi)
        for ti, t in enumerate(open_tracks)
        for pi, p in enumerate(peaks)
    )
    matched_t: set[int] = set()
    matched_p: set[int] = set()
    for dist, ti, pi in pairs:
        if dist > gate_hz:
            break
        if ti in matched_t or pi in matched_p:
            continue
        matched_t.add(ti)
        matched_p.add(pi)
        track = open_tracks[ti]
        track.history.append((tow, peaks[pi]))
        track.status = ACTIVE
        track.missed = 0

    for ti, track in enumerate(open_tracks):
        if ti in matched_t:
            continue
        track.missed += 1
        track.status = CLOSED if track.missed > coast_limit else COASTING

    next_id = max((t.track_id for t in tracks), default=-1) + 1
    for pi, peak in enumerate(peaks):
        if pi in matched_p:
            continue
        tracks.append(PeakTrack(track_id=next_id, history=[(tow, peak)]))
        next_id += 1
    return tracks


@dataclass(frozen=True)
class ClassifierConfig:
    """Rule thresholds for coarse jammer labeling.

    Defaults are tuned on synthesized CW / chirp / BPSK / noise batteries at
    jammer-to-noise ratios of 10 dB and above: periodicity significance sits
    between noise (< 5) and in-snapshot chirps (> 60), and the flatness bound
    between tones (~1.0) and everything else (> 3.5).
    """

    drift_bins_per_snapshot: float = 2.0
    comb_min_strength: float = 0.25
    coh_lobe_threshold: float = 0.8
    min_coh_lobes: int = 2
    period_significance: float = 8.0
    tone_flatness_max: float = 2.0
    min_track_history: int = 3


def _comb_spacing(profile: AlphaProfile) -> tuple[int, float]:
    """Dominant spacing (alpha bins) of a uniform comb in the profile.

    Detected by autocorrelating the mean-removed profile (alpha = 0 column
    excluded) and taking the strongest interior local maximum.  Returns
    (spacing_bins, strength in [0, 1]); spacing 0 when no interior peak.
    """
    q = profile.values[1:] - profile.values[1:].mean()
    if q.size < 8 or not np.any(q):
        return 0, 0.0
    r = np.correlate(q, q, mode="full")[q.size - 1 :]
    half = q.size // 2
    seg = r[: half + 1]
    interior = np.zeros(seg.size, dtype=bool)
    interior[2:-1] = (seg[2:-1] > seg[1:-2]) & (seg[2:-1] > seg[3:])
    idx = np.nonzero(interior)[0]
    if idx.size == 0 or r[0] <= 0:
        return 0, 0.0
    best = int(idx[np.argmax(seg[idx])])
    return best, float(seg[best] / r[0])


def _coherence_lobes(coh: CoherenceMap, threshold: float, min_alpha_bin: int = 2):
    """Runs of consecutive alpha columns whose peak coherence exceeds threshold."""
    col_max = coh.values[:, min_alpha_bin:].max(axis=0)
    above = col_max > threshold
    lobes = []
    start = None
    for i, flag in enumerate(above):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            lobes.append((start + min_alpha_bin, i - 1 + min_alpha_bin))
            start = None
    if start is not None:
        lobes.append((start + min_alpha_bin, above.size - 1 + min_alpha_bin))
    return lobes


def _dominant_track(tracks: list[PeakTrack]) -> PeakTrack | None:
    candidates = [t for t in tracks if t.history]
    if not candidates:
        return None
    return max(candidates, key=lambda t: (len(t.history),
                                          sum(p.magnitude for _, p in t.history)))


def _drift_rate_bins(track: PeakTrack, f_bin_hz: float) -> float:
    freqs = np.array([p.freq_center_hz for _, p in track.history])
    if freqs.size < 2:
        return 0.0
    return float(np.median(np.abs(np.diff(freqs))) / f_bin_hz)


def classify(
    tracks: list[PeakTrack],
    profile: AlphaProfile,
    coh: CoherenceMap,
    autocorr: AutocorrResult,
    thresholds: DetectionThresholds | None = None,
    config: ClassifierConfig | None = None,
) -> JammerClass:
    """Rule-based jammer labeling from one snapshot stream's statistics.

    Signatures evaluated independently:
      * BPSK_PRN: uniform alpha-comb in the profile plus multi-lobe
        coherence structure at nonzero alpha.
      * sweep family: an isolated significant autocorrelation peak (the
        sweep repeats within the snapshot) or cross-snapshot drift of the
        dominant track; labeled CHIRP when the period is measurable from
        the autocorrelation, SWEPT otherwise.
      * CW_TONE: a stationary dominant track with a flat autocorrelation
        magnitude (constant-envelope unmodulated carrier).

    Two or more simultaneous signatures yield COMPOUND; none yields NONE
    (also returned when thresholds are supplied and the profile statistic
    stays at or below its threshold).  The evidence map is always populated.
    """
    config = config or ClassifierConfig()

    spacing_bins, comb_strength = _comb_spacing(profile)
    alpha_step = float(profile.alpha_axis[1] - profile.alpha_axis[0])
    lobes = _coherence_lobes(coh, config.coh_lobe_threshold)
    f_bin_hz = float(coh.freq_axis[1] - coh.freq_axis[0])

    track = _dominant_track(tracks)
    drift_bins = _drift_rate_bins(track, f_bin_hz) if track else 0.0
    track_len = len(track.history) if track else 0

    med = float(np.median(autocorr.magnitudes))
    period_ratio = autocorr.statistic / med if med > 0 else 0.0
    flatness = float(autocorr.magnitudes.max() / med) if med > 0 else np.inf

    alpha0_dominance = (
        float(profile.values[0] / profile.values[1:].max())
        if profile.values.size > 1 and profile.values[1:].max() > 0 else np.inf
    )

    periodic = autocorr.isolated and period_ratio >= config.period_significance
    drifting = (
        track_len >= config.min_track_history
        and drift_bins >= config.drift_bins_per_snapshot
    )
    sweep_sig = periodic or drifting
    bpsk_sig = (
        spacing_bins >= 2
        and comb_strength >= config.comb_min_strength
        and len(lobes) >= config.min_coh_lobes
        and not periodic
    )
    tone_sig = (
        track is not None
        and drift_bins < config.drift_bins_per_snapshot
        and flatness <= config.tone_flatness_max
    )

    evidence = {
        "peak_count": float(sum(len(t.history) for t in tracks)),
        "track_count": float(len([t for t in tracks if t.status != CLOSED])),
        "drift_rate_bins_per_snapshot": drift_bins,
        "alpha_comb_spacing": spacing_bins * alpha_step,
        "alpha_comb_strength": comb_strength,
        "coherence_lobe_count": float(len(lobes)),
        "sweep_period_s": autocorr.period_s if periodic else 0.0,
        "period_significance": period_ratio,
        "autocorr_flatness": flatness,
        "alpha0_dominance": alpha0_dominance,
        "profile_max": float(profile.values.max()),
    }

    if thresholds is not None and profile.values.max() <= thresholds.profile:
        return JammerClass(label=NONE, evidence=evidence)

    fired = []
    if bpsk_sig:
        fired.append(BPSK_PRN)
    if sweep_sig:
        fired.append(CHIRP if periodic else SWEPT)
    if tone_sig:
        fired.append(CW_TONE)

    if len(fired) >= 2:
        label = COMPOUND
    elif len(fired) == 1:
        label = fired[0]
    elif thresholds is not None and track is not None:
        # detected but no clean signature: fall back on track kinematics
        label = SWEPT if drift_bins >= config.drift_bins_per_snapshot else CW_TONE
    else:
        label = NONE
    return JammerClass(label=label, evidence=evidence)
