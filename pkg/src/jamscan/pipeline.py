"""End-to-end orchestration: detection, tracking, classification, localization.

A pipeline run is a pure function of the mission configuration, the input
records (or the simulation seeds), and the calibration source.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cyclo, detect, localize, synth
from .errors import CalibrationError, InputError
from .formats import MissionConfig

# SCD peaks below this fraction of the per-snapshot surface maximum are not
# fed to the tracker
PEAK_FRACTION = 0.25


@dataclass
class PipelineResult:
    reports: list[detect.DetectionReport] = field(default_factory=list)
    tracks: list[detect.PeakTrack] = field(default_factory=list)
    jammer_class: detect.JammerClass = field(
        default_factory=lambda: detect.JammerClass(label=detect.NONE)
    )
    heatmap: localize.Heatmap | None = None
    estimate: localize.SourceEstimate | None = None
    thresholds: detect.DetectionThresholds | None = None

    @property
    def jamming_detected(self) -> bool:
        return any(r.decision == detect.H1 for r in self.reports)


def synthesize_benign(
    count: int, sigma2: float, snapshot_len: int, sample_rate_hz: float,
    seed: int, band: str = "L1",
) -> list[synth.IqSnapshot]:
    """Seeded AWGN-only snapshots for threshold calibration."""
    out = []
    for i in range(count):
        empty = synth.IqSnapshot(samples=np.zeros(snapshot_len, dtype=complex),
                                 sample_rate_hz=sample_rate_hz, band=band)
        out.append(synth.add_awgn(empty, sigma2, seed=seed + i))
    return out


def resolve_thresholds(mission: MissionConfig) -> detect.DetectionThresholds:
    """Explicit thresholds, or calibration from synthetic benign snapshots."""
    if mission.thresholds is not None:
        return mission.thresholds
    if mission.calibration_sigma2 is None:
        raise CalibrationError(
            "mission provides neither thresholds nor a benign calibration source"
        )
    benign = synthesize_benign(mission.calibration_count, mission.calibration_sigma2,
                               mission.snapshot_len, mission.sample_rate_hz,
                               mission.calibration_seed, mission.band)
    profiles = [cyclo.alpha_profile(cyclo.fam_scd(s, mission.fam)) for s in benign]
    energies = [detect.band_energy(s) for s in benign]
    return detect.calibrate_thresholds(profiles, energies, mission.calibration_margin)


def run_pipeline(
    mission: MissionConfig,
    records: list[synth.IqSnapshot] | None = None,
) -> PipelineResult:
    """Run detection, tracking, classification, and localization.

    ``records=None`` simulates the mission scenario at IQ level.  When the
    mission carries scan poses, records must arrive pose-major and
    heading-minor (the order :func:`synth.simulate_mission_records` emits);
    per-heading energies and detection masks then feed scan fusion.
    """
    thresholds = resolve_thresholds(mission)

    if records is None:
        if mission.scenario is None:
            raise InputError("no records given and no scenario to simulate")
        records = synth.simulate_mission_records(
            mission.scenario, mission.pattern(), mission.sample_rate_hz,
            snapshot_len=mission.snapshot_len, seed=mission.seed, band=mission.band,
        )
    if not records:
        raise InputError("no snapshots to process")

    result = PipelineResult(thresholds=thresholds)
    surfaces = []
    for snap in records:
        energy = detect.band_energy(snap)
        scd = cyclo.fam_scd(snap, mission.fam)
        profile = cyclo.alpha_profile(scd)
        report = detect.detection_report(energy, float(profile.values.max()),
                                         thresholds, tow=snap.tow, band=snap.band)
        result.reports.append(report)
        surfaces.append((snap, scd, profile, report))

    # peak tracking over jamming-flagged snapshots only
    for snap, scd, _, report in surfaces:
        if report.decision != detect.H1:
            continue
        peak_threshold = PEAK_FRACTION * float(scd.magnitude().max())
        peaks = detect.find_peaks(scd, peak_threshold)
        detect.track_peaks(result.tracks, peaks[:8], snap.tow, mission.gate_hz)

    flagged = [(snap, scd, profile) for snap, scd, profile, r in surfaces
               if r.decision == detect.H1]
    if flagged:
        mean_profile = cyclo.AlphaProfile(
            values=np.mean([p.values for _, _, p in flagged], axis=0),
            alpha_axis=flagged[0][2].alpha_axis,
        )
        strongest, strongest_scd, _ = max(
            flagged, key=lambda t: detect.band_energy(t[0])
        )
        result.jammer_class = detect.classify(
            result.tracks, mean_profile, cyclo.coherence(strongest_scd),
            cyclo.cyclic_autocorr(strongest), thresholds,
        )

    scenario = mission.scenario
    if scenario is not None and len(scenario.scan_poses) >= 2:
        result.heatmap, result.estimate = _localize_from_records(
            mission, records, thresholds
        )
    return result


def _localize_from_records(mission, records, thresholds):
    """Group per-heading snapshots into scan poses and fuse them."""
    poses = []
    idx = 0
    for x, y, headings in mission.scenario.scan_poses:
        n = len(headings)
        if idx + n > len(records):
            raise InputError("record stream shorter than the mission pose plan")
        energies = np.array([detect.band_energy(records[idx + k]) for k in range(n)])
        mask = (energies > thresholds.energy).astype(float)
        poses.append(localize.ScanPose(position=(x, y),
                                       headings=np.asarray(headings, dtype=float),
                                       energies=energies, weight=mask))
        idx += n
    heatmap = localize.fuse_scans(poses, mission.pattern(), mission.grid)
    estimate = localize.extract_source(heatmap, mission.extract_quantile)
    return heatmap, estimate
