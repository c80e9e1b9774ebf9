"""GNSS-band jammer detection, classification, and localization toolkit."""

from .cyclo import (
    AlphaProfile,
    AutocorrResult,
    CoherenceMap,
    FamParams,
    SpectralCorrelation,
    alpha_profile,
    channelize,
    coherence,
    cyclic_autocorr,
    fam_scd,
)
from .detect import (
    ClassifierConfig,
    DetectionReport,
    DetectionThresholds,
    JammerClass,
    Peak,
    PeakTrack,
    band_energy,
    calibrate_thresholds,
    classify,
    detection_report,
    energy_decide,
    find_peaks,
    track_peaks,
)
from .localize import (
    GridSpec,
    Heatmap,
    RadiationPattern,
    ScanPose,
    SourceEstimate,
    extract_source,
    fuse_scans,
    make_pattern,
)
from .synth import (
    IqSnapshot,
    MissionScenario,
    WaveformSpec,
    add_awgn,
    simulate_mission_records,
    simulate_scan,
    synth_waveform,
)

__version__ = "0.1.0"
