"""File formats: interleaved-IQ records, binary grids, CSV, mission configs.

All binary encodings are little-endian.  The IQ record container holds one
header (shared sampling metadata) and any number of timestamped records of
interleaved float32 I/Q values.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cyclo import AlphaProfile, FamParams, SpectralCorrelation
from .detect import DetectionReport, DetectionThresholds, JammerClass
from .errors import ConfigurationError, CorruptionError, FormatError
from .localize import GridSpec, Heatmap, RadiationPattern, SourceEstimate
from .synth import BANDS, IqSnapshot, MissionScenario, WaveformSpec

IQ_MAGIC = b"JSIQ"
IQ_VERSION = 1
_IQ_HEADER = struct.Struct("<4sIddII")  # magic, version, rate, center, band, count
_IQ_RECORD = struct.Struct("<dI")  # tow, value count

GRID_MAGIC = b"JSIQGRID"
_GRID_HEADER = struct.Struct("<8sI")

_BAND_IDS = {name: i for i, name in enumerate(BANDS)}


def write_iq(snapshots: list[IqSnapshot]) -> bytes:
    """Serialize snapshots sharing one header into the IQ record container."""
    if not snapshots:
        raise ConfigurationError("cannot write an empty snapshot list")
    first = snapshots[0]
    band_id = _BAND_IDS.get(first.band)
    if band_id is None:
        raise ConfigurationError(f"unknown band {first.band!r}")
    out = [_IQ_HEADER.pack(IQ_MAGIC, IQ_VERSION, first.sample_rate_hz,
                           first.center_freq_hz, band_id, len(snapshots))]
    for snap in snapshots:
        interleaved = np.empty(2 * snap.samples.size, dtype="<f4")
        interleaved[0::2] = snap.samples.real
        interleaved[1::2] = snap.samples.imag
        out.append(_IQ_RECORD.pack(snap.tow, interleaved.size))
        out.append(interleaved.tobytes())
    return b"".join(out)


def parse_iq(data: bytes) -> list[IqSnapshot]:
    """Deinterleave an IQ record container back into snapshots.

    Even-indexed float32 values are real parts, odd-indexed imaginary.
    """
    if len(data) < _IQ_HEADER.size:
        raise FormatError("data shorter than the IQ header")
    magic, version, rate, center, band_id, count = _IQ_HEADER.unpack_from(data, 0)
    if magic != IQ_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != IQ_VERSION:
        raise FormatError(f"unsupported version {version}")
    if band_id >= len(BANDS):
        raise FormatError(f"unknown band id {band_id}")
    band = BANDS[band_id]

    snapshots = []
    offset = _IQ_HEADER.size
    for _ in range(count):
        if offset + _IQ_RECORD.size > len(data):
            raise CorruptionError("truncated record header")
        tow, n_values = _IQ_RECORD.unpack_from(data, offset)
        offset += _IQ_RECORD.size
        if n_values % 2 != 0:
            raise CorruptionError(f"odd value count {n_values}")
        nbytes = 4 * n_values
        if offset + nbytes > len(data):
            raise CorruptionError("truncated record body")
        values = np.frombuffer(data, dtype="<f4", count=n_values, offset=offset)
        offset += nbytes
        if not np.all(np.isfinite(values)):
            raise CorruptionError("non-finite sample values")
        # assign components separately: x + 1j*y does not preserve signed zeros
        samples = np.empty(n_values // 2, dtype=np.complex128)
        samples.real = values[0::2]
        samples.imag = values[1::2]
        snapshots.append(IqSnapshot(samples=samples, sample_rate_hz=rate,
                                    center_freq_hz=center, tow=tow, band=band))
    if offset != len(data):
        raise CorruptionError(f"{len(data) - offset} trailing bytes after records")
    return snapshots


def write_grid(values: np.ndarray, axes: list[np.ndarray]) -> bytes:
    """Binary grid: 8-byte magic, dims, per-dim float64 axes, row-major values."""
    values = np.asarray(values, dtype=float)
    if values.ndim != len(axes):
        raise ConfigurationError("one axis per grid dimension required")
    for dim, axis in zip(values.shape, axes):
        if len(axis) != dim:
            raise ConfigurationError("axis length must match its dimension")
    out = [_GRID_HEADER.pack(GRID_MAGIC, values.ndim)]
    out.append(np.asarray(values.shape, dtype="<u4").tobytes())
    for axis in axes:
        out.append(np.asarray(axis, dtype="<f8").tobytes())
    out.append(np.ascontiguousarray(values, dtype="<f8").tobytes())
    return b"".join(out)


def read_grid(data: bytes) -> tuple[np.ndarray, list[np.ndarray]]:
    if len(data) < _GRID_HEADER.size:
        raise FormatError("data shorter than the grid header")
    magic, ndim = _GRID_HEADER.unpack_from(data, 0)
    if magic != GRID_MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    offset = _GRID_HEADER.size
    if offset + 4 * ndim > len(data):
        raise CorruptionError("truncated dims")
    dims = np.frombuffer(data, dtype="<u4", count=ndim, offset=offset)
    offset += 4 * ndim
    axes = []
    for dim in dims:
        if offset + 8 * int(dim) > len(data):
            raise CorruptionError("truncated axis")
        axes.append(np.frombuffer(data, dtype="<f8", count=int(dim), offset=offset).copy())
        offset += 8 * int(dim)
    n_values = int(np.prod(dims))
    if offset + 8 * n_values > len(data):
        raise CorruptionError("truncated values")
    values = np.frombuffer(data, dtype="<f8", count=n_values, offset=offset)
    offset += 8 * n_values
    if offset != len(data):
        raise CorruptionError(f"{len(data) - offset} trailing bytes after grid")
    return values.reshape(tuple(int(d) for d in dims)).copy(), axes


def grid_to_csv(values: np.ndarray, row_axis, col_axis) -> str:
    """Dense CSV: first row is the column axis, first column the row axis."""
    lines = ["," + ",".join(repr(float(a)) for a in col_axis)]
    for label, row in zip(row_axis, np.asarray(values, dtype=float)):
        lines.append(repr(float(label)) + "," + ",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"


def profile_to_csv(values: np.ndarray, axis) -> str:
    lines = ["alpha,value"]
    for a, v in zip(axis, values):
        lines.append(f"{float(a)!r},{float(v)!r}")
    return "\n".join(lines) + "\n"


def scd_to_grid_bytes(scd: SpectralCorrelation) -> bytes:
    """Magnitude surface in the binary grid format (f axis, alpha axis)."""
    return write_grid(scd.magnitude(), [scd.freq_axis, scd.alpha_axis])


def scd_to_csv(scd: SpectralCorrelation) -> str:
    return grid_to_csv(scd.magnitude(), scd.freq_axis, scd.alpha_axis)


def profile_to_grid_bytes(profile: AlphaProfile) -> bytes:
    return write_grid(profile.values, [profile.alpha_axis])


def source_estimate_to_dict(est: SourceEstimate) -> dict:
    return {
        "centroid": [float(est.centroid[0]), float(est.centroid[1])],
        "peak_cell": [float(est.peak_cell[0]), float(est.peak_cell[1])],
        "contour": [[float(x), float(y)] for x, y in est.contour],
        "confidence": float(est.confidence),
    }


def report_to_dict(report: DetectionReport) -> dict:
    return dataclasses.asdict(report)


def jammer_class_to_dict(result: JammerClass) -> dict:
    return {"label": result.label, "evidence": dict(result.evidence)}


def reports_to_jsonl(reports: list[DetectionReport]) -> str:
    return "".join(json.dumps(report_to_dict(r), sort_keys=True) + "\n" for r in reports)


@dataclass
class MissionConfig:
    """Everything one pipeline run needs, loadable from a JSON config file."""

    scenario: MissionScenario | None = None
    fam: FamParams = field(default_factory=FamParams)
    pattern_beamwidth_rad: float = np.deg2rad(60.0)
    pattern_backlobe: float = 0.05
    grid: GridSpec = field(default_factory=GridSpec)
    thresholds: DetectionThresholds | None = None
    calibration_sigma2: float | None = None
    calibration_count: int = 100
    calibration_seed: int = 0
    calibration_margin: float = 1.0
    sample_rate_hz: float = 15e6
    snapshot_len: int = 2048
    seed: int = 0
    band: str = "L1"
    gate_hz: float = 500e3
    extract_quantile: float = 0.97

    def pattern(self) -> RadiationPattern:
        return RadiationPattern(beamwidth_rad=self.pattern_beamwidth_rad,
                                backlobe_floor=self.pattern_backlobe)


def waveform_to_dict(spec: WaveformSpec) -> dict:
    d = dataclasses.asdict(spec)
    return {k: v for k, v in d.items() if v is not None}


def waveform_from_dict(d: dict) -> WaveformSpec:
    return WaveformSpec(**d)


def mission_to_dict(cfg: MissionConfig) -> dict:
    out = {
        "fam": {"window_len": cfg.fam.window_len, "hop": cfg.fam.hop},
        "pattern": {"beamwidth_deg": float(np.rad2deg(cfg.pattern_beamwidth_rad)),
                    "backlobe_floor": cfg.pattern_backlobe},
        "grid": {"origin": list(cfg.grid.origin), "cell_size": cfg.grid.cell_size,
                 "nx": cfg.grid.nx, "ny": cfg.grid.ny},
        "sample_rate_hz": cfg.sample_rate_hz,
        "snapshot_len": cfg.snapshot_len,
        "seed": cfg.seed,
        "band": cfg.band,
        "gate_hz": cfg.gate_hz,
        "extract_quantile": cfg.extract_quantile,
    }
    if cfg.scenario is not None:
        out["scenario"] = {
            "jammer_position": list(cfg.scenario.jammer_position),
            "jammer": waveform_to_dict(cfg.scenario.jammer_spec),
            "noise_floor": cfg.scenario.noise_floor,
            "pathloss_exponent": cfg.scenario.pathloss_exponent,
            "scan_poses": [
                {"x": x, "y": y, "headings": list(map(float, hs))}
                for x, y, hs in cfg.scenario.scan_poses
            ],
        }
    if cfg.thresholds is not None:
        out["thresholds"] = {"energy": cfg.thresholds.energy,
                             "profile": cfg.thresholds.profile}
    elif cfg.calibration_sigma2 is not None:
        out["calibration"] = {"sigma2": cfg.calibration_sigma2,
                              "count": cfg.calibration_count,
                              "seed": cfg.calibration_seed,
                              "margin": cfg.calibration_margin}
    return out


def mission_from_dict(d: dict) -> MissionConfig:
    cfg = MissionConfig()
    if "fam" in d:
        cfg.fam = FamParams(window_len=int(d["fam"]["window_len"]),
                            hop=int(d["fam"]["hop"]))
    if "pattern" in d:
        cfg.pattern_beamwidth_rad = float(np.deg2rad(d["pattern"]["beamwidth_deg"]))
        cfg.pattern_backlobe = float(d["pattern"].get("backlobe_floor", 0.0))
    if "grid" in d:
        g = d["grid"]
        cfg.grid = GridSpec(origin=tuple(g["origin"]), cell_size=float(g["cell_size"]),
                            nx=int(g["nx"]), ny=int(g["ny"]))
    for key in ("sample_rate_hz", "snapshot_len", "seed", "band", "gate_hz",
                "extract_quantile"):
        if key in d:
            setattr(cfg, key, d[key])
    if "scenario" in d:
        s = d["scenario"]
        cfg.scenario = MissionScenario(
            jammer_position=tuple(s["jammer_position"]),
            jammer_spec=waveform_from_dict(s["jammer"]),
            noise_floor=float(s["noise_floor"]),
            scan_poses=[(p["x"], p["y"], list(p["headings"])) for p in s["scan_poses"]],
            pathloss_exponent=float(s.get("pathloss_exponent", 2.0)),
        )
    if "thresholds" in d:
        cfg.thresholds = DetectionThresholds(energy=float(d["thresholds"]["energy"]),
                                             profile=float(d["thresholds"]["profile"]))
    if "calibration" in d:
        c = d["calibration"]
        cfg.calibration_sigma2 = float(c["sigma2"])
        cfg.calibration_count = int(c.get("count", 100))
        cfg.calibration_seed = int(c.get("seed", 0))
        cfg.calibration_margin = float(c.get("margin", 1.0))
    return cfg


def load_mission(path: str | Path) -> MissionConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"mission file is not valid JSON: {exc}") from exc
    return mission_from_dict(data)


def save_mission(cfg: MissionConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(mission_to_dict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def heatmap_to_grid_bytes(hm: Heatmap) -> bytes:
    ny, nx = hm.grid.shape
    x = hm.origin[0] + (np.arange(nx) + 0.5) * hm.cell_size
    y = hm.origin[1] + (np.arange(ny) + 0.5) * hm.cell_size
    return write_grid(hm.grid, [y, x])


def heatmap_to_csv(hm: Heatmap) -> str:
    ny, nx = hm.grid.shape
    x = hm.origin[0] + (np.arange(nx) + 0.5) * hm.cell_size
    y = hm.origin[1] + (np.arange(ny) + 0.5) * hm.cell_size
    return grid_to_csv(hm.grid, y, x)
