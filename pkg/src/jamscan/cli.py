"""Command-line interface.

Subcommands: synth, simulate, detect, classify, fuse, report.
Exit codes: 0 completed benign, 10 jamming detected, 2 input error,
3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import cyclo, detect, formats, localize, pipeline, synth
from .errors import (
    CalibrationError,
    ConfigurationError,
    CorruptionError,
    DomainError,
    FormatError,
    InputError,
    InsufficientDataError,
    JamscanError,
    SpecificationError,
)

EXIT_OK = 0
EXIT_JAMMING = 10
EXIT_INPUT = 2
EXIT_CONFIG = 3

_INPUT_ERRORS = (FormatError, CorruptionError, InputError, InsufficientDataError,
                 DomainError)
_CONFIG_ERRORS = (ConfigurationError, CalibrationError, SpecificationError)


def _add_waveform_args(p):
    p.add_argument("--kind", required=True,
                   choices=[synth.CW, synth.CHIRP, synth.SWEPT, synth.BPSK_PRN])
    p.add_argument("--offset-hz", type=float, default=0.0)
    p.add_argument("--bandwidth-hz", type=float, default=0.0)
    p.add_argument("--sweep-time-s", type=float, default=None)
    p.add_argument("--chip-rate", type=float, default=None)
    p.add_argument("--prn-length", type=int, default=None)
    p.add_argument("--power-db", type=float, default=0.0)
    p.add_argument("--triangle-sweep", action="store_true")


def _waveform_from_args(args) -> synth.WaveformSpec:
    return synth.WaveformSpec(
        kind=args.kind, center_offset_hz=args.offset_hz,
        bandwidth_hz=args.bandwidth_hz, sweep_time_s=args.sweep_time_s,
        chip_rate_cps=args.chip_rate, prn_length=args.prn_length,
        power_dbm=args.power_db,
        sweep_shape="triangle" if args.triangle_sweep else "sawtooth",
    )


def cmd_synth(args) -> int:
    spec = _waveform_from_args(args)
    snaps = []
    for i in range(args.snapshots):
        snap = synth.synth_waveform(spec, args.snapshot_len / args.sample_rate,
                                    args.sample_rate, seed=args.seed + i,
                                    tow=i * args.cadence, band=args.band)
        if args.noise_sigma2 > 0:
            snap = synth.add_awgn(snap, args.noise_sigma2, seed=args.seed + i)
        snaps.append(snap)
    with open(args.output, "wb") as fh:
        fh.write(formats.write_iq(snaps))
    print(f"wrote {len(snaps)} snapshot(s) to {args.output}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    mission = formats.load_mission(args.mission)
    if mission.scenario is None:
        raise ConfigurationError("mission file has no scenario section")
    records = synth.simulate_mission_records(
        mission.scenario, mission.pattern(), mission.sample_rate_hz,
        snapshot_len=mission.snapshot_len, seed=mission.seed, band=mission.band,
    )
    with open(args.output, "wb") as fh:
        fh.write(formats.write_iq(records))
    poses = synth.simulate_scan(mission.scenario, mission.pattern())
    if args.poses_output:
        rows = [{"x": p.position[0], "y": p.position[1],
                 "headings": p.headings.tolist(), "energies": p.energies.tolist()}
                for p in poses]
        with open(args.poses_output, "w") as fh:
            json.dump(rows, fh, indent=2)
    print(f"wrote {len(records)} record(s) to {args.output}")
    return EXIT_OK


def _load_records(path):
    with open(path, "rb") as fh:
        return formats.parse_iq(fh.read())


def _run(args):
    mission = formats.load_mission(args.mission)
    records = _load_records(args.records) if args.records else None
    return pipeline.run_pipeline(mission, records)


def cmd_detect(args) -> int:
    result = _run(args)
    out = formats.reports_to_jsonl(result.reports)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_JAMMING if result.jamming_detected else EXIT_OK


def cmd_classify(args) -> int:
    result = _run(args)
    line = json.dumps(formats.jammer_class_to_dict(result.jammer_class),
                      sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(line + "\n")
    else:
        print(line)
    return EXIT_JAMMING if result.jamming_detected else EXIT_OK


def cmd_fuse(args) -> int:
    result = _run(args)
    if result.heatmap is None:
        raise InputError("mission has no scan poses; nothing to fuse")
    if args.binary:
        with open(args.output, "wb") as fh:
            fh.write(formats.heatmap_to_grid_bytes(result.heatmap))
    else:
        with open(args.output, "w") as fh:
            fh.write(formats.heatmap_to_csv(result.heatmap))
    if result.estimate is not None:
        print(json.dumps(formats.source_estimate_to_dict(result.estimate),
                         sort_keys=True))
    else:
        print(json.dumps({"centroid": None}))
    return EXIT_JAMMING if result.jamming_detected else EXIT_OK


def cmd_report(args) -> int:
    result = _run(args)
    summary = {
        "snapshots": len(result.reports),
        "jamming_snapshots": sum(r.decision == detect.H1 for r in result.reports),
        "class": formats.jammer_class_to_dict(result.jammer_class),
        "estimate": None,
    }
    if result.estimate is not None:
        summary["estimate"] = {
            "centroid": list(result.estimate.centroid),
            "peak_cell": list(result.estimate.peak_cell),
            "confidence": result.estimate.confidence,
        }
    text = json.dumps(summary, indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.plot:
        _render_plot(result, args.plot)
    return EXIT_JAMMING if result.jamming_detected else EXIT_OK


def _render_plot(result, path):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ConfigurationError("plotting requires matplotlib") from exc
    fig, ax = plt.subplots(figsize=(6, 5))
    if result.heatmap is not None:
        hm = result.heatmap
        ny, nx = hm.grid.shape
        extent = [hm.origin[0], hm.origin[0] + nx * hm.cell_size,
                  hm.origin[1], hm.origin[1] + ny * hm.cell_size]
        im = ax.imshow(hm.grid, origin="lower", extent=extent, aspect="equal")
        fig.colorbar(im, ax=ax, label="relative likelihood")
        if result.estimate is not None:
            ax.plot(*result.estimate.centroid, "r+", markersize=12)
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
    else:
        energies = [r.band_energy for r in result.reports]
        ax.plot(energies, marker="o")
        ax.set_xlabel("snapshot")
        ax.set_ylabel("band energy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jamscan",
        description="GNSS-band jammer detection, classification, and localization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a jammer waveform to an IQ file")
    _add_waveform_args(p)
    p.add_argument("--sample-rate", type=float, default=15e6)
    p.add_argument("--snapshot-len", type=int, default=2048)
    p.add_argument("--snapshots", type=int, default=1)
    p.add_argument("--noise-sigma2", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cadence", type=float, default=2.0)
    p.add_argument("--band", default="L1", choices=list(synth.BANDS))
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="simulate a scan mission to IQ records")
    p.add_argument("--mission", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--poses-output", default=None)
    p.set_defaults(func=cmd_simulate)

    for name, func, help_text in [
        ("detect", cmd_detect, "per-snapshot detection reports (JSONL)"),
        ("classify", cmd_classify, "jammer class from a snapshot stream"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--mission", required=True)
        p.add_argument("--records", default=None,
                       help="IQ record file; omitted = simulate the mission")
        p.add_argument("-o", "--output", default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("fuse", help="fuse scans into a likelihood heatmap")
    p.add_argument("--mission", required=True)
    p.add_argument("--records", default=None)
    p.add_argument("-o", "--output", required=True,
                   help="heatmap output (CSV by default)")
    p.add_argument("--binary", action="store_true",
                   help="write the compact binary grid instead of CSV")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("report", help="aggregate summary (optional raster plot)")
    p.add_argument("--mission", required=True)
    p.add_argument("--records", default=None)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--plot", default=None, help="write a raster image here")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except JamscanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
