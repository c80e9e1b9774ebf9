#!/usr/bin/env python3
"""Spectral-correlation gallery for the standard jammer battery.

Synthesizes one snapshot per jammer class, computes the correlation surface,
coherence, alpha profile, and autocorrelation, and writes CSV exports (and
PNGs with --plot) to an output directory.

    python scripts/signature_gallery.py --out gallery/ [--plot] [--jnr 10]
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from jamscan import cyclo, formats, synth  # noqa: E402

BATTERY = {
    "cw_tone": (synth.WaveformSpec(kind=synth.CW), 15e6),
    "chirp_narrow": (synth.WaveformSpec(kind=synth.CHIRP, bandwidth_hz=1e6,
                                        sweep_time_s=100e-6), 15e6),
    "chirp_wide": (synth.WaveformSpec(kind=synth.CHIRP, bandwidth_hz=5e6,
                                      sweep_time_s=100e-6), 15e6),
    "bpsk_prn": (synth.WaveformSpec(kind=synth.BPSK_PRN, chip_rate_cps=1.023e6,
                                    prn_length=1023), 16.368e6),
    "noise_only": (None, 15e6),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="gallery")
    ap.add_argument("--jnr", type=float, default=10.0, help="jammer-to-noise dB")
    ap.add_argument("--n", type=int, default=4096, help="snapshot length")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--plot", action="store_true", help="also write PNGs")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for name, (spec, fs) in BATTERY.items():
        if spec is None:
            snap = synth.IqSnapshot(np.zeros(args.n, complex), fs)
        else:
            spec.power_dbm = args.jnr
            snap = synth.synth_waveform(spec, args.n / fs, fs, seed=args.seed)
        snap = synth.add_awgn(snap, 1.0, seed=args.seed + 999)

        scd = cyclo.fam_scd(snap)
        coh = cyclo.coherence(scd)
        prof = cyclo.alpha_profile(scd)
        ac = cyclo.cyclic_autocorr(snap)

        (out / f"{name}_scd.csv").write_text(formats.scd_to_csv(scd))
        (out / f"{name}_profile.csv").write_text(
            formats.profile_to_csv(prof.values, prof.alpha_axis))
        (out / f"{name}_scd.grid").write_bytes(formats.scd_to_grid_bytes(scd))
        print(f"{name:14s} profile max {prof.values.max():9.2f}  "
              f"best lag {ac.best_lag:5d}  coherence max(a>0) "
              f"{coh.values[:, 1:].max():.3f}")

        if args.plot:
            import matplotlib
            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
            fig, axes = plt.subplots(1, 3, figsize=(15, 4))
            m = scd.magnitude()
            axes[0].imshow(np.log10(m + 1e-12), origin="lower", aspect="auto",
                           extent=[0, 1, scd.freq_axis[0] / 1e6,
                                   scd.freq_axis[-1] / 1e6])
            axes[0].set_title(f"{name}: correlation surface (log)")
            axes[0].set_xlabel("normalized cyclic frequency")
            axes[0].set_ylabel("frequency [MHz]")
            axes[1].imshow(coh.values[:, 1:], origin="lower", aspect="auto",
                           vmin=0, vmax=1,
                           extent=[scd.alpha_axis[1], 1,
                                   scd.freq_axis[0] / 1e6,
                                   scd.freq_axis[-1] / 1e6])
            axes[1].set_title("coherence (alpha > 0)")
            axes[1].set_xlabel("normalized cyclic frequency")
            axes[2].semilogy(prof.alpha_axis, prof.values + 1e-12)
            axes[2].set_title("alpha profile")
            axes[2].set_xlabel("normalized cyclic frequency")
            fig.tight_layout()
            fig.savefig(out / f"{name}.png", dpi=110)
            plt.close(fig)

    print(f"exports written to {out}/")


if __name__ == "__main__":
    main()
