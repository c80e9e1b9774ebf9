"""Shared signal factories for the test suite.

Table-style jammer parameterizations: CW at the channel center, narrow and
wide 100 us chirps at 15 MS/s, and a 1.023 Mchip/s BPSK sampled at the
chip-commensurate 16.368 MS/s.
"""

import numpy as np

from jamscan import synth

FS_CHIRP = 15e6
FS_BPSK = 16.368e6  # 16 samples per 1.023 Mchip/s chip


def cw_spec(jnr_db=10.0, offset_hz=0.0):
    return synth.WaveformSpec(kind=synth.CW, center_offset_hz=offset_hz,
                              power_dbm=jnr_db)


def chirp_spec(bandwidth_hz=1e6, sweep_time_s=100e-6, jnr_db=10.0, offset_hz=0.0):
    return synth.WaveformSpec(kind=synth.CHIRP, center_offset_hz=offset_hz,
                              bandwidth_hz=bandwidth_hz, sweep_time_s=sweep_time_s,
                              power_dbm=jnr_db)


def bpsk_spec(chip_rate=1.023e6, prn_length=1023, jnr_db=10.0):
    return synth.WaveformSpec(kind=synth.BPSK_PRN, chip_rate_cps=chip_rate,
                              prn_length=prn_length, power_dbm=jnr_db)


def noisy(spec, fs, n=4096, sigma2=1.0, seed=0, tow=0.0):
    snap = synth.synth_waveform(spec, n / fs, fs, seed=seed, tow=tow)
    return synth.add_awgn(snap, sigma2, seed=10_000 + seed)


def awgn_snapshot(n=2048, sigma2=1.0, seed=0, fs=FS_CHIRP, tow=0.0):
    empty = synth.IqSnapshot(samples=np.zeros(n, dtype=complex),
                             sample_rate_hz=fs, tow=tow)
    return synth.add_awgn(empty, sigma2, seed=seed)


def snapshot_burst(spec, fs, count=5, n=4096, sigma2=1.0, seed=0):
    """A stream of snapshots of one emitter with 2 s tow cadence."""
    out = []
    for i in range(count):
        out.append(noisy(spec, fs, n=n, sigma2=sigma2,
                         seed=seed * 100 + i, tow=2.0 * i))
    return out


def drifting_tone_burst(count=10, drift_hz=300e3, jnr_db=10.0, n=4096,
                        sigma2=1.0, seed=0, fs=FS_CHIRP, start_hz=-1.5e6):
    """Swept-jammer stand-in: tone center steps by drift_hz per snapshot."""
    out = []
    for i in range(count):
        spec = synth.WaveformSpec(kind=synth.CW,
                                  center_offset_hz=start_hz + i * drift_hz,
                                  power_dbm=jnr_db)
        out.append(noisy(spec, fs, n=n, sigma2=sigma2,
                         seed=seed * 100 + i, tow=2.0 * i))
    return out
