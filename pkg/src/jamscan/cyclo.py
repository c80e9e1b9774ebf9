"""Spectral correlation via the FFT accumulation method, and derived statistics.

The estimator channelizes a snapshot into hopped, Hamming-tapered frames,
takes per-frame FFTs, re-references each frame's phase to absolute sample
time, and averages the conjugate cross-products of all frequency-bin pairs
over the frames.  A bin pair (f1, f2) estimates the correlation between
spectral components at spectral frequency f = (f1 + f2) / 2 and cyclic
frequency alpha = f1 - f2; the pair surface is rasterized onto a dense
(f, alpha) grid with alpha folded to [0, 1) in units of the sample rate
(the non-conjugate surface is Hermitian in alpha, so nothing is lost).

Magnitudes are relative: no front-end gain calibration is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InsufficientDataError
from .synth import IqSnapshot


@dataclass(frozen=True)
class FamParams:
    """Frame geometry of the accumulation: window length and hop.

    ``window_len`` must be a power of two; the hop must satisfy
    0 < hop < window_len (consecutive frames overlap by window_len - hop).
    The taper is fixed to a Hamming window.
    """

    window_len: int = 256
    hop: int = 64
    window: str = field(default="hamming", init=False)

    def __post_init__(self):
        n = self.window_len
        if n < 2 or (n & (n - 1)) != 0:
            raise ConfigurationError(f"window_len must be a power of two > 1, got {n}")
        if not 0 < self.hop < n:
            raise ConfigurationError(
                f"hop must satisfy 0 < hop < window_len, got {self.hop}"
            )

    def frame_count(self, n_samples: int) -> int:
        return (n_samples - self.window_len) // self.hop + 1


@dataclass
class SpectralCorrelation:
    """Frame-averaged spectral correlation on a dense (f, alpha) grid.

    ``values[i, j]`` is the complex correlation at spectral frequency
    ``freq_axis[i]`` (Hz) and normalized cyclic frequency ``alpha_axis[j]``
    (cycles per sample, in [0, 1)).  Cells with no contributing bin pair
    are zero.  ``psd`` is the alpha = 0 slice (the per-bin power spectral
    density estimate), kept for coherence normalization.
    """

    values: np.ndarray
    freq_axis: np.ndarray
    alpha_axis: np.ndarray
    params: FamParams
    frames_p: int
    source_tow: float = 0.0
    sample_rate_hz: float = 1.0

    @property
    def psd(self) -> np.ndarray:
        return self.values[:, 0].real

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass
class CoherenceMap:
    """Spectral coherence: the correlation surface normalized by shifted PSDs.

    Same grid as the source SpectralCorrelation; values clamped to [0, 1].
    The alpha = 0 column is identically 1 by construction (self-coherence),
    so feature analysis should start from the first nonzero alpha column.
    """

    values: np.ndarray
    freq_axis: np.ndarray
    alpha_axis: np.ndarray


@dataclass
class AlphaProfile:
    """Detection statistic: per-alpha magnitude of the spectral-frequency sum."""

    values: np.ndarray
    alpha_axis: np.ndarray


@dataclass
class AutocorrResult:
    """Lagged autocorrelation magnitudes and the periodicity statistic.

    ``magnitudes[i]`` is the overlap-normalized autocorrelation magnitude at
    lag ``lags[i]`` samples (lags run 1 .. N // 2; the zero lag is excluded
    from the statistic).  ``best_lag`` is the smallest lag attaining the
    dominant isolated peak when one exists; ``isolated`` records whether such
    an interior peak was found (a flat profile, e.g. a pure tone, has none).
    """

    lags: np.ndarray
    magnitudes: np.ndarray
    statistic: float
    best_lag: int
    isolated: bool
    sample_rate_hz: float

    @property
    def period_s(self) -> float:
        return self.best_lag / self.sample_rate_hz


def channelize(snapshot: IqSnapshot, params: FamParams) -> np.ndarray:
    """Slice a snapshot into hopped frames: row i = samples[i*hop : i*hop + win].

    Trailing samples that do not fill a whole window are discarded.
    """
    x = snapshot.samples
    n = x.size
    npw, hop = params.window_len, params.hop
    if n < npw:
        raise InsufficientDataError(
            f"snapshot of {n} samples is shorter than the {npw}-sample window"
        )
    p = params.frame_count(n)
    idx = np.arange(npw)[None, :] + hop * np.arange(p)[:, None]
    return x[idx]


def fam_scd(snapshot: IqSnapshot, params: FamParams | None = None) -> SpectralCorrelation:
    """Estimate the spectral correlation surface of one snapshot.

    Deterministic; output scale is relative (uncalibrated).  The phase of
    frame i is re-referenced to absolute sample time by multiplying bin
    omega with exp(-1j * omega * i * hop) so that genuine cyclic features
    stay coherent under the frame average while incommensurate content
    cancels.
    """
    params = params or FamParams()
    frames = channelize(snapshot, params)
    p, npw = frames.shape
    hop = params.hop

    win = np.hamming(npw)
    spec = np.fft.fftshift(np.fft.fft(frames * win, axis=1), axes=1)
    nu = np.fft.fftshift(np.fft.fftfreq(npw))  # cycles/sample in [-1/2, 1/2)
    comp = np.exp(-2j * np.pi * np.outer(np.arange(p) * hop, nu))
    w = spec * comp

    # pair matrix M[j, k] = <X(nu_j) X*(nu_k)> averaged over frames
    pair = (w.T @ np.conj(w)) / p

    # rasterize pairs (j >= k) onto (f row, alpha column): alpha bin d = j - k,
    # f row at the floored midpoint k + d // 2
    values = np.zeros((npw, npw), dtype=np.complex128)
    jj, kk = np.tril_indices(npw)
    d = jj - kk
    values[kk + d // 2, d] = pair[jj, kk]

    freq_axis = nu * snapshot.sample_rate_hz
    alpha_axis = np.arange(npw) / npw
    return SpectralCorrelation(
        values=values, freq_axis=freq_axis, alpha_axis=alpha_axis,
        params=params, frames_p=p, source_tow=snapshot.tow,
        sample_rate_hz=snapshot.sample_rate_hz,
    )


def coherence(scd: SpectralCorrelation) -> CoherenceMap:
    """Normalize the correlation surface by the shifted-PSD geometric mean.

    Every cell is divided by sqrt(psd(f + alpha/2) * psd(f - alpha/2)) taken
    at the exact bin pair that produced it, with an epsilon floor guarding
    empty bins, then clamped to [0, 1].  The result is amplitude-invariant.
    """
    npw = scd.values.shape[0]
    psd = np.abs(scd.psd)
    floor = 1e-12 * max(psd.max(), np.abs(scd.values).max(), 1e-300)

    mags = np.abs(scd.values)
    out = np.zeros_like(mags)
    jj, kk = np.tril_indices(npw)
    d = jj - kk
    rows = kk + d // 2
    denom = np.sqrt(psd[jj] * psd[kk])
    out[rows, d] = mags[rows, d] / np.maximum(denom, floor)

    np.clip(out, 0.0, 1.0, out=out)
    return CoherenceMap(values=out, freq_axis=scd.freq_axis, alpha_axis=scd.alpha_axis)


def alpha_profile(scd: SpectralCorrelation) -> AlphaProfile:
    """Collapse the surface along spectral frequency into a per-alpha statistic.

    The complex sum over f cancels for noise (random phases) but accumulates
    at the cyclic frequencies of a structured emitter; magnitude scaled by
    1 / window_len.
    """
    vals = np.abs(scd.values.sum(axis=0)) / scd.params.window_len
    return AlphaProfile(values=vals, alpha_axis=scd.alpha_axis.copy())


def cyclic_autocorr(snapshot: IqSnapshot) -> AutocorrResult:
    """Overlap-normalized autocorrelation magnitudes over lags 1 .. N // 2.

    A periodic emitter produces an isolated magnitude peak at its period in
    samples; ``best_lag`` is chosen as the smallest interior local maximum
    within 5% of the dominant one, searched beyond the zero-lag mainlobe, so
    the fundamental period wins over its multiples.  When no interior peak
    exists (flat profile) the plain argmax is returned with
    ``isolated=False``.
    """
    x = snapshot.samples
    n = x.size
    if n < 4:
        raise InsufficientDataError("autocorrelation needs at least 4 samples")
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.fft(x, nfft)
    raw = np.fft.ifft(f * np.conj(f))[: n // 2 + 1]
    counts = n - np.arange(n // 2 + 1)
    mags_all = np.abs(raw) / counts  # unbiased: tone magnitude is lag-independent

    lags = np.arange(1, n // 2 + 1)
    mags = mags_all[1:]

    # zero-lag mainlobe end: first lag where magnitude halves from lag 1
    below = np.nonzero(mags < 0.5 * mags[0])[0]
    start = int(below[0]) if below.size else 1

    interior = np.zeros(mags.size, dtype=bool)
    interior[1:-1] = (mags[1:-1] > mags[:-2]) & (mags[1:-1] > mags[2:])
    interior[:start] = False
    candidates = np.nonzero(interior)[0]

    if candidates.size:
        top = mags[candidates].max()
        keep = candidates[mags[candidates] >= 0.95 * top]
        best_idx = int(keep.min())
        isolated = True
    else:
        best_idx = int(np.argmax(mags))
        isolated = False

    return AutocorrResult(
        lags=lags, magnitudes=mags, statistic=float(mags[best_idx]),
        best_lag=int(lags[best_idx]), isolated=isolated,
        sample_rate_hz=snapshot.sample_rate_hz,
    )
