"""Echo processing: pulse compression, range/velocity estimation, and limits.

Range profiles come from FFT-based correlation against a reference template,
per OFDM symbol (circular, prefix removed) or coherently over a whole slot.
Velocity follows from the phase progression of the compressed peak across the
slow-time samples.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .config import WaveformConfig
from .constants import C_LIGHT
from .errors import InvalidInput
from .waveform import TimeSignal


@dataclass(frozen=True)
class RangeProfile:
    """Complex correlator output versus lag for one processing window."""

    correlation: np.ndarray
    lag_axis_s: np.ndarray
    symbol_index: int = 0

    def __post_init__(self):
        corr = np.asarray(self.correlation, dtype=np.complex128)
        lags = np.asarray(self.lag_axis_s, dtype=float)
        if corr.size != lags.size:
            raise InvalidInput("correlation and lag axis lengths differ")
        object.__setattr__(self, "correlation", corr)
        object.__setattr__(self, "lag_axis_s", lags)


@dataclass(frozen=True)
class SensingEstimate:
    range_m: float
    velocity_mps: float
    peak_bin: int
    doppler_hz: float


@dataclass(frozen=True)
class SensingLimits:
    range_resolution_m: float
    max_unambiguous_range_m: float
    max_unambiguous_velocity_mps: float


def _useful_windows(x: TimeSignal, cfg: WaveformConfig) -> np.ndarray:
    if len(x) != cfg.frame_samples:
        raise InvalidInput("signal length does not match the config frame")
    return x.samples.reshape(cfg.n_symbols, cfg.symbol_samples)[:, cfg.cp_samples:]


def matched_filter(rx: TimeSignal, template: TimeSignal, cfg: WaveformConfig):
    """Per-symbol circular pulse compression.

    Both signals are split into symbols with the prefix dropped; each window
    is correlated against the matching template window via FFT, conjugate
    spectrum product, inverse FFT.  A length-N template is reused for every
    symbol; a full frame is sliced per symbol (needed when the reference
    changes with the payload).
    """
    n = cfg.n_subcarriers
    rx_use = _useful_windows(rx, cfg)
    if len(template) == n:
        tpl_use = np.broadcast_to(template.samples, rx_use.shape)
    elif len(template) == cfg.frame_samples:
        tpl_use = _useful_windows(template, cfg)
    else:
        raise InvalidInput("template must be one symbol or one full frame long")
    corr = np.fft.ifft(np.fft.fft(rx_use, axis=1) * np.conj(np.fft.fft(tpl_use, axis=1)), axis=1)
    lags = np.arange(n) / cfg.sample_rate_hz
    return [RangeProfile(corr[m], lags, m) for m in range(cfg.n_symbols)]


def matched_filter_slot(rx: TimeSignal, template: TimeSignal, cfg: WaveformConfig,
                        max_lag: int | None = None):
    """Coherent pulse compression over whole slots, prefix samples included.

    One profile per 14-symbol slot; the reference is the slot's full-length
    transmit component (for the additive scheme, the continuous slot chirp)
    and the correlation is linear, evaluated at lags 0..max_lag-1.
    """
    from .constants import SLOT_SYMBOLS

    if len(rx) != len(template):
        raise InvalidInput("received signal and template lengths differ")
    if cfg.n_symbols % SLOT_SYMBOLS:
        raise InvalidInput("slot processing needs a whole number of 14-symbol slots")
    slot_len = SLOT_SYMBOLS * cfg.symbol_samples
    n_slots = cfg.n_symbols // SLOT_SYMBOLS
    if max_lag is None:
        max_lag = slot_len
    if not 1 <= max_lag <= slot_len:
        raise InvalidInput("max_lag must lie in [1, slot length]")
    nfft = 1 << int(np.ceil(np.log2(2 * slot_len)))
    profiles = []
    lags = np.arange(max_lag) / cfg.sample_rate_hz
    for s in range(n_slots):
        sl = slice(s * slot_len, (s + 1) * slot_len)
        spec = np.fft.fft(rx.samples[sl], nfft) * np.conj(np.fft.fft(template.samples[sl], nfft))
        corr = np.fft.ifft(spec)[:max_lag]
        profiles.append(RangeProfile(corr, lags, s))
    return profiles


def noncoherent_sum(profiles) -> RangeProfile:
    """Magnitude-summed profile across windows (square-law integration)."""
    if not profiles:
        raise InvalidInput("no profiles to combine")
    mag = np.zeros(profiles[0].correlation.size)
    for p in profiles:
        mag += np.abs(p.correlation) ** 2
    return RangeProfile(np.sqrt(mag).astype(np.complex128), profiles[0].lag_axis_s, -1)


def peak_bin(profile: RangeProfile, multipath: bool = False) -> tuple[int, bool]:
    """Index of the detected peak and a flag for ambiguous (tied) maxima.

    Default is the global maximum.  With ``multipath=True`` the earliest local
    maximum rising at least 5x above the median magnitude is taken as the
    line-of-sight path.
    """
    mag = np.abs(profile.correlation)
    if mag.size == 0:
        raise InvalidInput("empty profile")
    if multipath:
        thresh = 5.0 * float(np.median(mag))
        interior = (mag[1:-1] >= mag[:-2]) & (mag[1:-1] >= mag[2:]) & (mag[1:-1] >= thresh)
        idx = np.flatnonzero(interior) + 1
        if mag[0] >= thresh and mag[0] >= mag[1]:
            idx = np.concatenate([[0], idx])
        if idx.size:
            return int(idx[0]), False
    top = int(np.argmax(mag))
    tied = bool(np.count_nonzero(mag == mag[top]) > 1)
    return top, tied


def _parabolic_refine(mag: np.ndarray, k: int) -> float:
    if k <= 0 or k >= mag.size - 1:
        return float(k)
    y0, y1, y2 = mag[k - 1], mag[k], mag[k + 1]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return float(k)
    return k + 0.5 * (y0 - y2) / denom


def estimate_range(profile: RangeProfile, sample_rate_hz: float | None = None,
                   multipath: bool = False, interpolate: bool = False) -> float:
    """Range in meters from the profile peak, R = c * lag / 2.

    Ties resolve to the smallest lag and raise a RuntimeWarning.  Parabolic
    peak interpolation is off by default (estimates are bin-quantized).
    """
    if profile.correlation.size == 0:
        raise InvalidInput("empty profile")
    k, tied = peak_bin(profile, multipath=multipath)
    if tied:
        warnings.warn("flat profile: peak tie broken to the smallest lag", RuntimeWarning)
    if sample_rate_hz is None:
        if profile.lag_axis_s.size > 1:
            sample_rate_hz = 1.0 / (profile.lag_axis_s[1] - profile.lag_axis_s[0])
        else:
            sample_rate_hz = 1.0
    if interpolate:
        lag = _parabolic_refine(np.abs(profile.correlation), k) / sample_rate_hz
    else:
        lag = profile.lag_axis_s[k]
    return C_LIGHT * lag / 2.0


def estimate_velocity(peak_samples, cfg: WaveformConfig,
                      sample_spacing_s: float | None = None) -> float:
    """Velocity from the unwrapped phase slope of the slow-time peak samples.

    Unwraps arg(z_m), averages successive differences, converts to a Doppler
    frequency over the slow-time spacing (one symbol duration by default),
    and scales by half the wavelength.
    """
    z = np.asarray(peak_samples).ravel()
    if z.size < 2:
        raise InvalidInput("velocity estimation needs at least two slow-time samples")
    if sample_spacing_s is None:
        sample_spacing_s = cfg.symbol_duration_s
    dphi = float(np.mean(np.diff(np.unwrap(np.angle(z)))))
    doppler = dphi / (2 * np.pi * sample_spacing_s)
    return C_LIGHT * doppler / (2 * cfg.carrier_hz)


def sensing_limits(n: int, m: int, cfg: WaveformConfig) -> SensingLimits:
    """Resolution and unambiguous bounds for a sweep over n subcarriers and m symbols.

    dR = c/(2*n*df); Rmax = c*fs*m*To/(4*n*df); vmax = lambda/(4*m*To).
    Rmax follows the sample-count convention (half the lag window expressed
    as range).
    """
    if not 1 <= n <= cfg.n_subcarriers:
        raise InvalidInput("subcarrier span n must lie in [1, N]")
    if m < 1:
        raise InvalidInput("symbol span m must be >= 1")
    df = cfg.subcarrier_spacing_hz
    t_o = cfg.symbol_duration_s
    return SensingLimits(
        range_resolution_m=C_LIGHT / (2.0 * n * df),
        max_unambiguous_range_m=C_LIGHT * cfg.sample_rate_hz * m * t_o / (4.0 * n * df),
        max_unambiguous_velocity_mps=cfg.wavelength_m / (4.0 * m * t_o),
    )


def complexity_counts(n: int, m: int, scheme: str) -> int:
    """Complex multiplications for sensing over an m-symbol interval.

    Radix-2 model: an N-point transform costs (N/2)*log2(N).  Schemes with a
    payload-independent reference ("aac", "ofdm_prs") pay one template
    transform per interval; the multiplicative scheme ("cm") regenerates its
    reference every symbol.
    """
    if n < 1 or (n & (n - 1)) != 0:
        raise InvalidInput("the cost model needs a power-of-two transform size")
    if m < 1:
        raise InvalidInput("need at least one symbol")
    log2n = n.bit_length() - 1
    fft_cost = (n // 2) * log2n
    scheme = scheme.lower()
    if scheme in ("aac", "ofdm_prs"):
        return m * (n * log2n + n) + fft_cost
    if scheme == "cm":
        return m * (3 * fft_cost + n)
    raise InvalidInput(f"unknown scheme {scheme!r}; expected aac, cm, or ofdm_prs")


def rmse_aggregate(estimates) -> float:
    """Root-mean-square error of (estimate, truth) pairs."""
    pairs = list(estimates)
    if not pairs:
        raise InvalidInput("rmse of an empty collection is undefined")
    err = np.array([est - truth for est, truth in pairs], dtype=float)
    return float(np.sqrt(np.mean(err**2)))
