"""Delay-Doppler multipath propagation, receiver noise, and sync impairments."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import WaveformConfig
from .errors import InvalidInput
from .waveform import TimeSignal

# Urban short-delay-spread tap profile: powers in dB, delays in samples.
TAP_POWERS_DB = (0.0, -8.0, -17.0, -21.0, -25.0)
TAP_DELAYS = (0, 3, 5, 6, 8)


@dataclass(frozen=True)
class PathTap:
    """One propagation path: power, delay in samples, Doppler, and gain phase."""

    gain_db: float
    delay_samples: float
    doppler_hz: float = 0.0
    phase_rad: float = 0.0

    def __post_init__(self):
        if self.delay_samples < 0:
            raise InvalidInput("path delay must be non-negative")

    @property
    def gain(self) -> complex:
        return 10.0 ** (self.gain_db / 20.0) * np.exp(1j * self.phase_rad)


@dataclass(frozen=True)
class ChannelRealization:
    """Tap set plus noise level and synchronization error settings.

    The seed fully determines the additive noise, so a realization replays
    bit-identically.
    """

    taps: tuple
    snr_db: float = math.inf
    seed: int = 0
    cfo_hz: float = 0.0
    timing_drift_s: float = 0.0

    def __post_init__(self):
        taps = tuple(self.taps)
        if not taps:
            raise InvalidInput("a channel needs at least one tap")
        object.__setattr__(self, "taps", taps)


def multipath_profile(snr_db: float = math.inf, seed: int = 0,
                      phases: tuple | None = None,
                      rng: np.random.Generator | None = None,
                      **impairments) -> ChannelRealization:
    """Standard five-tap profile with per-realization uniform tap phases.

    Pass ``phases`` to pin them, or ``rng`` to draw them reproducibly; the
    default leaves every phase at zero.
    """
    if phases is None:
        if rng is not None:
            phases = tuple(rng.uniform(0, 2 * np.pi, len(TAP_POWERS_DB)))
        else:
            phases = (0.0,) * len(TAP_POWERS_DB)
    taps = tuple(
        PathTap(gain_db=g, delay_samples=d, phase_rad=p)
        for g, d, p in zip(TAP_POWERS_DB, TAP_DELAYS, phases)
    )
    return ChannelRealization(taps=taps, snr_db=snr_db, seed=seed, **impairments)


def single_target(delay_samples: float, doppler_hz: float = 0.0, gain_db: float = 0.0,
                  phase_rad: float = 0.0, snr_db: float = math.inf, seed: int = 0,
                  **impairments) -> ChannelRealization:
    """One-tap echo channel for sensing runs."""
    tap = PathTap(gain_db=gain_db, delay_samples=delay_samples,
                  doppler_hz=doppler_hz, phase_rad=phase_rad)
    return ChannelRealization(taps=(tap,), snr_db=snr_db, seed=seed, **impairments)


def _delay(samples: np.ndarray, delay: float, fs: float) -> np.ndarray:
    """Delay with zero fill in front; integer delays shift, fractional ones
    use an ideal DFT phase ramp on a zero-padded transform."""
    n = samples.size
    if delay == 0:
        return samples.copy()
    d_int = int(round(delay))
    if abs(delay - d_int) < 1e-9:
        out = np.zeros(n, dtype=np.complex128)
        if d_int < n:
            out[d_int:] = samples[: n - d_int]
        return out
    from scipy.fft import next_fast_len

    pad = next_fast_len(n + int(np.ceil(delay)) + 1)
    spec = np.fft.fft(samples, pad)
    freqs = np.fft.fftfreq(pad, d=1.0 / fs)
    shifted = np.fft.ifft(spec * np.exp(-2j * np.pi * freqs * delay / fs))
    return shifted[:n]


def apply_channel(x: TimeSignal, ch: ChannelRealization,
                  cfg: WaveformConfig | None = None) -> TimeSignal:
    """Superpose all path echoes, then add seeded receiver noise.

    Each tap contributes gain * x(l - d) * exp(j*2*pi*f_d*l/fs) with the
    Doppler ramp on the receive-time index.  When ``cfg`` is given the noise
    level is referenced to the faded signal's useful (non-CP) samples.
    """
    fs = x.sample_rate_hz
    n = len(x)
    for tap in ch.taps:
        if tap.delay_samples >= n:
            raise InvalidInput("path delay exceeds the signal length")
    t = np.arange(n) / fs
    y = np.zeros(n, dtype=np.complex128)
    for tap in ch.taps:
        echo = _delay(x.samples, tap.delay_samples, fs)
        if tap.doppler_hz:
            echo = echo * np.exp(2j * np.pi * tap.doppler_hz * t)
        y += tap.gain * echo
    faded = TimeSignal(y, fs, x.t0_s)
    if math.isinf(ch.snr_db):
        return faded
    return add_awgn(faded, ch.snr_db, ch.seed, signal_power=_reference_power(faded, cfg))


def _reference_power(x: TimeSignal, cfg: WaveformConfig | None) -> float:
    if cfg is None or len(x) != cfg.frame_samples:
        return x.power()
    useful = x.samples.reshape(cfg.n_symbols, cfg.symbol_samples)[:, cfg.cp_samples:]
    return float(np.mean(np.abs(useful) ** 2))


def add_awgn(x: TimeSignal, snr_db: float, seed: int,
             signal_power: float | None = None) -> TimeSignal:
    """Circular complex Gaussian noise at the requested SNR, seeded.

    Noise variance is signal power / 10^(snr/10); the same seed always
    produces the same noise, and snr=inf returns the input untouched.
    """
    if math.isinf(snr_db):
        return x
    if signal_power is None:
        signal_power = x.power()
    var = signal_power / (10.0 ** (snr_db / 10.0))
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    noise = rng.standard_normal(len(x)) + 1j * rng.standard_normal(len(x))
    return TimeSignal(x.samples + np.sqrt(var / 2.0) * noise, x.sample_rate_hz, x.t0_s)


def apply_cfo(x: TimeSignal, epsilon_hz: float) -> TimeSignal:
    """Residual carrier offset: a pure phase ramp exp(j*2*pi*eps*l/fs).

    Downstream Doppler estimates shift by exactly eps, i.e. velocity by
    (wavelength/2)*eps.
    """
    if epsilon_hz == 0.0:
        return x
    ramp = np.exp(2j * np.pi * epsilon_hz * np.arange(len(x)) / x.sample_rate_hz)
    return TimeSignal(x.samples * ramp, x.sample_rate_hz, x.t0_s)


def apply_timing_drift(x: TimeSignal, dt_s: float) -> TimeSignal:
    """Clock misalignment: delay the whole capture by dt seconds.

    Biases the downstream range estimate by about c*dt/2.  Negative dt is
    rejected along with drifts beyond the signal duration.
    """
    if dt_s == 0.0:
        return x
    if abs(dt_s) >= x.duration_s():
        raise InvalidInput("timing drift exceeds the signal duration")
    if dt_s < 0:
        raise InvalidInput("an advance (negative drift) is not modeled; delay only")
    return TimeSignal(_delay(x.samples, dt_s * x.sample_rate_hz, x.sample_rate_hz),
                      x.sample_rate_hz, x.t0_s)


def propagate(x: TimeSignal, ch: ChannelRealization,
              cfg: WaveformConfig | None = None) -> TimeSignal:
    """Full impairment chain: taps, then CFO, then drift, then noise."""
    out = apply_channel(x, replace(ch, snr_db=math.inf), cfg)
    if ch.cfo_hz:
        out = apply_cfo(out, ch.cfo_hz)
    if ch.timing_drift_s:
        out = apply_timing_drift(out, ch.timing_drift_s)
    if not math.isinf(ch.snr_db):
        out = add_awgn(out, ch.snr_db, ch.seed, signal_power=_reference_power(out, cfg))
    return out


def genie_csi(ch: ChannelRealization, cfg: WaveformConfig) -> np.ndarray:
    """Per-subcarrier channel gains for equalization, from perfect knowledge.

    Valid for quasi-static taps (zero Doppler): H(n) = sum_i g_i *
    exp(-j*2*pi*n*d_i/N).
    """
    n = np.arange(cfg.n_subcarriers)
    h = np.zeros(cfg.n_subcarriers, dtype=np.complex128)
    for tap in ch.taps:
        h += tap.gain * np.exp(-2j * np.pi * n * tap.delay_samples / cfg.n_subcarriers)
    return h
