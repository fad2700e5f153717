"""Delay-Doppler ambiguity surfaces, numeric and closed form.

The closed forms use the gated continuous-time model: per-symbol rectangular
windows of the full symbol duration, complex tones with absolute-time phase,
and a single-rate chirp whose quadratic phase also runs on absolute time.
Both signal components are normalized to unit average power, so the weight
``alpha`` alone sets their balance.  The numeric evaluator integrates the
defining correlation on a finely midpoint-sampled version of the same model
and is the correctness oracle for every closed form here.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import fresnel as _scipy_fresnel

from .config import WaveformConfig
from .errors import InvalidInput
from .waveform import ResourceGrid, TimeSignal


def fresnel(x):
    """Fresnel integrals C(x), S(x) with the pi*t^2/2 kernel.

    Returns the cosine integral first; odd in x; vectorizes over arrays.
    """
    s, c = _scipy_fresnel(np.asarray(x, dtype=float))
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return float(c), float(s)
    return c, s


@dataclass(frozen=True)
class OverlapWindow:
    """Half-length and midpoint of two shifted symbol windows' intersection."""

    t_d: float
    t_a: float
    empty: bool


def overlap_window(m: int, m_prime: int, tau: float, t_o: float) -> OverlapWindow:
    """Intersection of symbol m's window with symbol m_prime's delayed by tau.

    Windows of length t_o overlap iff |tau + (m'-m)*t_o| <= t_o; then the
    half-length is (t_o - |shift|)/2 and the midpoint sits at
    m*t_o + (t_o + tau + (m'-m)*t_o)/2.
    """
    if t_o <= 0:
        raise InvalidInput("symbol duration must be positive")
    shift = tau + (m_prime - m) * t_o
    if abs(shift) > t_o:
        return OverlapWindow(0.0, 0.0, True)
    t_d = (t_o - abs(shift)) / 2.0
    t_a = m * t_o + (t_o + tau + (m_prime - m) * t_o) / 2.0
    return OverlapWindow(t_d, t_a, False)


@dataclass(frozen=True)
class AmbiguitySurface:
    """|chi(tau, f_d)| on a delay-Doppler grid, peak-normalized.

    ``values`` keeps the raw complex correlation for oracle comparisons;
    ``magnitude`` is normalized to a unit maximum.
    """

    values: np.ndarray
    delay_axis_s: np.ndarray
    doppler_axis_hz: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        d = np.asarray(self.delay_axis_s, dtype=float)
        f = np.asarray(self.doppler_axis_hz, dtype=float)
        if v.shape != (d.size, f.size):
            raise InvalidInput("surface shape must be (delays, dopplers)")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "delay_axis_s", d)
        object.__setattr__(self, "doppler_axis_hz", f)

    @property
    def magnitude(self) -> np.ndarray:
        mag = np.abs(self.values)
        peak = mag.max()
        return mag / peak if peak > 0 else mag


# ---------------------------------------------------------------------------
# analysis-model sampling and the numeric oracle


def default_sweep_rate(cfg: WaveformConfig) -> float:
    """Full occupied band swept over one total symbol duration."""
    return cfg.n_subcarriers * cfg.subcarrier_spacing_hz / cfg.symbol_duration_s


def analysis_signal(grid: ResourceGrid | None, cfg: WaveformConfig, scheme: str,
                    alpha: float | None = None, beta: float | None = None,
                    q: float = 1.0, f0_hz: float = 0.0,
                    chirped_symbols=None, oversample: int = 64) -> TimeSignal:
    """Midpoint-sample the gated continuous-time model at ``oversample`` x rate.

    scheme is "ofdm", "chirp", "aac", or "cm".  Symbol windows span the full
    symbol duration; tone and chirp phases run on absolute time from the frame
    start, and each component carries unit average power.
    """
    if scheme not in ("ofdm", "chirp", "aac", "cm"):
        raise InvalidInput(f"unknown scheme {scheme!r}")
    if beta is None:
        beta = default_sweep_rate(cfg)
    n, m_total = cfg.n_subcarriers, cfg.n_symbols
    lo = cfg.symbol_samples * oversample
    tsp = cfg.sample_period_s / oversample
    t = (np.arange(m_total * lo) + 0.5) * tsp
    chirped = set(range(m_total)) if chirped_symbols is None else set(chirped_symbols)

    s = None
    if scheme != "chirp":
        if grid is None or grid.symbols.shape != (m_total, n):
            raise InvalidInput("need a grid matching the config")
        coef = grid.symbols / np.sqrt(n)
        s = np.zeros(t.size, dtype=np.complex128)
        tones = np.arange(n)[:, None] * cfg.subcarrier_spacing_hz
        for m in range(m_total):
            sl = slice(m * lo, (m + 1) * lo)
            s[sl] = coef[m] @ np.exp(2j * np.pi * tones * t[None, sl])
    c = None
    if scheme != "ofdm":
        c = np.zeros(t.size, dtype=np.complex128)
        for m in chirped:
            sl = slice(m * lo, (m + 1) * lo)
            tc = t[sl]
            c[sl] = q * np.exp(1j * (2 * np.pi * f0_hz * tc + np.pi * beta * tc * tc))

    if scheme == "ofdm":
        x = s
    elif scheme == "chirp":
        x = c
    elif scheme == "aac":
        a = cfg.alpha if alpha is None else alpha
        x = (1.0 - a) * s + a * c
    else:
        x = s * c
    return TimeSignal(x, 1.0 / tsp, t0_s=0.5 * tsp)


def ambiguity_numeric(x: TimeSignal, delay_axis_s, doppler_axis_hz,
                      _doppler_chunk: int = 16) -> AmbiguitySurface:
    """Brute-force chi(tau, f_d) = integral of x(t) x*(t-tau) e^{j2pi f_d t}.

    Delays must land on the signal's own sample grid and stay inside its
    support; Dopplers must stay below Nyquist.  The Riemann sum uses the
    signal's sample spacing as the measure, so values approximate the
    continuous integral and can be compared directly with the closed forms.
    """
    delays = np.atleast_1d(np.asarray(delay_axis_s, dtype=float))
    dopplers = np.atleast_1d(np.asarray(doppler_axis_hz, dtype=float))
    fs = x.sample_rate_hz
    n = len(x)
    shifts = delays * fs
    ints = np.round(shifts)
    if np.any(np.abs(shifts - ints) > 1e-6):
        raise InvalidInput("delays must be integer multiples of the sample period")
    if np.any(np.abs(ints) >= n):
        raise InvalidInput("delay beyond the signal support")
    if np.any(np.abs(dopplers) > fs / 2):
        raise InvalidInput("Doppler beyond the Nyquist band")
    t = x.times()
    sig = x.samples
    prods = np.empty((delays.size, n), dtype=np.complex128)
    for k, d in enumerate(ints.astype(int)):
        if d >= 0:
            shifted = np.concatenate([np.zeros(d, np.complex128), sig[: n - d]])
        else:
            shifted = np.concatenate([sig[-d:], np.zeros(-d, np.complex128)])
        prods[k] = sig * np.conj(shifted)
    out = np.empty((delays.size, dopplers.size), dtype=np.complex128)
    for j0 in range(0, dopplers.size, _doppler_chunk):
        chunk = dopplers[j0 : j0 + _doppler_chunk]
        basis = np.exp(2j * np.pi * np.outer(t, chunk))
        out[:, j0 : j0 + chunk.size] = prods @ basis
    out /= fs
    return AmbiguitySurface(out, delays, dopplers)


# ---------------------------------------------------------------------------
# closed forms


def _sinc(x):
    """sin(x)/x with the angular argument written out explicitly."""
    return np.sinc(np.asarray(x) / np.pi)


def _quad_phase_integral(a: float, b, t1: float, t2: float):
    """Integral of exp(j*(a*t^2 + b*t)) over [t1, t2]; b may be an array.

    For a = 0 this is the familiar 2*Td*sinc form; otherwise completing the
    square reduces it to Fresnel integrals with sqrt(2|a|/pi)-scaled,
    frequency-recentered arguments.
    """
    b = np.asarray(b, dtype=float)
    if t2 <= t1:
        return np.zeros(b.shape, dtype=np.complex128)
    if a == 0.0:
        t_d = (t2 - t1) / 2.0
        t_a = (t2 + t1) / 2.0
        return 2 * t_d * _sinc(b * t_d) * np.exp(1j * b * t_a)
    mag = abs(a)
    scale = np.sqrt(2.0 * mag / np.pi)
    shift = b / (2.0 * a)
    s1, c1 = _scipy_fresnel((t1 + shift) * scale)
    s2, c2 = _scipy_fresnel((t2 + shift) * scale)
    sign = 1.0 if a > 0 else -1.0
    return (np.exp(-1j * b * b / (4.0 * a)) * np.sqrt(np.pi / (2.0 * mag))
            * ((c2 - c1) + 1j * sign * (s2 - s1)))


def _sinc_window_term(kappa, t_d: float, t_a: float):
    return 2 * t_d * _sinc(kappa * t_d) * np.exp(1j * kappa * t_a)


def chirp_self_term(cfg: WaveformConfig, tau: float, dopplers, beta: float,
                    q: float = 1.0, f0_hz: float = 0.0, chirped=None) -> np.ndarray:
    """Chirp-only correlation: the sinc ridge along f_d = -beta*tau."""
    t_o = cfg.symbol_duration_s
    fd = np.asarray(dopplers, dtype=float)
    rng = range(cfg.n_symbols) if chirped is None else sorted(chirped)
    out = np.zeros(fd.shape, dtype=np.complex128)
    pref = q * q * np.exp(1j * (2 * np.pi * f0_hz * tau - np.pi * beta * tau * tau))
    for m in rng:
        for mp in rng:
            win = overlap_window(m, mp, tau, t_o)
            if win.empty:
                continue
            out += pref * _sinc_window_term(2 * np.pi * (fd + beta * tau), win.t_d, win.t_a)
    return out


def ofdm_self_term(grid: ResourceGrid, cfg: WaveformConfig, tau: float,
                   dopplers) -> np.ndarray:
    """Multicarrier-only correlation: a double sum of windowed sincs."""
    return _grid_pair_term(grid, cfg, tau, dopplers, beta=0.0, q=1.0)


def _grid_pair_term(grid: ResourceGrid, cfg: WaveformConfig, tau: float,
                    dopplers, beta: float, q: float) -> np.ndarray:
    """Shared (n, n') double sum behind the OFDM and multiplicative forms.

    With beta = 0 it is the plain OFDM term; otherwise it carries the
    quadratic phase and the +beta*tau ridge shift of the multiplied chirp.
    """
    n = cfg.n_subcarriers
    df = cfg.subcarrier_spacing_hz
    t_o = cfg.symbol_duration_s
    fd = np.asarray(dopplers, dtype=float)
    coef = grid.symbols / np.sqrt(n)
    phase_np = np.exp(2j * np.pi * np.arange(n) * df * tau)  # e^{j 2 pi n' df tau}
    dn = np.arange(-(n - 1), n)
    kappa = 2 * np.pi * (dn[:, None] * df + fd[None, :] + beta * tau)
    pref = q * q * np.exp(-1j * np.pi * beta * tau * tau)
    out = np.zeros(fd.shape, dtype=np.complex128)
    for m in range(cfg.n_symbols):
        for mp in range(cfg.n_symbols):
            win = overlap_window(m, mp, tau, t_o)
            if win.empty:
                continue
            # a[dn] = sum_{n'} X_m(n'+dn) X*_{mp}(n') e^{j 2 pi n' df tau}
            weight = np.conj(coef[mp]) * phase_np
            a = np.correlate(coef[m], np.conj(weight), mode="full")
            out += pref * (a[:, None] * _sinc_window_term(kappa, win.t_d, win.t_a)).sum(axis=0)
    return out


def cross_terms(grid: ResourceGrid, cfg: WaveformConfig, tau: float, dopplers,
                beta: float, q: float = 1.0, f0_hz: float = 0.0,
                chirped=None) -> np.ndarray:
    """Tone-against-chirp cross correlations (both orders), in Fresnel form.

    The tone-leading order integrates exp(-j pi beta u^2 + j 2 pi F u) over
    the shifted overlap with F = n*df - f0 + f_d; the chirp-leading order uses
    the opposite quadratic sign with G = f_d - n*df + f0.
    """
    n = cfg.n_subcarriers
    df = cfg.subcarrier_spacing_hz
    t_o = cfg.symbol_duration_s
    fd = np.asarray(dopplers, dtype=float)
    coef = grid.symbols / np.sqrt(n)
    tones = np.arange(n) * df
    chirped_set = set(range(cfg.n_symbols)) if chirped is None else set(chirped)
    out = np.zeros(fd.shape, dtype=np.complex128)
    for m in range(cfg.n_symbols):          # tone symbol
        for mp in chirped_set:              # chirp symbol
            # tones lead, delayed chirp conjugated
            u1 = max(m * t_o - tau, mp * t_o)
            u2 = min((m + 1) * t_o - tau, (mp + 1) * t_o)
            if u2 > u1:
                freq = tones[:, None] - f0_hz + fd[None, :]
                integral = _quad_phase_integral(-np.pi * beta, 2 * np.pi * freq, u1, u2)
                phase = np.exp(2j * np.pi * (freq + f0_hz) * tau)
                out += q * (coef[m][:, None] * phase * integral).sum(axis=0)
            # chirp leads, delayed tones conjugated
            t1 = max(mp * t_o, tau + m * t_o)
            t2 = min((mp + 1) * t_o, tau + (m + 1) * t_o)
            if t2 > t1:
                gfreq = fd[None, :] - tones[:, None] + f0_hz
                integral = _quad_phase_integral(np.pi * beta, 2 * np.pi * gfreq, t1, t2)
                out += q * (np.conj(coef[m])[:, None]
                            * np.exp(2j * np.pi * tones[:, None] * tau)
                            * integral).sum(axis=0)
    return out


def aac_ambiguity_analytic(grid: ResourceGrid, cfg: WaveformConfig, alpha: float,
                           delay_axis_s, doppler_axis_hz, beta: float | None = None,
                           q: float = 1.0, f0_hz: float = 0.0,
                           chirped_symbols=None) -> np.ndarray:
    """Closed-form surface for the additive waveform.

    Weighted four-term combination: (1-a)^2 times the multicarrier term,
    a(1-a) times the two Fresnel cross terms, a^2 times the chirp term.
    Returns raw complex values shaped (delays, dopplers).
    """
    if beta is None:
        beta = default_sweep_rate(cfg)
    delays = np.atleast_1d(np.asarray(delay_axis_s, dtype=float))
    dopplers = np.atleast_1d(np.asarray(doppler_axis_hz, dtype=float))
    out = np.zeros((delays.size, dopplers.size), dtype=np.complex128)
    for k, tau in enumerate(delays):
        acc = np.zeros(dopplers.size, dtype=np.complex128)
        if alpha < 1.0:
            acc += (1 - alpha) ** 2 * _grid_pair_term(grid, cfg, tau, dopplers, 0.0, 1.0)
        if alpha > 0.0:
            acc += alpha**2 * chirp_self_term(cfg, tau, dopplers, beta, q, f0_hz, chirped_symbols)
            if alpha < 1.0:
                acc += alpha * (1 - alpha) * cross_terms(
                    grid, cfg, tau, dopplers, beta, q, f0_hz, chirped_symbols)
        out[k] = acc
    return out


def cm_ambiguity_analytic(grid: ResourceGrid, cfg: WaveformConfig,
                          delay_axis_s, doppler_axis_hz, beta: float | None = None,
                          q: float = 1.0) -> np.ndarray:
    """Closed-form surface for the multiplicative waveform.

    The chirp shifts the windowed sinc ridge to kappa = (n-n')df + f_d +
    beta*tau and contributes the quadratic phase; beta = 0 collapses to the
    plain multicarrier form.
    """
    if beta is None:
        beta = default_sweep_rate(cfg)
    delays = np.atleast_1d(np.asarray(delay_axis_s, dtype=float))
    dopplers = np.atleast_1d(np.asarray(doppler_axis_hz, dtype=float))
    out = np.zeros((delays.size, dopplers.size), dtype=np.complex128)
    for k, tau in enumerate(delays):
        out[k] = _grid_pair_term(grid, cfg, tau, dopplers, beta, q)
    return out


# ---------------------------------------------------------------------------
# surface measurements and export


def mainlobe_width(surface: AmbiguitySurface, cut: str) -> float:
    """Half-power (-3 dB) full width of the zero-Doppler or zero-delay cut.

    Crossings are linearly interpolated between grid points.  Raises when the
    requested cut is missing from the grid or the lobe never falls below the
    half-power level inside the axis span.
    """
    mag = surface.magnitude
    if cut == "zero_doppler":
        j = int(np.argmin(np.abs(surface.doppler_axis_hz)))
        line = mag[:, j]
        axis = surface.delay_axis_s
    elif cut == "zero_delay":
        k = int(np.argmin(np.abs(surface.delay_axis_s)))
        line = mag[k, :]
        axis = surface.doppler_axis_hz
    else:
        raise InvalidInput("cut must be 'zero_doppler' or 'zero_delay'")
    peak = int(np.argmax(line))
    level = line[peak] / np.sqrt(2.0)

    def cross(direction: int) -> float:
        i = peak
        while 0 <= i + direction < line.size:
            j = i + direction
            if line[j] < level:
                frac = (line[i] - level) / (line[i] - line[j])
                return axis[i] + frac * (axis[j] - axis[i])
            i = j
        raise InvalidInput("mainlobe wider than the measured axis")

    return float(cross(+1) - cross(-1))


def surface_to_csv(surface: AmbiguitySurface, path) -> None:
    """Write (delay_s, doppler_hz, magnitude) triples, delay-major."""
    mag = surface.magnitude
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["delay_s", "doppler_hz", "magnitude"])
        for i, tau in enumerate(surface.delay_axis_s):
            for j, fd in enumerate(surface.doppler_axis_hz):
                writer.writerow([f"{tau:.12g}", f"{fd:.12g}", f"{mag[i, j]:.10g}"])
