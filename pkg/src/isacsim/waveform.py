"""Transmit-side signal synthesis.

Builds plain OFDM frames, linear chirps, their affine (additive) and
multiplicative combinations on the slot/symbol grid, and the peak-to-average
power machinery including the closed-form power-allocation threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import WaveformConfig
from .constants import SLOT_SYMBOLS
from .errors import InvalidInput

_INV_SQRT2 = 1.0 / np.sqrt(2.0)

SCHEMES = ("ofdm", "aac", "cm")
CHIRP_MODES = ("symbol", "slot", "hybrid")


@dataclass(frozen=True)
class TimeSignal:
    """Complex baseband samples with their rate and window start time."""

    samples: np.ndarray
    sample_rate_hz: float
    t0_s: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.complex128))
        if self.sample_rate_hz <= 0:
            raise InvalidInput("sample_rate_hz must be positive")

    def __len__(self) -> int:
        return self.samples.size

    def times(self) -> np.ndarray:
        return self.t0_s + np.arange(self.samples.size) / self.sample_rate_hz

    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class ResourceGrid:
    """M x N frequency-domain payload symbols plus a mask of data-bearing cells.

    Data cells must average unit power; masked-out cells hold zeros or known
    reference values (pilots).
    """

    symbols: np.ndarray
    data_mask: np.ndarray

    def __post_init__(self):
        sym = np.asarray(self.symbols, dtype=np.complex128)
        if sym.ndim != 2:
            raise InvalidInput("grid symbols must be a 2-D (symbols x subcarriers) array")
        mask = np.asarray(self.data_mask, dtype=bool)
        if mask.shape != sym.shape:
            raise InvalidInput("data_mask shape must match symbols")
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "data_mask", mask)
        if mask.any():
            mean_power = float(np.mean(np.abs(sym[mask]) ** 2))
            if abs(mean_power - 1.0) > 1e-12:
                raise InvalidInput(
                    f"data cells must average unit power, got {mean_power!r}"
                )

    @property
    def n_symbols(self) -> int:
        return self.symbols.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.symbols.shape[1]


@dataclass(frozen=True)
class ChirpPlan:
    """Time-frequency placement of the chirp.

    ``mode`` selects one sweep per symbol, one sweep per 14-symbol slot, or a
    per-slot hybrid pattern.  The swept band is
    ``[start_subcarrier, end_subcarrier) * subcarrier spacing`` and the sweep
    duration is ``m * T_o`` where ``m`` is the number of symbols one sweep
    spans; the rate is their quotient unless pinned explicitly.
    """

    mode: str = "symbol"
    start_subcarrier: int = 0
    end_subcarrier: int | None = None  # exclusive; None means full band
    start_symbol: int = 0
    n_chirped_symbols: int | None = None  # None means every symbol in range
    amplitude: float = 1.0
    rate_hz_per_s: float | None = None
    hybrid_pattern: tuple | None = None  # per-slot entries: "slot" | "symbol" | None

    def __post_init__(self):
        if self.mode not in CHIRP_MODES:
            raise InvalidInput(f"unknown chirp mode {self.mode!r}")
        if self.amplitude < 0:
            raise InvalidInput("chirp amplitude must be non-negative")

    def resolve_band(self, cfg: WaveformConfig) -> tuple[int, int]:
        n_i = self.start_subcarrier
        n_j = self.end_subcarrier if self.end_subcarrier is not None else cfg.n_subcarriers
        if not (0 <= n_i < n_j <= cfg.n_subcarriers):
            raise InvalidInput(f"chirp band [{n_i}, {n_j}) outside grid of {cfg.n_subcarriers}")
        return n_i, n_j

    def resolve_symbols(self, cfg: WaveformConfig) -> tuple[int, int]:
        m0 = self.start_symbol
        count = self.n_chirped_symbols
        if count is None:
            count = cfg.n_symbols - m0
        if not (0 <= m0 and count >= 1 and m0 + count <= cfg.n_symbols):
            raise InvalidInput("chirped symbol range outside the frame")
        return m0, count

    def bandwidth_hz(self, cfg: WaveformConfig) -> float:
        n_i, n_j = self.resolve_band(cfg)
        return (n_j - n_i) * cfg.subcarrier_spacing_hz

    def sweep_symbols(self, cfg: WaveformConfig) -> int:
        """Symbols spanned by one chirp sweep."""
        if self.mode == "symbol":
            return 1
        if self.mode == "slot":
            _, count = self.resolve_symbols(cfg)
            return min(SLOT_SYMBOLS, count)
        raise InvalidInput("hybrid plans have no single sweep length")

    def duration_s(self, cfg: WaveformConfig) -> float:
        return self.sweep_symbols(cfg) * cfg.symbol_duration_s

    def rate(self, cfg: WaveformConfig) -> float:
        """Sweep rate in Hz/s; validates a pinned rate against the placement."""
        derived = self.bandwidth_hz(cfg) / self.duration_s(cfg)
        if self.rate_hz_per_s is None:
            return derived
        if abs(self.rate_hz_per_s - derived) > 1e-9 * abs(derived):
            raise InvalidInput(
                f"stored rate {self.rate_hz_per_s} disagrees with placement-derived {derived}"
            )
        return self.rate_hz_per_s


def full_band_plan(cfg: WaveformConfig, mode: str = "symbol", **kwargs) -> ChirpPlan:
    """Chirp sweeping the whole occupied band in the given mode."""
    return ChirpPlan(mode=mode, start_subcarrier=0, end_subcarrier=cfg.n_subcarriers, **kwargs)


# ---------------------------------------------------------------------------
# modulation


def qpsk_map(bits) -> np.ndarray:
    """Gray-map bit pairs to unit-energy QPSK.

    00 -> (1+j)/sqrt2, 01 -> (-1+j)/sqrt2, 11 -> (-1-j)/sqrt2, 10 -> (1-j)/sqrt2.
    """
    b = np.asarray(bits).ravel()
    if b.size % 2:
        raise InvalidInput("bit count must be even for QPSK")
    b = b.astype(np.int8)
    first, second = b[0::2], b[1::2]
    return ((1 - 2 * second) + 1j * (1 - 2 * first)) * _INV_SQRT2


def qpsk_demap(symbols) -> np.ndarray:
    """Hard decisions back to bits; exact inverse of qpsk_map on clean input."""
    s = np.asarray(symbols).ravel()
    bits = np.empty(2 * s.size, dtype=np.int8)
    bits[0::2] = (s.imag < 0).astype(np.int8)
    bits[1::2] = (s.real < 0).astype(np.int8)
    return bits


def random_qpsk_grid(cfg: WaveformConfig, rng: np.random.Generator,
                     data_mask: np.ndarray | None = None,
                     reference_value: complex | None = None) -> ResourceGrid:
    """Random QPSK payload on data cells; masked-out cells get the reference value.

    With ``reference_value=None`` the non-data cells are zero; pass a complex
    value (e.g. a known pilot symbol) to fill them deterministically.
    """
    shape = (cfg.n_symbols, cfg.n_subcarriers)
    bits = rng.integers(0, 2, 2 * shape[0] * shape[1])
    symbols = qpsk_map(bits).reshape(shape)
    if data_mask is None:
        data_mask = np.ones(shape, dtype=bool)
    else:
        data_mask = np.asarray(data_mask, dtype=bool)
        fill = 0.0 if reference_value is None else reference_value
        symbols = np.where(data_mask, symbols, fill)
    return ResourceGrid(symbols=symbols, data_mask=data_mask)


def comb_pilot_mask(cfg: WaveformConfig, comb: int = 4, offset: int = 0,
                    symbols: tuple | None = None) -> np.ndarray:
    """Boolean mask of comb-spaced reference cells (True where the pilot sits).

    Marks every ``comb``-th subcarrier on the selected symbols, mirroring the
    comb-4 positioning-reference layout.
    """
    if comb < 1 or not (0 <= offset < comb):
        raise InvalidInput("need comb >= 1 and 0 <= offset < comb")
    mask = np.zeros((cfg.n_symbols, cfg.n_subcarriers), dtype=bool)
    rows = range(cfg.n_symbols) if symbols is None else symbols
    for m in rows:
        mask[m, offset::comb] = True
    return mask


# ---------------------------------------------------------------------------
# synthesis


def ofdm_modulate(grid: ResourceGrid, cfg: WaveformConfig) -> TimeSignal:
    """Per-symbol unitary inverse DFT with a cyclic prefix prepended.

    The 1/sqrt(N) scaling makes grid power equal time-domain power exactly.
    """
    if grid.symbols.shape != (cfg.n_symbols, cfg.n_subcarriers):
        raise InvalidInput(
            f"grid shape {grid.symbols.shape} does not match config "
            f"({cfg.n_symbols}, {cfg.n_subcarriers})"
        )
    useful = np.fft.ifft(grid.symbols, axis=1) * np.sqrt(cfg.n_subcarriers)
    if cfg.cp_samples:
        frame = np.concatenate([useful[:, -cfg.cp_samples:], useful], axis=1)
    else:
        frame = useful
    return TimeSignal(frame.ravel(), cfg.sample_rate_hz)


def _chirp_support(plan: ChirpPlan, cfg: WaveformConfig) -> list[tuple[int, int, int]]:
    """(first_symbol, n_symbols, sweep_anchor_symbol) for each continuous sweep."""
    m0, count = plan.resolve_symbols(cfg)
    if plan.mode == "symbol":
        return [(m, 1, m) for m in range(m0, m0 + count)]
    if plan.mode == "slot":
        spans = []
        m = m0
        while m < m0 + count:
            span = min(SLOT_SYMBOLS, m0 + count - m)
            spans.append((m, span, m))
            m += span
        return spans
    # hybrid: pattern entry per slot
    pattern = plan.hybrid_pattern
    if pattern is None:
        pattern = ("slot", "symbol", None, None, "slot", "symbol", None, None)
    if cfg.n_symbols % SLOT_SYMBOLS:
        raise InvalidInput("hybrid mode needs a whole number of 14-symbol slots")
    n_slots = cfg.n_symbols // SLOT_SYMBOLS
    spans = []
    for s in range(n_slots):
        kind = pattern[s % len(pattern)]
        base = s * SLOT_SYMBOLS
        if kind == "slot":
            spans.append((base, SLOT_SYMBOLS, base))
        elif kind == "symbol":
            spans.append((base, 1, base))
        elif kind is not None:
            raise InvalidInput(f"unknown hybrid pattern entry {kind!r}")
    return spans


def _sweep_rate(plan: ChirpPlan, cfg: WaveformConfig, span: int) -> float:
    return plan.bandwidth_hz(cfg) / (span * cfg.symbol_duration_s)


def _chirp_samples(plan: ChirpPlan, cfg: WaveformConfig) -> np.ndarray:
    if plan.mode == "hybrid" and plan.rate_hz_per_s is not None:
        raise InvalidInput("hybrid plans derive per-sweep rates; leave rate unset")
    n_i, _ = plan.resolve_band(cfg)
    f0 = n_i * cfg.subcarrier_spacing_hz
    sym_len = cfg.symbol_samples
    out = np.zeros(cfg.frame_samples, dtype=np.complex128)
    for first, span, anchor in _chirp_support(plan, cfg):
        beta = _sweep_rate(plan, cfg, span) if plan.mode == "hybrid" else plan.rate(cfg)
        start = first * sym_len
        stop = (first + span) * sym_len
        t = (np.arange(start, stop) - anchor * sym_len) * cfg.sample_period_s
        out[start:stop] = plan.amplitude * np.exp(
            1j * (2 * np.pi * f0 * t + np.pi * beta * t * t)
        )
    return out


def generate_chirp(plan: ChirpPlan, cfg: WaveformConfig) -> TimeSignal:
    """Sample the planned chirp over a full frame, zero outside its support.

    Each sweep runs q * exp(j*2*pi*f0*t + j*pi*beta*t^2) with t counted from
    the sweep anchor, so c(0) = q and slot sweeps stay phase-continuous
    across every cyclic prefix they cover.  f0 is the band's start frequency.
    """
    return TimeSignal(_chirp_samples(plan, cfg), cfg.sample_rate_hz)


def compose_aac(ofdm: TimeSignal, chirp: TimeSignal, alpha: float) -> TimeSignal:
    """Affine combination (1-alpha)*s + alpha*c, sample by sample."""
    if len(ofdm) != len(chirp):
        raise InvalidInput("ofdm and chirp signals must have equal length")
    if ofdm.sample_rate_hz != chirp.sample_rate_hz:
        raise InvalidInput("ofdm and chirp signals must share a sample rate")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInput("alpha must lie in [0, 1]")
    return TimeSignal(
        (1.0 - alpha) * ofdm.samples + alpha * chirp.samples,
        ofdm.sample_rate_hz,
        ofdm.t0_s,
    )


def compose_cm(grid: ResourceGrid, plan: ChirpPlan, cfg: WaveformConfig) -> TimeSignal:
    """Multiply the covered symbols by the chirp; other symbols pass through.

    The chirp multiplies the useful window of each symbol in the plan's range
    and the cyclic prefix then copies the chirped tail, so the envelope
    matches plain OFDM sample for sample, per-subcarrier equalization stays
    exact, and the unit-modulus factor is exactly invertible.  To chirp only
    reference cells (a comb-4 positioning layout, say), put them on dedicated
    symbols in the grid and cover just those symbols: uncovered symbols come
    out bit-identical to plain OFDM.
    """
    if grid.symbols.shape != (cfg.n_symbols, cfg.n_subcarriers):
        raise InvalidInput("grid dimensions do not match config")
    plan.resolve_band(cfg)

    n = cfg.n_subcarriers
    useful = np.fft.ifft(grid.symbols, axis=1) * np.sqrt(n)
    chirp = _chirp_samples(plan, cfg).reshape(cfg.n_symbols, cfg.symbol_samples)
    chirp_use = chirp[:, cfg.cp_samples:]
    covered = np.abs(chirp_use) > 0
    useful = np.where(covered, useful * chirp_use, useful)
    if cfg.cp_samples:
        frame = np.concatenate([useful[:, -cfg.cp_samples:], useful], axis=1)
    else:
        frame = useful
    return TimeSignal(frame.ravel(), cfg.sample_rate_hz)


def build_frame(grid: ResourceGrid, plan: ChirpPlan | None, cfg: WaveformConfig,
                scheme: str, alpha: float | None = None) -> TimeSignal:
    """Full frame for one scheme: "ofdm", "aac", or "cm".

    "aac" adds the planned chirp with weight alpha (cfg.alpha when not given);
    outside the chirp's support the affine sum simply carries (1-alpha)*s.
    "cm" multiplies the covered component per compose_cm.
    """
    if scheme not in SCHEMES:
        raise InvalidInput(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if scheme == "ofdm":
        return ofdm_modulate(grid, cfg)
    if plan is None:
        raise InvalidInput(f"scheme {scheme!r} needs a chirp plan")
    if scheme == "aac":
        a = cfg.alpha if alpha is None else alpha
        s = ofdm_modulate(grid, cfg)
        c = TimeSignal(_chirp_samples(plan, cfg), cfg.sample_rate_hz)
        return compose_aac(s, c, a)
    return compose_cm(grid, plan, cfg)


# ---------------------------------------------------------------------------
# peak-to-average power


def papr_db(x: TimeSignal, per: str = "whole", cfg: WaveformConfig | None = None):
    """10*log10(peak power / mean power).

    per="whole" treats the signal as one block; per="symbol" returns one value
    per OFDM symbol computed over the useful samples (cyclic prefix excluded),
    which requires the frame layout from ``cfg``.
    """
    s = x.samples
    if s.size == 0 or not np.any(s):
        raise InvalidInput("papr of an empty or all-zero signal is undefined")
    if per == "whole":
        p = np.abs(s) ** 2
        return float(10 * np.log10(p.max() / p.mean()))
    if per != "symbol":
        raise InvalidInput(f"per must be 'symbol' or 'whole', got {per!r}")
    if cfg is None:
        raise InvalidInput("per-symbol papr needs the frame config")
    if s.size != cfg.frame_samples:
        raise InvalidInput("signal length does not match the config frame")
    useful = s.reshape(cfg.n_symbols, cfg.symbol_samples)[:, cfg.cp_samples:]
    p = np.abs(useful) ** 2
    return 10 * np.log10(p.max(axis=1) / p.mean(axis=1))


def papr_db_blocks(blocks: np.ndarray) -> np.ndarray:
    """Vectorized per-row PAPR in dB for a (blocks x samples) array."""
    p = np.abs(np.asarray(blocks)) ** 2
    return 10 * np.log10(p.max(axis=-1) / p.mean(axis=-1))


def alpha_threshold(g: float, e: float) -> float:
    """Smallest chirp weight guaranteed to pull the normalized PAPR below g^2.

    g is the peak amplitude of the unit-power multicarrier block and e the
    magnitude of its correlation with the unit-modulus chirp.  Any weight
    above the returned value satisfies PAPR < g^2 after equal-power
    normalization.
    """
    if g < 1.0:
        raise InvalidInput("peak amplitude below 1 is impossible for unit-power blocks")
    if not 0.0 <= e <= 1.0:
        raise InvalidInput("correlation magnitude must lie in [0, 1]")
    denom = g * g + 2.0 * g - 1.0 + 2.0 * g * g * e
    if denom <= 0:
        raise InvalidInput("degenerate threshold denominator")
    return 2.0 * g * (g * e + 1.0) / denom


def composite_power_gain(alpha: float, rho: complex) -> float:
    """Average power of (1-a)s + a*c for unit-power s, c with correlation rho."""
    return (1 - alpha) ** 2 + alpha**2 + 2 * alpha * (1 - alpha) * np.real(rho)


def block_peak_and_correlation(s: np.ndarray, c: np.ndarray) -> tuple[float, complex]:
    """Per-block peak amplitude g of s and its correlation rho with c."""
    s = np.asarray(s)
    c = np.asarray(c)
    g = float(np.max(np.abs(s)))
    rho = complex(np.mean(s * np.conj(c)))
    return g, rho
