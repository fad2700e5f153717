"""Radio numerology: one validated record holding every waveform parameter."""

from __future__ import annotations

from dataclasses import dataclass, field

from .constants import C_LIGHT, DEFAULT_CP_RATIO
from .errors import InvalidInput


def default_cp_samples(n_subcarriers: int) -> int:
    """Cyclic-prefix length matching the standard guard fraction (70 for N=1024)."""
    return int(round(n_subcarriers * DEFAULT_CP_RATIO))


@dataclass(frozen=True)
class WaveformConfig:
    """All radio numerology in one place.

    ``sample_rate_hz`` is exactly ``n_subcarriers * subcarrier_spacing_hz``;
    the useful symbol lasts ``1/subcarrier_spacing_hz`` and the cyclic prefix
    adds ``cp_samples`` more samples.
    """

    n_subcarriers: int
    subcarrier_spacing_hz: float
    cp_samples: int | None = None
    n_symbols: int = 14
    carrier_hz: float = 24e9
    alpha: float = 0.5
    modulation: str = "QPSK"

    def __post_init__(self):
        if self.n_subcarriers < 1:
            raise InvalidInput("n_subcarriers must be a positive integer")
        if self.subcarrier_spacing_hz <= 0:
            raise InvalidInput("subcarrier_spacing_hz must be positive")
        if self.n_symbols < 1:
            raise InvalidInput("n_symbols must be a positive integer")
        if self.carrier_hz <= 0:
            raise InvalidInput("carrier_hz must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidInput("alpha must lie in [0, 1]")
        if self.modulation != "QPSK":
            raise InvalidInput(f"unsupported modulation {self.modulation!r}")
        if self.cp_samples is None:
            object.__setattr__(self, "cp_samples", default_cp_samples(self.n_subcarriers))
        if self.cp_samples < 0:
            raise InvalidInput("cp_samples must be non-negative")

    @property
    def sample_rate_hz(self) -> float:
        return self.n_subcarriers * self.subcarrier_spacing_hz

    @property
    def sample_period_s(self) -> float:
        return 1.0 / self.sample_rate_hz

    @property
    def useful_duration_s(self) -> float:
        """Duration of the N useful samples, 1/subcarrier spacing."""
        return 1.0 / self.subcarrier_spacing_hz

    @property
    def cp_duration_s(self) -> float:
        return self.cp_samples / self.sample_rate_hz

    @property
    def symbol_duration_s(self) -> float:
        """Total symbol duration including the cyclic prefix."""
        return self.useful_duration_s + self.cp_duration_s

    @property
    def symbol_samples(self) -> int:
        return self.n_subcarriers + self.cp_samples

    @property
    def frame_samples(self) -> int:
        return self.n_symbols * self.symbol_samples

    @property
    def wavelength_m(self) -> float:
        return C_LIGHT / self.carrier_hz
