"""Build the three waveforms on one slot and compare their envelopes.

The additive chirp smooths the envelope (lower peak-to-average power) while
the multiplicative chirp leaves the envelope exactly equal to plain OFDM.
Needs matplotlib for the figure; numbers print either way.
"""

import numpy as np

from isacsim import (
    WaveformConfig,
    build_frame,
    full_band_plan,
    papr_db,
    random_qpsk_grid,
)

cfg = WaveformConfig(n_subcarriers=256, subcarrier_spacing_hz=120e3,
                     cp_samples=18, n_symbols=14, carrier_hz=24e9)
rng = np.random.default_rng(1)
grid = random_qpsk_grid(cfg, rng)
plan = full_band_plan(cfg, "symbol")

frames = {
    "plain OFDM": build_frame(grid, None, cfg, "ofdm"),
    "additive chirp (alpha=0.5)": build_frame(grid, plan, cfg, "aac", alpha=0.5),
    "multiplicative chirp": build_frame(grid, plan, cfg, "cm"),
}

for name, sig in frames.items():
    per_symbol = papr_db(sig, "symbol", cfg)
    print(f"{name:28s}  worst-symbol PAPR {per_symbol.max():5.2f} dB  "
          f"mean {per_symbol.mean():5.2f} dB")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit("matplotlib not installed; numbers above are the result")

t_us = np.arange(cfg.frame_samples) / cfg.sample_rate_hz * 1e6
fig, axes = plt.subplots(3, 1, figsize=(9, 6), sharex=True)
for ax, (name, sig) in zip(axes, frames.items()):
    ax.plot(t_us, np.abs(sig.samples), lw=0.4)
    ax.set_ylabel("|x(t)|")
    ax.set_title(name, fontsize=9)
axes[-1].set_xlabel("time (us)")
fig.tight_layout()
fig.savefig("demos_waveforms.png", dpi=120)
print("wrote demos_waveforms.png")
