"""Range and velocity estimation for a single echo, with bias injections.

Walks the monostatic chain: transmit a chirp-bearing frame, reflect it off a
target at 50 m moving 20 m/s, pulse-compress, estimate.  Then shows the two
synchronization biases: a clock drift shifts range by c*dt/2 and a residual
carrier offset shifts velocity by (lambda/2)*eps.
"""

import math

import numpy as np

from isacsim import C_LIGHT, WaveformConfig
from isacsim.experiments import range_trial, trial_rng, velocity_trial

cfg = WaveformConfig(n_subcarriers=1024, subcarrier_spacing_hz=120e3,
                     cp_samples=70, n_symbols=14, carrier_hz=24e9)

print("clean estimates (no noise):")
for scheme, alpha, placement in [("chirp", 1.0, "symbol"), ("aac", 0.5, "slot"),
                                 ("cm", 0.0, "symbol"), ("ofdm", 0.0, "symbol")]:
    r, r_true = range_trial(cfg, scheme, alpha, placement, 50.0, 0.0, math.inf,
                            trial_rng(1, 0, 0))
    print(f"  {scheme:5s} ({placement:6s}) range {r:7.3f} m   (truth {r_true})")

v, v_true = velocity_trial(cfg, "aac", 0.5, 14, 50.0, 20.0, math.inf, trial_rng(2, 0, 0))
print(f"  aac velocity over 14 slots: {v:.4f} m/s (truth {v_true})")

print("\nsynchronization biases:")
dt = 33.33e-9
r, _ = range_trial(cfg, "chirp", 1.0, "symbol", 50.0, 0.0, math.inf,
                   trial_rng(3, 0, 0), timing_drift_s=dt)
print(f"  clock drift {dt*1e9:.2f} ns -> range {r:.2f} m "
      f"(expected bias c*dt/2 = {C_LIGHT*dt/2:.2f} m)")
for eps in (160.0, -160.0):
    v, _ = velocity_trial(cfg, "aac", 0.5, 2, 50.0, 20.0, math.inf,
                          trial_rng(4, 0, 0), cfo_hz=eps)
    print(f"  carrier offset {eps:+6.1f} Hz -> velocity {v:.4f} m/s "
          f"(expected bias {cfg.wavelength_m/2*eps:+.3f} m/s)")

print("\nnoise behavior at a few SNRs (20 trials each, additive scheme):")
for snr in (-20.0, -10.0, 0.0):
    pairs = [range_trial(cfg, "aac", 0.5, "slot", 50.0, 0.0, snr,
                         trial_rng(5, int(snr), t)) for t in range(20)]
    err = np.sqrt(np.mean([(a - b) ** 2 for a, b in pairs]))
    print(f"  snr {snr:+5.1f} dB: slot-level range RMSE {err:8.3f} m")
