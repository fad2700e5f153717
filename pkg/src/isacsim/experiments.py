"""Seeded batch experiments behind the command-line runner.

Every experiment resolves a JSON config against its defaults, fans trials out
over counter-based per-trial random streams (so worker count cannot change
results), and writes CSV files plus a ``run.json`` manifest with the resolved
parameters.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

import numpy as np

from . import __version__ as _version
from .channel import (
    ChannelRealization,
    add_awgn,
    apply_channel,
    genie_csi,
    multipath_profile,
    single_target,
)
from .comms import (
    conv_encode,
    ebn0_to_snr_db,
    qpsk_demap,
    receive_frame,
    viterbi_decode_batch,
)
from .config import WaveformConfig
from .constants import C_LIGHT, SLOT_SYMBOLS
from .errors import InvalidInput
from .sensing import (
    estimate_range,
    estimate_velocity,
    matched_filter,
    matched_filter_slot,
    noncoherent_sum,
    peak_bin,
    rmse_aggregate,
    sensing_limits,
    complexity_counts,
)
from .waveform import (
    ChirpPlan,
    ResourceGrid,
    TimeSignal,
    full_band_plan,
    generate_chirp,
    ofdm_modulate,
    papr_db_blocks,
    qpsk_map,
    random_qpsk_grid,
)
from .ambiguity import ambiguity_numeric, analysis_signal, surface_to_csv

EXPERIMENTS = (
    "papr_ccdf",
    "ber",
    "spectral_efficiency",
    "rmse_range",
    "rmse_velocity",
    "ambiguity",
    "limits",
    "complexity",
)

_TABLE_WAVEFORM = {
    "n_subcarriers": 1024,
    "subcarrier_spacing_hz": 120e3,
    "cp_samples": 70,
    "n_symbols": 14,
    "carrier_hz": 24e9,
    "alpha": 0.5,
    "modulation": "QPSK",
}

_DEFAULTS = {
    "papr_ccdf": {
        "seed": 20240601,
        "trials": 100000,
        "waveform": {**_TABLE_WAVEFORM, "n_subcarriers": 256, "cp_samples": 18},
        "schemes": ["ofdm", "cm", "aac"],
        "alphas": [0.1, 0.3, 0.5],
        "threshold_grid_db": {"start": 0.0, "stop": 14.0, "step": 0.05},
    },
    "ber": {
        "seed": 20240602,
        "trials": 40,
        "waveform": {**_TABLE_WAVEFORM, "n_subcarriers": 256, "cp_samples": 18},
        "schemes": ["ofdm", "cm", "aac"],
        "alphas": [0.1, 0.3, 0.5],
        "ebn0_grid_db": [0.0, 2.0, 4.0, 6.0, 8.0],
    },
    "spectral_efficiency": {
        "seed": 20240603,
        "trials": 40,
        "waveform": {**_TABLE_WAVEFORM, "n_subcarriers": 256, "cp_samples": 18},
        "schemes": ["ofdm", "cm", "aac"],
        "alphas": [0.1, 0.3, 0.5],
        "ebn0_grid_db": [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0],
        "pilot_fraction": 0.25,
    },
    "rmse_range": {
        "seed": 20240604,
        "trials": 200,
        "waveform": _TABLE_WAVEFORM,
        "schemes": ["chirp", "aac", "cm", "ofdm"],
        "alphas": [0.5],
        "placements": ["symbol", "slot"],
        "snr_grid_db": [-20.0, -15.0, -10.0, -5.0, 0.0],
        "target_range_m": 50.0,
        "target_velocity_mps": 30.0,
        "pilot_fraction": 1.0,
        "max_range_bins": 1024,
    },
    "rmse_velocity": {
        "seed": 20240605,
        "trials": 200,
        "waveform": _TABLE_WAVEFORM,
        "schemes": ["chirp", "aac", "ofdm", "cm"],
        "alphas": [0.5],
        "snr_grid_db": [0.0],
        "target_range_m": 50.0,
        "target_velocity_mps": 20.0,
        "n_slots": 14,
        "pilot_fraction": 1.0,
        "max_range_bins": 1024,
    },
    "ambiguity": {
        "seed": 20240606,
        "trials": 1,
        "waveform": {**_TABLE_WAVEFORM, "n_subcarriers": 128, "cp_samples": 9, "n_symbols": 1},
        "schemes": ["ofdm", "cm", "aac"],
        "alphas": [0.5],
        "oversample": 16,
        "n_delay": 128,
        "n_doppler": 128,
        "doppler_span_factor": 2.0,
    },
    "limits": {
        "seed": 0,
        "trials": 1,
        "waveform": {**_TABLE_WAVEFORM, "n_subcarriers": 256, "cp_samples": 18},
        "blocks": [
            {"block": "A", "n": 256, "m": 1},
            {"block": "B", "n": 2, "m": 14},
            {"block": "C", "n": 64, "m": 7},
            {"block": "D", "n": 2, "m": 2},
        ],
    },
    "complexity": {
        "seed": 0,
        "trials": 1,
        "waveform": _TABLE_WAVEFORM,
        "schemes": ["aac", "cm", "ofdm_prs"],
    },
}


# ---------------------------------------------------------------------------
# config plumbing


def _merge(defaults, user, path=""):
    if isinstance(defaults, dict):
        if not isinstance(user, dict):
            raise InvalidInput(f"config key {path or '<root>'} must be an object")
        out = dict(defaults)
        for key, val in user.items():
            if key not in defaults:
                raise InvalidInput(
                    f"unknown config key {path + key!r}; known keys here: "
                    + ", ".join(sorted(defaults))
                )
            out[key] = _merge(defaults[key], val, path + key + ".")
        return out
    return user


def resolve_config(experiment: str, user: dict | None = None) -> dict:
    """Experiment defaults overlaid with the user's JSON, unknown keys rejected."""
    if experiment not in EXPERIMENTS:
        raise InvalidInput(
            f"unknown experiment {experiment!r}; choose one of: " + ", ".join(EXPERIMENTS)
        )
    base = {"experiment": experiment, **_DEFAULTS[experiment]}
    user = dict(user or {})
    user.pop("experiment", None)
    cfg = _merge(base, user)
    cfg["experiment"] = experiment
    if cfg["trials"] < 1:
        raise InvalidInput("config key 'trials' must be >= 1")
    if "snr_grid_db" in cfg and not cfg["snr_grid_db"]:
        raise InvalidInput("config key 'snr_grid_db' must not be empty")
    return cfg


def waveform_from_config(conf: dict) -> WaveformConfig:
    return WaveformConfig(**conf["waveform"])


def trial_rng(seed: int, *path) -> np.random.Generator:
    """Independent counter-based stream for one (experiment point, trial)."""
    mix = 0xA5A5_5A5A_DEAD_BEEF
    for part in path:
        mix = (mix * 1_000_003 + int(part) + 1) % (1 << 64)
    key = np.array([int(seed) % (1 << 64), mix], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _child_seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


def ccdf(values, levels):
    """Smallest thresholds whose exceedance probability drops to each level."""
    vals = np.sort(np.asarray(values, dtype=float).ravel())
    if vals.size == 0:
        raise InvalidInput("ccdf of an empty sample is undefined")
    out = []
    n = vals.size
    for p in np.atleast_1d(levels):
        if not 0.0 <= p <= 1.0:
            raise InvalidInput("ccdf levels must lie in [0, 1]")
        i = max(int(math.ceil(n * (1.0 - p))) - 1, 0)
        out.append(float(vals[i]))
    return out if len(out) > 1 else out[0]


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    return v


def _map_trials(fn, n_trials: int, workers: int):
    if workers <= 1:
        return [fn(t) for t in range(n_trials)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_trials), chunksize=max(1, n_trials // (4 * workers))))


# ---------------------------------------------------------------------------
# waveform batches (PAPR)


def papr_samples(cfg: WaveformConfig, scheme: str, alpha: float, n_symbols: int,
                 seed: int, batch: int = 20000, oversample: int = 4) -> np.ndarray:
    """Per-symbol PAPR draws for one scheme.

    Peaks are measured on the band-limited waveform (``oversample`` x the
    subcarrier grid, via zero-padded inverse transform), the usual convention
    for quoting transmit PAPR; pass oversample=1 for grid-rate blocks.  The
    multiplicative scheme shares the additive scheme's unit-envelope identity
    with plain OFDM, so it reuses the same symbol stream as "ofdm" (their
    curves coincide by construction).
    """
    n = cfg.n_subcarriers
    lo = n * oversample
    stream = "ofdm" if scheme == "cm" else scheme
    tsp = cfg.sample_period_s / oversample
    beta = n * cfg.subcarrier_spacing_hz / cfg.symbol_duration_s
    t = (np.arange(lo) + cfg.cp_samples * oversample) * tsp
    chirp_use = np.exp(1j * np.pi * beta * t * t)
    out = np.empty(n_symbols)
    done = 0
    block = 0
    while done < n_symbols:
        take = min(batch, n_symbols - done)
        rng = trial_rng(seed, _scheme_tag(stream), block)
        bits = rng.integers(0, 2, 2 * take * n)
        sym = qpsk_map(bits).reshape(take, n)
        s = np.fft.ifft(sym, n=lo, axis=1) * (lo / np.sqrt(n))
        if scheme == "aac":
            blocks = (1.0 - alpha) * s + alpha * chirp_use[None, :]
        else:  # ofdm and cm share the envelope
            blocks = s
        out[done : done + take] = papr_db_blocks(blocks)
        done += take
        block += 1
    return out


def replace_symbols(cfg: WaveformConfig, m: int) -> WaveformConfig:
    return WaveformConfig(
        n_subcarriers=cfg.n_subcarriers,
        subcarrier_spacing_hz=cfg.subcarrier_spacing_hz,
        cp_samples=cfg.cp_samples,
        n_symbols=m,
        carrier_hz=cfg.carrier_hz,
        alpha=cfg.alpha,
        modulation=cfg.modulation,
    )


def _scheme_tag(scheme: str) -> int:
    return {"ofdm": 1, "aac": 2, "cm": 3, "chirp": 4, "ofdm_prs": 5}[scheme]


def _run_papr_ccdf(conf: dict, out_dir: Path, workers: int):
    cfg = waveform_from_config(conf)
    grid = conf["threshold_grid_db"]
    thresholds = np.arange(grid["start"], grid["stop"] + grid["step"] / 2, grid["step"])
    rows = []
    for scheme in conf["schemes"]:
        alphas = conf["alphas"] if scheme == "aac" else [0.0]
        for alpha in alphas:
            vals = papr_samples(cfg, scheme, alpha, conf["trials"], conf["seed"])
            frac = 1.0 - np.searchsorted(np.sort(vals), thresholds, side="right") / vals.size
            for t, p in zip(thresholds, frac):
                rows.append([scheme, alpha, float(t), float(p)])
    path = out_dir / "papr_ccdf.csv"
    _write_csv(path, ["scheme", "alpha", "papr_db", "ccdf"], rows)
    return [path]


# ---------------------------------------------------------------------------
# coded link (BER / spectral efficiency)


def link_frames(cfg: WaveformConfig, scheme: str, alpha: float, snr_db: float,
                n_frames: int, seed: int, point: int,
                pilot_mask: np.ndarray | None = None) -> tuple[int, int, np.ndarray]:
    """Run coded frames end to end; returns (bits, errors, per-frame error counts).

    The five-tap power-delay profile with per-frame random tap phases sits
    between transmitter and receiver; equalization and chirp cancellation use
    exact channel knowledge.
    """
    plan = full_band_plan(cfg, "symbol")
    n_re = cfg.n_symbols * cfg.n_subcarriers
    if pilot_mask is not None:
        data_mask = ~pilot_mask
    else:
        data_mask = np.ones((cfg.n_symbols, cfg.n_subcarriers), dtype=bool)
    n_data = int(data_mask.sum())
    n_info = n_data - 6
    pilot_rng = trial_rng(seed, 999_983, point)
    pilot_syms = qpsk_map(pilot_rng.integers(0, 2, 2 * (n_re - n_data)))

    tx_bits = np.empty((n_frames, n_info), dtype=np.int8)
    hard = np.empty((n_frames, 2 * (n_info + 6)), dtype=np.int8)
    for t in range(n_frames):
        rng = trial_rng(seed, _scheme_tag(scheme), point, t)
        bits = rng.integers(0, 2, n_info).astype(np.int8)
        tx_bits[t] = bits
        coded = conv_encode(bits)
        grid_syms = np.zeros((cfg.n_symbols, cfg.n_subcarriers), dtype=np.complex128)
        grid_syms[data_mask] = qpsk_map(coded)
        if pilot_mask is not None:
            grid_syms[pilot_mask] = pilot_syms
        grid = ResourceGrid(grid_syms, data_mask)

        ch = multipath_profile(rng=rng)
        csi = genie_csi(ch, cfg)
        if scheme == "aac":
            tx = _build_tx(grid, plan, cfg, scheme, alpha)
            chirp_rx = apply_channel(generate_chirp(plan, cfg), ch, cfg)
        else:
            tx = _build_tx(grid, plan, cfg, scheme, alpha)
            chirp_rx = None
        rx = apply_channel(tx, ch, cfg)
        if not math.isinf(snr_db):
            rx = add_awgn(rx, snr_db, _child_seed(rng), signal_power=_useful_power(rx, cfg))
        got = receive_frame(rx, cfg, scheme, plan=plan, alpha=alpha, csi=csi,
                            chirp_through_channel=chirp_rx)
        hard[t] = qpsk_demap(got.symbols[data_mask])
    decoded = viterbi_decode_batch(hard)
    frame_errors = (decoded != tx_bits).sum(axis=1)
    return n_frames * n_info, int(frame_errors.sum()), frame_errors


def _useful_power(x: TimeSignal, cfg: WaveformConfig) -> float:
    use = x.samples.reshape(cfg.n_symbols, cfg.symbol_samples)[:, cfg.cp_samples:]
    return float(np.mean(np.abs(use) ** 2))


def _build_tx(grid: ResourceGrid, plan: ChirpPlan, cfg: WaveformConfig,
              scheme: str, alpha: float) -> TimeSignal:
    from .waveform import build_frame

    if scheme == "ofdm":
        return build_frame(grid, None, cfg, "ofdm")
    return build_frame(grid, plan, cfg, scheme, alpha=alpha)


def _run_ber(conf: dict, out_dir: Path, workers: int):
    cfg = waveform_from_config(conf)
    rows = []
    for scheme in conf["schemes"]:
        alphas = conf["alphas"] if scheme == "aac" else [0.0]
        for alpha in alphas:
            for point, ebn0 in enumerate(conf["ebn0_grid_db"]):
                snr = ebn0_to_snr_db(ebn0)
                bits, errors, _ = link_frames(cfg, scheme, alpha, snr,
                                              conf["trials"], conf["seed"], point)
                rows.append([scheme, alpha, ebn0, bits, errors, errors / bits])
    path = out_dir / "ber.csv"
    _write_csv(path, ["scheme", "alpha", "ebn0_db", "bits", "bit_errors", "ber"], rows)
    return [path]


def _run_spectral_efficiency(conf: dict, out_dir: Path, workers: int):
    cfg = waveform_from_config(conf)
    from .waveform import comb_pilot_mask

    frac = conf["pilot_fraction"]
    comb = int(round(1.0 / frac)) if frac > 0 else 0
    rows = []
    for scheme in conf["schemes"]:
        alphas = conf["alphas"] if scheme == "aac" else [0.0]
        pilot_mask = None
        data_fraction = 1.0
        if scheme in ("ofdm", "cm") and comb:
            pilot_mask = comb_pilot_mask(cfg, comb=comb)
            data_fraction = 1.0 - pilot_mask.mean()
        for alpha in alphas:
            for point, ebn0 in enumerate(conf["ebn0_grid_db"]):
                snr = ebn0_to_snr_db(ebn0, active_fraction=data_fraction)
                _, _, frame_errors = link_frames(cfg, scheme, alpha, snr, conf["trials"],
                                                 conf["seed"], point, pilot_mask=pilot_mask)
                ok = (frame_errors == 0).mean()
                se = 2 * 0.5 * data_fraction * ok
                rows.append([scheme, alpha, 1.0 - data_fraction, ebn0, conf["trials"], se])
    path = out_dir / "spectral_efficiency.csv"
    _write_csv(path, ["scheme", "alpha", "pilot_fraction", "ebn0_db", "trials",
                      "se_bits_per_s_per_hz"], rows)
    return [path]


# ---------------------------------------------------------------------------
# sensing pipelines (range / velocity)


def _sensing_plan(cfg: WaveformConfig, placement: str) -> ChirpPlan:
    return full_band_plan(cfg, "slot" if placement == "slot" else "symbol")


def _sensing_tx_and_template(cfg: WaveformConfig, scheme: str, alpha: float,
                             plan: ChirpPlan, grid: ResourceGrid,
                             pilot_fraction: float):
    """Transmit frame and the receiver's reference for one sensing trial.

    chirp: pure chirp transmitted, chirp reference.  aac: additive frame,
    chirp-only reference (no payload knowledge needed).  cm: multiplicative
    frame, full-frame reference.  ofdm: plain frame, reference built from the
    known fraction of subcarriers (1.0 means fully known).
    """
    from .waveform import build_frame, comb_pilot_mask

    if scheme == "chirp":
        chirp = generate_chirp(plan, cfg)
        return chirp, chirp
    if scheme == "aac":
        tx = build_frame(grid, plan, cfg, "aac", alpha=alpha)
        return tx, generate_chirp(plan, cfg)
    if scheme == "cm":
        tx = build_frame(grid, plan, cfg, "cm")
        return tx, tx
    if scheme == "ofdm":
        tx = build_frame(grid, None, cfg, "ofdm")
        if pilot_fraction >= 1.0:
            return tx, tx
        comb = int(round(1.0 / pilot_fraction))
        known = comb_pilot_mask(cfg, comb=comb)
        ref_syms = np.where(known, grid.symbols, 0.0)
        return tx, ofdm_modulate(_grid_unchecked(ref_syms, known), cfg)
    raise InvalidInput(f"unknown sensing scheme {scheme!r}")


def _grid_unchecked(symbols, mask) -> ResourceGrid:
    g = object.__new__(ResourceGrid)
    object.__setattr__(g, "symbols", np.asarray(symbols, dtype=np.complex128))
    object.__setattr__(g, "data_mask", np.asarray(mask, dtype=bool))
    return g


def range_trial(cfg: WaveformConfig, scheme: str, alpha: float, placement: str,
                target_range_m: float, target_velocity_mps: float, snr_db: float,
                rng: np.random.Generator, pilot_fraction: float = 1.0,
                max_range_bins: int = 1024,
                timing_drift_s: float = 0.0, cfo_hz: float = 0.0) -> tuple[float, float]:
    """One Monte Carlo range estimate; returns (estimate_m, truth_m)."""
    plan = _sensing_plan(cfg, placement)
    grid = random_qpsk_grid(cfg, rng)
    tx, template = _sensing_tx_and_template(cfg, scheme, alpha, plan, grid, pilot_fraction)
    fs = cfg.sample_rate_hz
    delay = 2.0 * target_range_m / C_LIGHT * fs
    doppler = 2.0 * target_velocity_mps / cfg.wavelength_m
    ch = single_target(delay, doppler_hz=doppler, snr_db=snr_db,
                       seed=_child_seed(rng), cfo_hz=cfo_hz, timing_drift_s=timing_drift_s)
    from .channel import propagate

    rx = propagate(tx, ch, cfg)
    if placement == "slot":
        profiles = matched_filter_slot(rx, template, cfg, max_lag=max_range_bins)
        prof = noncoherent_sum(profiles) if len(profiles) > 1 else profiles[0]
    else:
        profiles = matched_filter(rx, template, cfg)
        profiles = [_truncate(p, max_range_bins) for p in profiles]
        prof = noncoherent_sum(profiles)
    return estimate_range(prof, fs), target_range_m


def _truncate(profile, max_bins):
    from .sensing import RangeProfile

    k = min(max_bins, profile.correlation.size)
    return RangeProfile(profile.correlation[:k], profile.lag_axis_s[:k], profile.symbol_index)


def velocity_trial(cfg: WaveformConfig, scheme: str, alpha: float, n_slots: int,
                   target_range_m: float, target_velocity_mps: float, snr_db: float,
                   rng: np.random.Generator, pilot_fraction: float = 1.0,
                   max_range_bins: int = 1024, cfo_hz: float = 0.0) -> tuple[float, float]:
    """One Monte Carlo velocity estimate over an n_slots coherent interval.

    Chirp-referenced schemes (chirp, aac) compress each slot coherently and
    read one peak sample per slot; payload-referenced schemes (ofdm, cm) read
    one peak sample per symbol.  Phases are unwrapped, differenced, and
    averaged at the respective slow-time spacing.
    """
    frame_cfg = replace_symbols(cfg, n_slots * SLOT_SYMBOLS)
    slot_scheme = scheme in ("chirp", "aac")
    plan = _sensing_plan(frame_cfg, "slot" if slot_scheme else "symbol")
    grid = random_qpsk_grid(frame_cfg, rng)
    tx, template = _sensing_tx_and_template(frame_cfg, scheme, alpha, plan, grid,
                                            pilot_fraction)
    fs = frame_cfg.sample_rate_hz
    delay = 2.0 * target_range_m / C_LIGHT * fs
    doppler = 2.0 * target_velocity_mps / frame_cfg.wavelength_m
    ch = single_target(delay, doppler_hz=doppler, snr_db=snr_db,
                       seed=_child_seed(rng), cfo_hz=cfo_hz)
    from .channel import propagate

    rx = propagate(tx, ch, frame_cfg)
    if slot_scheme:
        profiles = matched_filter_slot(rx, template, frame_cfg, max_lag=max_range_bins)
        spacing = SLOT_SYMBOLS * frame_cfg.symbol_duration_s
    else:
        profiles = [_truncate(p, max_range_bins)
                    for p in matched_filter(rx, template, frame_cfg)]
        spacing = frame_cfg.symbol_duration_s
    bin_idx, _ = peak_bin(noncoherent_sum(profiles))
    z = np.array([p.correlation[bin_idx] for p in profiles])
    est = estimate_velocity(z, frame_cfg, sample_spacing_s=spacing)
    return est, target_velocity_mps


def _range_point_trial(t: int, conf: dict, scheme: str, alpha: float,
                       placement: str, snr: float, point: int):
    cfg = waveform_from_config(conf)
    rng = trial_rng(conf["seed"], point, t)
    return range_trial(cfg, scheme, alpha, placement, conf["target_range_m"],
                       conf["target_velocity_mps"], snr, rng,
                       pilot_fraction=conf["pilot_fraction"],
                       max_range_bins=conf["max_range_bins"])


def _velocity_point_trial(t: int, conf: dict, scheme: str, alpha: float,
                          snr: float, point: int):
    cfg = waveform_from_config(conf)
    rng = trial_rng(conf["seed"], point, t)
    return velocity_trial(cfg, scheme, alpha, conf["n_slots"], conf["target_range_m"],
                          conf["target_velocity_mps"], snr, rng,
                          pilot_fraction=conf["pilot_fraction"],
                          max_range_bins=conf["max_range_bins"])


def _scheme_alphas(conf: dict, scheme: str):
    if scheme == "aac":
        return conf["alphas"]
    return [1.0] if scheme == "chirp" else [0.0]


def _run_rmse_range(conf: dict, out_dir: Path, workers: int):
    rows = []
    for scheme in conf["schemes"]:
        for alpha in _scheme_alphas(conf, scheme):
            for placement in conf["placements"]:
                for point, snr in enumerate(conf["snr_grid_db"]):
                    fn = partial(_range_point_trial, conf=conf, scheme=scheme,
                                 alpha=alpha, placement=placement, snr=snr, point=point)
                    pairs = _map_trials(fn, conf["trials"], workers)
                    rows.append([scheme, alpha, placement, snr, conf["trials"],
                                 rmse_aggregate(pairs)])
    path = out_dir / "rmse_range.csv"
    _write_csv(path, ["scheme", "alpha", "placement", "snr_db", "trials", "rmse_m"], rows)
    return [path]


def _run_rmse_velocity(conf: dict, out_dir: Path, workers: int):
    rows = []
    for scheme in conf["schemes"]:
        for alpha in _scheme_alphas(conf, scheme):
            for point, snr in enumerate(conf["snr_grid_db"]):
                fn = partial(_velocity_point_trial, conf=conf, scheme=scheme,
                             alpha=alpha, snr=snr, point=point)
                pairs = _map_trials(fn, conf["trials"], workers)
                rows.append([scheme, alpha, snr, conf["trials"], rmse_aggregate(pairs)])
    path = out_dir / "rmse_velocity.csv"
    _write_csv(path, ["scheme", "alpha", "snr_db", "trials", "rmse_mps"], rows)
    return [path]


def _run_ambiguity(conf: dict, out_dir: Path, workers: int):
    cfg = waveform_from_config(conf)
    rng = trial_rng(conf["seed"], 0)
    grid = random_qpsk_grid(cfg, rng)
    k = conf["oversample"]
    fs_fine = cfg.sample_rate_hz * k
    half = conf["n_delay"] // 2
    step = max(1, (cfg.symbol_samples * k) // (4 * half))
    delays = np.arange(-half, conf["n_delay"] - half) * step / fs_fine
    span = conf["doppler_span_factor"] / cfg.symbol_duration_s
    dopplers = np.linspace(-span, span, conf["n_doppler"])
    paths = []
    for scheme in conf["schemes"]:
        alpha = conf["alphas"][0] if scheme == "aac" else None
        x = analysis_signal(grid if scheme != "chirp" else None, cfg, scheme,
                            alpha=alpha, oversample=k)
        surf = ambiguity_numeric(x, delays, dopplers)
        path = out_dir / f"ambiguity_{scheme}.csv"
        surface_to_csv(surf, path)
        paths.append(path)
    return paths


def _run_limits(conf: dict, out_dir: Path, workers: int):
    cfg = waveform_from_config(conf)
    rows = []
    for block in conf["blocks"]:
        lim = sensing_limits(block["n"], block["m"], cfg)
        rows.append([block["block"], block["n"], block["m"],
                     lim.range_resolution_m, lim.max_unambiguous_range_m,
                     lim.max_unambiguous_velocity_mps])
    path = out_dir / "limits.csv"
    _write_csv(path, ["block", "n", "m", "range_resolution_m",
                      "max_unambiguous_range_m", "max_unambiguous_velocity_mps"], rows)
    return [path]


def _run_complexity(conf: dict, out_dir: Path, workers: int):
    cfg = waveform_from_config(conf)
    rows = [
        [scheme, cfg.n_subcarriers, cfg.n_symbols,
         complexity_counts(cfg.n_subcarriers, cfg.n_symbols, scheme)]
        for scheme in conf["schemes"]
    ]
    path = out_dir / "complexity.csv"
    _write_csv(path, ["scheme", "n_subcarriers", "n_symbols", "complex_multiplications"], rows)
    return [path]


_RUNNERS = {
    "papr_ccdf": _run_papr_ccdf,
    "ber": _run_ber,
    "spectral_efficiency": _run_spectral_efficiency,
    "rmse_range": _run_rmse_range,
    "rmse_velocity": _run_rmse_velocity,
    "ambiguity": _run_ambiguity,
    "limits": _run_limits,
    "complexity": _run_complexity,
}


def run(experiment: str, config: dict | None, out_dir, seed_override: int | None = None,
        trials_override: int | None = None, workers: int = 1) -> list:
    """Resolve the config, run the experiment, write CSVs and the manifest."""
    conf = resolve_config(experiment, config)
    if seed_override is not None:
        conf["seed"] = int(seed_override)
    if trials_override is not None:
        if trials_override < 1:
            raise InvalidInput("trials must be >= 1")
        conf["trials"] = int(trials_override)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = _RUNNERS[experiment](conf, out, workers)
    manifest = {
        "experiment": experiment,
        "config": conf,
        "version": _version,
        "outputs": [p.name for p in paths],
    }
    with open(out / "run.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return paths
