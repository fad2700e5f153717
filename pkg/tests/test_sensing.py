import math
import warnings

import numpy as np
import pytest

from isacsim import (
    C_LIGHT,
    InvalidInput,
    RangeProfile,
    WaveformConfig,
    build_frame,
    complexity_counts,
    estimate_range,
    estimate_velocity,
    full_band_plan,
    generate_chirp,
    matched_filter,
    matched_filter_slot,
    noncoherent_sum,
    random_qpsk_grid,
    rmse_aggregate,
    sensing_limits,
    single_target,
)
from isacsim.channel import apply_channel, apply_cfo, apply_timing_drift
from isacsim.experiments import range_trial, trial_rng, velocity_trial
from isacsim.sensing import peak_bin


def cfg_table(**kw):
    base = dict(n_subcarriers=1024, subcarrier_spacing_hz=120e3, cp_samples=70,
                n_symbols=14, carrier_hz=24e9)
    base.update(kw)
    return WaveformConfig(**base)


# --- matched filter ---------------------------------------------------------


def brute_circular_correlation(rx, tpl):
    n = rx.size
    return np.array([np.sum(rx * np.conj(np.roll(tpl, lag))) for lag in range(n)])


def test_fft_correlation_matches_direct():
    cfg = WaveformConfig(n_subcarriers=64, subcarrier_spacing_hz=120e3,
                         cp_samples=4, n_symbols=2)
    rng = np.random.default_rng(0)
    grid = random_qpsk_grid(cfg, rng)
    tx = build_frame(grid, full_band_plan(cfg, "symbol"), cfg, "aac", alpha=0.5)
    tpl = generate_chirp(full_band_plan(cfg, "symbol"), cfg)
    profiles = matched_filter(tx, tpl, cfg)
    for m, prof in enumerate(profiles):
        sl = slice(m * 68 + 4, (m + 1) * 68)
        direct = brute_circular_correlation(tx.samples[sl], tpl.samples[sl])
        scale = np.max(np.abs(direct))
        np.testing.assert_allclose(prof.correlation / scale, direct / scale, atol=1e-9)


def test_autocorrelation_peaks_at_zero_lag():
    cfg = WaveformConfig(n_subcarriers=128, subcarrier_spacing_hz=120e3,
                         cp_samples=9, n_symbols=3)
    grid = random_qpsk_grid(cfg, np.random.default_rng(1))
    tx = build_frame(grid, None, cfg, "ofdm")
    for prof in matched_filter(tx, tx, cfg):
        assert np.argmax(np.abs(prof.correlation)) == 0


def test_matched_filter_rejects_bad_template_length():
    cfg = cfg_table(n_symbols=2)
    grid = random_qpsk_grid(cfg, np.random.default_rng(2))
    tx = build_frame(grid, None, cfg, "ofdm")
    from isacsim import TimeSignal

    with pytest.raises(InvalidInput):
        matched_filter(tx, TimeSignal(np.ones(100), cfg.sample_rate_hz), cfg)


def test_range_recovery_exact_for_every_integer_delay():
    """Prefix-free frame of repeated symbol-anchored sweeps: the delayed useful
    window is an exact cyclic shift, so every bin 0..N-1 recovers exactly."""
    cfg = WaveformConfig(n_subcarriers=256, subcarrier_spacing_hz=120e3,
                         cp_samples=0, n_symbols=2)
    plan = full_band_plan(cfg, "symbol")
    chirp = generate_chirp(plan, cfg)
    fs = cfg.sample_rate_hz
    for d in range(0, 256, 7):
        rx = apply_channel(chirp, single_target(float(d)))
        prof = matched_filter(rx, chirp, cfg)[1]
        k, tied = peak_bin(prof)
        assert (k, tied) == (d, False)
        assert estimate_range(prof, fs) == pytest.approx(C_LIGHT * d / (2 * fs))


def test_target_at_50m_lands_in_bin_41():
    cfg = cfg_table(n_symbols=2)
    plan = full_band_plan(cfg, "symbol")
    grid = random_qpsk_grid(cfg, np.random.default_rng(3))
    tx = build_frame(grid, plan, cfg, "aac", alpha=0.5)
    delay = 2 * 50.0 / C_LIGHT * cfg.sample_rate_hz  # 40.96 samples
    rx = apply_channel(tx, single_target(delay))
    prof = noncoherent_sum(matched_filter(rx, generate_chirp(plan, cfg), cfg))
    k, _ = peak_bin(prof)
    assert k == 41
    assert estimate_range(prof, cfg.sample_rate_hz) == pytest.approx(50.05, abs=0.01)


def test_estimate_range_peak_bin_zero_and_tie_flagging():
    lags = np.arange(8) / 1e6
    prof = RangeProfile(np.ones(8, complex), lags, 0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = estimate_range(prof, 1e6)
    assert r == 0.0
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_estimate_range_parabolic_refinement():
    lags = np.arange(16) / 1e6
    mag = np.zeros(16)
    mag[5], mag[6], mag[7] = 0.6, 1.0, 0.6  # symmetric peak centered on 6
    prof = RangeProfile(mag.astype(complex), lags, 0)
    assert estimate_range(prof, 1e6, interpolate=True) == pytest.approx(
        C_LIGHT * 6 / (2 * 1e6))


def test_multipath_peak_selection_takes_earliest_strong_path():
    lags = np.arange(64) / 1e6
    mag = np.full(64, 0.05)
    mag[20] = 0.8   # line of sight
    mag[30] = 1.0   # stronger late echo
    prof = RangeProfile(mag.astype(complex), lags, 0)
    k, _ = peak_bin(prof, multipath=True)
    assert k == 20
    k, _ = peak_bin(prof, multipath=False)
    assert k == 30


def test_timing_drift_biases_range_by_c_dt_over_2():
    cfg = cfg_table(n_symbols=2)
    plan = full_band_plan(cfg, "symbol")
    chirp = generate_chirp(plan, cfg)
    rx = apply_channel(chirp, single_target(0.0))
    rx = apply_timing_drift(rx, 33.333e-9)
    prof = noncoherent_sum(matched_filter(rx, chirp, cfg))
    est = estimate_range(prof, cfg.sample_rate_hz)
    assert est == pytest.approx(5.0, abs=1.3)  # one bin of quantization slack


def test_drift_of_one_sample_moves_peak_one_bin():
    cfg = cfg_table(n_symbols=2)
    plan = full_band_plan(cfg, "symbol")
    chirp = generate_chirp(plan, cfg)
    base = apply_channel(chirp, single_target(5.0))
    shifted = apply_timing_drift(base, 1.0 / cfg.sample_rate_hz)
    k0, _ = peak_bin(noncoherent_sum(matched_filter(base, chirp, cfg)))
    k1, _ = peak_bin(noncoherent_sum(matched_filter(shifted, chirp, cfg)))
    assert k1 == k0 + 1


# --- velocity ----------------------------------------------------------------


def test_static_target_zero_velocity():
    cfg = cfg_table()
    z = np.ones(14, complex)
    assert estimate_velocity(z, cfg) == 0.0


def test_velocity_from_phase_slope_table_numbers():
    # 0.2690 rad per 8.92 us symbol is 4.8 kHz Doppler, 30 m/s at 24 GHz
    cfg = cfg_table()
    t_o = 8.92e-6
    z = np.exp(1j * 0.26898 * np.arange(14))
    v = estimate_velocity(z, cfg, sample_spacing_s=t_o)
    assert v == pytest.approx(30.0, rel=1e-3)


def test_velocity_aliases_beyond_half_cycle_per_symbol():
    cfg = cfg_table()
    v_max = cfg.wavelength_m / (4 * cfg.symbol_duration_s)
    fd = 2 * (1.2 * v_max) / cfg.wavelength_m
    z = np.exp(2j * np.pi * fd * np.arange(14) * cfg.symbol_duration_s)
    est = estimate_velocity(z, cfg)
    assert est < 0  # wrapped, not 1.2*v_max
    assert abs(est) <= v_max * 1.01


def test_velocity_needs_two_samples():
    cfg = cfg_table()
    with pytest.raises(InvalidInput):
        estimate_velocity(np.ones(1, complex), cfg)


def test_end_to_end_velocity_trial_noiseless():
    cfg = cfg_table()
    est, truth = velocity_trial(cfg, "chirp", 1.0, 2, 50.0, 20.0, math.inf,
                                trial_rng(3, 0, 0))
    assert est == pytest.approx(truth, abs=1e-3)


def test_cfo_biases_velocity_by_half_wavelength_rule():
    cfg = cfg_table()
    for eps in (160.0, -160.0):
        est, truth = velocity_trial(cfg, "aac", 0.5, 2, 50.0, 20.0, math.inf,
                                    trial_rng(4, 0, 0), cfo_hz=eps)
        bias = est - truth
        expect = cfg.wavelength_m / 2 * eps  # 1.000 m/s at 160 Hz, 24 GHz
        doppler_step = cfg.wavelength_m / 2 / (2 * 14 * cfg.symbol_duration_s)
        assert abs(bias - expect) < doppler_step
        assert expect == pytest.approx(math.copysign(1.0, eps), rel=1e-3)


# --- limits, complexity, rmse ---------------------------------------------------


TABLE_BLOCKS = {
    "A": (256, 1, 4.88, 669.0, 350.6),
    "B": (2, 14, 625.0, 1.20e6, 25.0),
    "C": (64, 7, 19.53, 18732.0, 50.1),
    "D": (2, 2, 625.0, 1.71e5, 175.3),
}


def test_sensing_limits_reproduce_published_blocks():
    cfg = WaveformConfig(n_subcarriers=256, subcarrier_spacing_hz=120e3,
                         cp_samples=18, carrier_hz=24e9)
    for name, (n, m, d_r, r_max, v_max) in TABLE_BLOCKS.items():
        lim = sensing_limits(n, m, cfg)
        assert lim.range_resolution_m == pytest.approx(d_r, rel=5e-3), name
        assert lim.max_unambiguous_range_m == pytest.approx(r_max, rel=5e-3), name
        assert lim.max_unambiguous_velocity_mps == pytest.approx(v_max, rel=5e-3), name


def test_sensing_limits_bounds_checked():
    cfg = WaveformConfig(n_subcarriers=256, subcarrier_spacing_hz=120e3)
    with pytest.raises(InvalidInput):
        sensing_limits(0, 1, cfg)
    with pytest.raises(InvalidInput):
        sensing_limits(512, 1, cfg)
    with pytest.raises(InvalidInput):
        sensing_limits(64, 0, cfg)


def test_complexity_counts_published_values():
    assert complexity_counts(1024, 14, "aac") == 162816
    assert complexity_counts(1024, 14, "cm") == 229376
    assert complexity_counts(1024, 14, "ofdm_prs") == 162816


def test_complexity_aac_equals_ofdm_prs_always():
    for n in (64, 256, 4096):
        for m in (1, 7, 14):
            assert complexity_counts(n, m, "aac") == complexity_counts(n, m, "ofdm_prs")


def test_complexity_rejects_non_power_of_two():
    with pytest.raises(InvalidInput):
        complexity_counts(1000, 14, "aac")


def test_rmse_aggregate_basics():
    assert rmse_aggregate([(1.0, 1.0), (2.0, 2.0)]) == 0.0
    assert rmse_aggregate([(1.0, 0.0), (-1.0, 0.0)]) == pytest.approx(1.0)
    with pytest.raises(InvalidInput):
        rmse_aggregate([])


def test_rmse_aggregate_gaussian_statistics():
    rng = np.random.default_rng(6)
    errs = rng.normal(0, 2.0, 10000)
    pairs = [(e, 0.0) for e in errs]
    assert rmse_aggregate(pairs) == pytest.approx(2.0, rel=0.05)


# --- receiver knowledge properties -----------------------------------------------


def test_aac_profile_independent_of_payload():
    """The additive scheme's range profile uses only the chirp reference; the
    payload never enters the receiver."""
    cfg = cfg_table(n_symbols=2)
    plan = full_band_plan(cfg, "symbol")
    chirp = generate_chirp(plan, cfg)
    delay = 33.0
    outs = []
    for seed in (10, 11):
        grid = random_qpsk_grid(cfg, np.random.default_rng(seed))
        tx = build_frame(grid, plan, cfg, "aac", alpha=0.5)
        rx = apply_channel(tx, single_target(delay))
        prof = noncoherent_sum(matched_filter(rx, chirp, cfg))
        k, _ = peak_bin(prof)
        outs.append(k)
    assert outs[0] == outs[1] == 33


def test_cm_wrong_payload_degrades_peak():
    cfg = WaveformConfig(n_subcarriers=256, subcarrier_spacing_hz=120e3,
                         cp_samples=18, n_symbols=2)
    plan = full_band_plan(cfg, "symbol")
    rng = np.random.default_rng(12)
    worse = 0
    trials = 100
    for _ in range(trials):
        grid = random_qpsk_grid(cfg, rng)
        tx = build_frame(grid, plan, cfg, "cm")
        rx = apply_channel(tx, single_target(20.0))
        true_peak = np.abs(matched_filter(rx, tx, cfg)[1].correlation[20])
        wrong_grid = random_qpsk_grid(cfg, rng)
        wrong_tpl = build_frame(wrong_grid, plan, cfg, "cm")
        wrong_peak = np.abs(matched_filter(rx, wrong_tpl, cfg)[1].correlation[20])
        worse += wrong_peak < true_peak
    assert worse == trials


def test_slot_processing_beats_symbol_processing_under_shared_noise():
    cfg = cfg_table()
    snrs = [-20.0, -10.0, 0.0]
    for snr in snrs:
        slot_pairs, sym_pairs = [], []
        for t in range(8):
            slot_pairs.append(range_trial(cfg, "aac", 0.5, "slot", 50.0, 0.0, snr,
                                          trial_rng(21, int(snr), t)))
            sym_pairs.append(range_trial(cfg, "aac", 0.5, "symbol", 50.0, 0.0, snr,
                                         trial_rng(21, int(snr), t)))
        assert rmse_aggregate(slot_pairs) <= rmse_aggregate(sym_pairs) + 1e-9
