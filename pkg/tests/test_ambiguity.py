import numpy as np
import pytest
from scipy.integrate import quad

from isacsim import (
    AmbiguitySurface,
    InvalidInput,
    WaveformConfig,
    aac_ambiguity_analytic,
    ambiguity_numeric,
    analysis_signal,
    cm_ambiguity_analytic,
    fresnel,
    mainlobe_width,
    overlap_window,
    random_qpsk_grid,
    surface_to_csv,
)
from isacsim.ambiguity import default_sweep_rate


def af_cfg(n=32, m=1, cp=2):
    return WaveformConfig(n_subcarriers=n, subcarrier_spacing_hz=120e3,
                          cp_samples=cp, n_symbols=m, alpha=0.5)


# --- Fresnel integrals --------------------------------------------------------


def quadrature_fresnel(x):
    c, _ = quad(lambda t: np.cos(np.pi * t * t / 2), 0, x, limit=200)
    s, _ = quad(lambda t: np.sin(np.pi * t * t / 2), 0, x, limit=200)
    return c, s


def test_fresnel_zero():
    assert fresnel(0.0) == (0.0, 0.0)


def test_fresnel_at_one_against_quadrature():
    c, s = fresnel(1.0)
    cq, sq = quadrature_fresnel(1.0)
    assert c == pytest.approx(cq, abs=1e-9)
    assert s == pytest.approx(sq, abs=1e-9)
    assert c == pytest.approx(0.779893, abs=1e-6)
    assert s == pytest.approx(0.438259, abs=1e-6)


def test_fresnel_quadrature_sweep():
    for x in (-5.5, -2.0, 0.3, 1.7, 4.2, 6.0):
        c, s = fresnel(x)
        cq, sq = quadrature_fresnel(x)
        assert c == pytest.approx(cq, abs=1e-9)
        assert s == pytest.approx(sq, abs=1e-9)


def test_fresnel_odd_symmetry_exact():
    xs = np.linspace(0, 6, 601)
    cp, sp = fresnel(xs)
    cn, sn = fresnel(-xs)
    np.testing.assert_allclose(cn, -cp, atol=1e-12)
    np.testing.assert_allclose(sn, -sp, atol=1e-12)


# --- overlap windows -----------------------------------------------------------


def test_overlap_same_symbol_zero_delay():
    w = overlap_window(0, 0, 0.0, 10.0)
    assert (w.t_d, w.t_a, w.empty) == (5.0, 5.0, False)


def test_overlap_same_symbol_half_delay():
    w = overlap_window(0, 0, 5.0, 10.0)
    assert w.t_d == pytest.approx(2.5)
    assert w.t_a == pytest.approx(7.5)


def test_overlap_two_symbols_apart_is_empty():
    assert overlap_window(0, 2, 0.0, 10.0).empty


def test_overlap_boundary_and_full_overlap():
    full = overlap_window(0, 1, -10.0, 10.0)  # next symbol pulled fully onto this one
    assert not full.empty and full.t_d == pytest.approx(5.0)
    edge = overlap_window(0, 1, 0.0, 10.0)  # shift exactly +T_o: zero-length touch
    assert not edge.empty and edge.t_d == pytest.approx(0.0)
    assert overlap_window(0, 1, 0.1, 10.0).empty


def test_overlap_shifted_pair_matches_brute_force():
    t_o = 7.0
    for m, mp, tau in [(0, 1, -3.0), (1, 0, 2.5), (2, 2, 6.9), (0, 1, 8.0)]:
        lo = max(m * t_o, tau + mp * t_o)
        hi = min((m + 1) * t_o, tau + (mp + 1) * t_o)
        w = overlap_window(m, mp, tau, t_o)
        if hi <= lo:
            assert w.empty
        else:
            assert w.t_d == pytest.approx((hi - lo) / 2)
            assert w.t_a == pytest.approx((hi + lo) / 2)


# --- numeric surface ------------------------------------------------------------


def test_numeric_peak_at_origin_and_normalization():
    cfg = af_cfg()
    grid = random_qpsk_grid(cfg, np.random.default_rng(0))
    x = analysis_signal(grid, cfg, "ofdm", oversample=16)
    delays = np.arange(-8, 9) / cfg.sample_rate_hz
    dopplers = np.linspace(-1e5, 1e5, 9)
    surf = ambiguity_numeric(x, delays, dopplers)
    mag = surf.magnitude
    assert mag.max() == pytest.approx(1.0)
    k, j = np.unravel_index(np.argmax(mag), mag.shape)
    assert delays[k] == 0.0
    assert dopplers[j] == pytest.approx(0.0)
    # chi(0,0) equals the signal energy before normalization
    energy = np.sum(np.abs(x.samples) ** 2) / x.sample_rate_hz
    assert abs(surf.values[k, j]) == pytest.approx(energy, rel=1e-12)


def test_numeric_conjugate_symmetry():
    cfg = af_cfg()
    grid = random_qpsk_grid(cfg, np.random.default_rng(1))
    x = analysis_signal(grid, cfg, "aac", alpha=0.5, oversample=16)
    fs = x.sample_rate_hz
    delays = np.array([-40, -17, 0, 17, 40]) / fs
    dopplers = np.array([-9e4, -3e4, 0.0, 3e4, 9e4])
    surf = ambiguity_numeric(x, delays, dopplers)
    mag = np.abs(surf.values)
    np.testing.assert_allclose(mag, mag[::-1, ::-1], rtol=1e-9, atol=1e-12)


def test_numeric_rejects_off_grid_and_oversize_axes():
    cfg = af_cfg()
    grid = random_qpsk_grid(cfg, np.random.default_rng(2))
    x = analysis_signal(grid, cfg, "ofdm", oversample=4)
    with pytest.raises(InvalidInput):
        ambiguity_numeric(x, [0.37 / x.sample_rate_hz], [0.0])
    with pytest.raises(InvalidInput):
        ambiguity_numeric(x, [x.duration_s() * 2], [0.0])
    with pytest.raises(InvalidInput):
        ambiguity_numeric(x, [0.0], [x.sample_rate_hz])


# --- analytic forms against the numeric oracle ---------------------------------


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_additive_closed_form_matches_oracle(alpha):
    cfg = af_cfg()
    grid = random_qpsk_grid(cfg, np.random.default_rng(42))
    beta = default_sweep_rate(cfg)
    fs = cfg.sample_rate_hz
    delays = np.arange(-16, 17, 2) / fs
    dopplers = np.linspace(-2 / cfg.symbol_duration_s, 2 / cfg.symbol_duration_s, 17)
    x = analysis_signal(grid, cfg, "aac", alpha=alpha, beta=beta, oversample=512)
    num = ambiguity_numeric(x, delays, dopplers)
    ana = aac_ambiguity_analytic(grid, cfg, alpha, delays, dopplers, beta=beta)
    err = np.max(np.abs(ana - num.values)) / np.max(np.abs(num.values))
    assert err < 1e-4


def test_additive_alpha_zero_matches_plain_multicarrier_tightly():
    cfg = af_cfg()
    grid = random_qpsk_grid(cfg, np.random.default_rng(43))
    fs = cfg.sample_rate_hz
    delays = np.arange(-12, 13, 3) / fs
    dopplers = np.linspace(-1.5 / cfg.symbol_duration_s, 1.5 / cfg.symbol_duration_s, 11)
    x = analysis_signal(grid, cfg, "aac", alpha=0.0, oversample=2048)
    num = ambiguity_numeric(x, delays, dopplers)
    ana = aac_ambiguity_analytic(grid, cfg, 0.0, delays, dopplers)
    err = np.max(np.abs(ana - num.values)) / np.max(np.abs(num.values))
    assert err < 1e-6


def test_multiplicative_closed_form_matches_oracle():
    cfg = af_cfg()
    grid = random_qpsk_grid(cfg, np.random.default_rng(44))
    beta = default_sweep_rate(cfg)
    fs = cfg.sample_rate_hz
    delays = np.arange(-16, 17, 2) / fs
    dopplers = np.linspace(-2 / cfg.symbol_duration_s, 2 / cfg.symbol_duration_s, 17)
    x = analysis_signal(grid, cfg, "cm", beta=beta, oversample=512)
    num = ambiguity_numeric(x, delays, dopplers)
    ana = cm_ambiguity_analytic(grid, cfg, delays, dopplers, beta=beta)
    err = np.max(np.abs(ana - num.values)) / np.max(np.abs(num.values))
    assert err < 1e-4


def test_two_symbol_closed_forms_cover_cross_symbol_overlaps():
    cfg = af_cfg(n=16, m=2, cp=1)
    grid = random_qpsk_grid(cfg, np.random.default_rng(45))
    beta = default_sweep_rate(cfg)
    fs = cfg.sample_rate_hz
    t_o = cfg.symbol_duration_s
    sym = cfg.symbol_samples
    delays = np.array([-sym - 3, -sym // 2, -2, 0, 5, sym // 2, sym + 4]) / fs
    dopplers = np.linspace(-1.3 / t_o, 1.3 / t_o, 9)
    for scheme, alpha in (("aac", 0.5), ("cm", None)):
        x = analysis_signal(grid, cfg, scheme, alpha=alpha, beta=beta, oversample=512)
        num = ambiguity_numeric(x, delays, dopplers)
        if scheme == "aac":
            ana = aac_ambiguity_analytic(grid, cfg, 0.5, delays, dopplers, beta=beta)
        else:
            ana = cm_ambiguity_analytic(grid, cfg, delays, dopplers, beta=beta)
        err = np.max(np.abs(ana - num.values)) / np.max(np.abs(num.values))
        assert err < 1e-4, scheme


def test_multiplicative_with_zero_rate_reduces_to_plain_form():
    cfg = af_cfg(n=16)
    grid = random_qpsk_grid(cfg, np.random.default_rng(46))
    delays = np.arange(-6, 7, 2) / cfg.sample_rate_hz
    dopplers = np.linspace(-1e5, 1e5, 7)
    cm0 = cm_ambiguity_analytic(grid, cfg, delays, dopplers, beta=0.0)
    plain = aac_ambiguity_analytic(grid, cfg, 0.0, delays, dopplers)
    np.testing.assert_allclose(cm0, plain, rtol=1e-12, atol=1e-15)


def test_chirp_only_form_peaks_at_origin_with_signal_energy():
    cfg = af_cfg()
    grid = random_qpsk_grid(cfg, np.random.default_rng(47))
    val = aac_ambiguity_analytic(grid, cfg, 1.0, [0.0], [0.0])
    # unit-power chirp over the frame: energy = M * T_o
    assert abs(val[0, 0]) == pytest.approx(cfg.n_symbols * cfg.symbol_duration_s, rel=1e-9)


def test_chirp_ridge_follows_delay_doppler_coupling():
    """Constant-Doppler cuts of the chirp surface peak within one delay bin of
    tau = -f_d / beta."""
    cfg = af_cfg(n=64, cp=4)
    beta = default_sweep_rate(cfg)
    x = analysis_signal(None, cfg, "chirp", beta=beta, oversample=64)
    fs_fine = x.sample_rate_hz
    delays = np.arange(-40 * 64, 40 * 64 + 1, 32) / fs_fine
    dopplers = np.linspace(-0.8 / cfg.symbol_duration_s, 0.8 / cfg.symbol_duration_s, 7)
    surf = ambiguity_numeric(x, delays, dopplers)
    step = delays[1] - delays[0]
    for j, fd in enumerate(dopplers):
        k = int(np.argmax(np.abs(surf.values[:, j])))
        assert abs(delays[k] - (-fd / beta)) <= 2 * step


# --- width measurement and export ------------------------------------------------


def test_mainlobe_width_of_discrete_delta_is_subgrid():
    from isacsim import TimeSignal

    x = TimeSignal(np.concatenate([[1.0], np.zeros(63)]), 1e6)
    delays = np.arange(-5, 6) / 1e6
    surf = ambiguity_numeric(x, delays, [0.0])
    w = mainlobe_width(surf, "zero_doppler")
    assert 0 < w <= 1.0 / 1e6  # interpolated crossing inside one grid bin


def test_mainlobe_width_matches_sinc_theory_for_chirp():
    cfg = af_cfg(n=64, cp=4)
    beta = default_sweep_rate(cfg)
    x = analysis_signal(None, cfg, "chirp", beta=beta, oversample=64)
    fs_fine = x.sample_rate_hz
    delays = np.arange(-4 * 64, 4 * 64 + 1) / fs_fine
    surf = ambiguity_numeric(x, delays, [0.0])
    w = mainlobe_width(surf, "zero_doppler")
    # half-power width of sinc(pi*B*tau) is 0.886/B for a full-band sweep
    expect = 0.886 / (cfg.n_subcarriers * cfg.subcarrier_spacing_hz)
    assert w == pytest.approx(expect, rel=0.05)


def test_mainlobe_width_requires_crossing_inside_axis():
    cfg = af_cfg()
    grid = random_qpsk_grid(cfg, np.random.default_rng(48))
    x = analysis_signal(grid, cfg, "ofdm", oversample=8)
    delays = np.array([0.0, 1.0 / x.sample_rate_hz])  # far too short an axis
    surf = ambiguity_numeric(x, delays, [0.0])
    with pytest.raises(InvalidInput):
        mainlobe_width(surf, "zero_doppler")
    with pytest.raises(InvalidInput):
        mainlobe_width(surf, "sideways")


def test_surface_csv_roundtrip(tmp_path):
    cfg = af_cfg(n=8, cp=0)
    grid = random_qpsk_grid(cfg, np.random.default_rng(49))
    x = analysis_signal(grid, cfg, "ofdm", oversample=4)
    delays = np.arange(-2, 3) / cfg.sample_rate_hz
    surf = ambiguity_numeric(x, delays, np.array([-1e4, 0.0, 1e4]))
    path = tmp_path / "surf.csv"
    surface_to_csv(surf, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "delay_s,doppler_hz,magnitude"
    assert len(rows) == 1 + 5 * 3
    got = np.array([float(r.split(",")[2]) for r in rows[1:]]).reshape(5, 3)
    np.testing.assert_allclose(got, surf.magnitude, atol=1e-9)
