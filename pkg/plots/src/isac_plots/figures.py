"""Figure registry and renderers.

Each figure id maps to one input CSV (by name, inside the input directory), a
required column set, and a renderer.  Log-scale y axes for CCDF, BER, and
RMSE; linear for spectral efficiency; surface-plus-contour pairs for the
delay-Doppler magnitude maps.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


class SchemaError(ValueError):
    """The input CSV does not match the documented schema."""


def _load_csv(path: Path, required: tuple) -> dict:
    if not path.exists():
        raise SchemaError(f"{path}: input CSV not found")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise SchemaError(f"{path.name}: missing required column {col!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path.name}: no data rows")
    out = {col: [] for col in header}
    for row in rows:
        for col in header:
            out[col].append(row[col])
    for col in header:
        try:
            out[col] = np.array([float(v) for v in out[col]])
        except ValueError:
            out[col] = np.array(out[col])
    return out


def _series(data: dict, keys: tuple):
    """Group rows by the tuple of the given key columns, preserving order."""
    tags = list(zip(*(data[k] for k in keys))) if keys else [()] * len(next(iter(data.values())))
    seen = []
    for tag in tags:
        if tag not in seen:
            seen.append(tag)
    for tag in seen:
        idx = np.array([t == tag for t in tags])
        yield tag, idx


def _label(tag, keys):
    parts = []
    for key, val in zip(keys, tag):
        if key == "scheme":
            parts.append(str(val))
        elif key == "alpha":
            if isinstance(val, float) and val > 0:
                parts.append(f"a={val:g}")
        else:
            parts.append(f"{key}={val:g}")
    return " ".join(parts) if parts else "all"


def _line_figure(data: dict, x_col: str, y_col: str, group: tuple,
                 x_label: str, y_label: str, title: str, logy: bool,
                 row_filter=None):
    fig, ax = plt.subplots(figsize=(7, 5))
    for tag, idx in _series(data, group):
        if row_filter is not None:
            idx = idx & row_filter(data)
            if not idx.any():
                continue
        x = data[x_col][idx]
        y = data[y_col][idx]
        order = np.argsort(x)
        if logy:
            y = np.maximum(y, np.finfo(float).tiny)
            ax.semilogy(x[order], y[order], marker="o", ms=3, label=_label(tag, group))
        else:
            ax.plot(x[order], y[order], marker="o", ms=3, label=_label(tag, group))
    if not ax.lines:
        raise SchemaError(f"no rows matched the {title!r} selection")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _fig_papr(data):
    return _line_figure(data, "papr_db", "ccdf", ("scheme", "alpha"),
                        "PAPR threshold (dB)", "Pr(PAPR > threshold)",
                        "PAPR CCDF", logy=True)


def _fig_ber(data):
    return _line_figure(data, "ebn0_db", "ber", ("scheme", "alpha"),
                        "Eb/N0 (dB)", "bit error rate", "Coded BER", logy=True)


def _fig_se(data):
    return _line_figure(data, "ebn0_db", "se_bits_per_s_per_hz", ("scheme", "alpha"),
                        "Eb/N0 (dB)", "spectral efficiency (bits/s/Hz)",
                        "Spectral efficiency", logy=False)


def _placement_filter(placement):
    def inner(data):
        if "placement" not in data:
            raise SchemaError("missing required column 'placement'")
        return data["placement"] == placement
    return inner


def _fig_rmse_range(placement):
    def build(data):
        return _line_figure(data, "snr_db", "rmse_m", ("scheme", "alpha"),
                            "SNR (dB)", "range RMSE (m)",
                            f"Range RMSE, {placement}-level processing", logy=True,
                            row_filter=_placement_filter(placement))
    return build


def _fig_rmse_velocity(group):
    def build(data):
        return _line_figure(data, "snr_db", "rmse_mps", group,
                            "SNR (dB)", "velocity RMSE (m/s)",
                            "Velocity RMSE", logy=True)
    return build


def _fig_ambiguity(data):
    delays = np.unique(data["delay_s"])
    dopplers = np.unique(data["doppler_hz"])
    mag = np.full((delays.size, dopplers.size), np.nan)
    d_idx = np.searchsorted(delays, data["delay_s"])
    f_idx = np.searchsorted(dopplers, data["doppler_hz"])
    mag[d_idx, f_idx] = data["magnitude"]
    if np.isnan(mag).any():
        raise SchemaError("ambiguity CSV does not cover a full delay-Doppler grid")
    fig = plt.figure(figsize=(11, 4.5))
    ax3d = fig.add_subplot(1, 2, 1, projection="3d")
    dd, ff = np.meshgrid(delays * 1e6, dopplers, indexing="ij")
    ax3d.plot_surface(dd, ff, mag, cmap="viridis", linewidth=0, antialiased=False)
    ax3d.set_xlabel("delay (us)")
    ax3d.set_ylabel("Doppler (Hz)")
    ax3d.set_zlabel("|chi|")
    ax = fig.add_subplot(1, 2, 2)
    cs = ax.contourf(dd, ff, mag, levels=16, cmap="viridis")
    fig.colorbar(cs, ax=ax, label="|chi|")
    ax.set_xlabel("delay (us)")
    ax.set_ylabel("Doppler (Hz)")
    ax.set_title("normalized ambiguity")
    fig.tight_layout()
    return fig


FIGURES = {
    6: ("papr_ccdf.csv", ("scheme", "alpha", "papr_db", "ccdf"), _fig_papr),
    7: ("ber.csv", ("scheme", "alpha", "ebn0_db", "ber"), _fig_ber),
    8: ("spectral_efficiency.csv",
        ("scheme", "alpha", "ebn0_db", "se_bits_per_s_per_hz"), _fig_se),
    9: ("rmse_range.csv",
        ("scheme", "alpha", "placement", "snr_db", "rmse_m"),
        _fig_rmse_range("symbol")),
    10: ("rmse_range.csv",
         ("scheme", "alpha", "placement", "snr_db", "rmse_m"),
         _fig_rmse_range("slot")),
    11: ("rmse_velocity.csv",
         ("scheme", "alpha", "snr_db", "rmse_mps"),
         _fig_rmse_velocity(("scheme",))),
    12: ("rmse_velocity.csv",
         ("scheme", "alpha", "snr_db", "rmse_mps"),
         _fig_rmse_velocity(("scheme", "alpha"))),
    13: ("ambiguity_ofdm.csv", ("delay_s", "doppler_hz", "magnitude"), _fig_ambiguity),
    14: ("ambiguity_cm.csv", ("delay_s", "doppler_hz", "magnitude"), _fig_ambiguity),
    15: ("ambiguity_aac.csv", ("delay_s", "doppler_hz", "magnitude"), _fig_ambiguity),
}


def render(figure_id: int, in_dir, out_path) -> Path:
    """Render one figure id from the CSVs in ``in_dir`` to ``out_path``.

    Raises SchemaError (and writes nothing) when the input is missing, empty,
    or lacks a required column.
    """
    if figure_id not in FIGURES:
        raise SchemaError(
            f"unknown figure id {figure_id}; known ids: "
            + ", ".join(str(k) for k in sorted(FIGURES)))
    csv_name, required, builder = FIGURES[figure_id]
    data = _load_csv(Path(in_dir) / csv_name, required)
    fig = builder(data)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return out
