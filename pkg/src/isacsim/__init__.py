"""Chirp-combined OFDM waveforms for joint sensing and communication.

Subpackages cover transmit synthesis (waveform), delay-Doppler propagation
(channel), echo processing (sensing), the data receiver and coding (comms),
ambiguity analysis (ambiguity), and the batch experiment runner (experiments,
cli).
"""

from .config import WaveformConfig, default_cp_samples
from .constants import C_LIGHT, SLOT_SYMBOLS
from .errors import InvalidInput
from .waveform import (
    ChirpPlan,
    ResourceGrid,
    TimeSignal,
    alpha_threshold,
    build_frame,
    comb_pilot_mask,
    compose_aac,
    compose_cm,
    full_band_plan,
    generate_chirp,
    ofdm_modulate,
    papr_db,
    qpsk_demap,
    qpsk_map,
    random_qpsk_grid,
)
from .channel import (
    ChannelRealization,
    PathTap,
    add_awgn,
    apply_cfo,
    apply_channel,
    apply_timing_drift,
    genie_csi,
    multipath_profile,
    propagate,
    single_target,
)
from .sensing import (
    RangeProfile,
    SensingEstimate,
    SensingLimits,
    complexity_counts,
    estimate_range,
    estimate_velocity,
    matched_filter,
    matched_filter_slot,
    noncoherent_sum,
    rmse_aggregate,
    sensing_limits,
)
from .comms import (
    CodecConfig,
    LinkResult,
    conv_encode,
    dechirp,
    ebn0_to_snr_db,
    ofdm_demodulate,
    receive_frame,
    spectral_efficiency,
    viterbi_decode,
    viterbi_decode_batch,
)
from .ambiguity import (
    AmbiguitySurface,
    OverlapWindow,
    aac_ambiguity_analytic,
    ambiguity_numeric,
    analysis_signal,
    cm_ambiguity_analytic,
    fresnel,
    mainlobe_width,
    overlap_window,
    surface_to_csv,
)

__version__ = "0.1.0"
