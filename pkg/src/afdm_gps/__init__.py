"""AFDM transceiver simulator with grouped pre-chirp selection for PAPR reduction."""

from afdm_gps.numerics import dft_unitary, idft_unitary, qam16_demap, qam16_map
from afdm_gps.modem import (
    AfdmConfig,
    PreChirpProfile,
    TimeBlock,
    add_cpp,
    afdm_demodulate,
    afdm_modulate,
    build_daft_matrix,
    compute_c1,
    remove_cpp,
)
from afdm_gps.channel import LtvChannel, PathSpec, awgn, build_heff, build_time_channel
from afdm_gps.papr import (
    CcdfCurve,
    PaprSample,
    analytic_peak_cdf,
    candidate_correlation,
    ccdf,
    oversampled_time_signal,
    papr,
)
from afdm_gps.gps import (
    GpsResult,
    enumerate_optimal,
    gps_select,
    make_groups,
    omega_values,
    side_bits_decode,
    side_bits_encode,
)
from afdm_gps.receiver import ber_count, mmse_equalize, recover_bits
from afdm_gps.baselines import OtfsGrid, ofdm_modulate, otfs_modulate

__version__ = "0.1.0"
