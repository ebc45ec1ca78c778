"""paclab: construction, encoding, decoding and analysis of PAC codes."""

from ._kernels import available_backends, use_backend
from .channel import (
    ChannelParams,
    ChannelStats,
    check_finite_complexity,
    gaussian_approximation,
    polarized_profiles,
)
from .codec import (
    CodeConfig,
    ConvPolynomial,
    RateProfile,
    conv_transform,
    hex_to_profile,
    message_extract,
    pac_encode,
    polar_transform,
    profile_to_hex,
    rate_profile_embed,
    read_profile_file,
    write_profile_file,
)
from .construct import (
    CriticalSets,
    RmPartition,
    cpscs_construct,
    ls_construct,
    ls_metric_compare,
    pscs_construct,
    rm_partition,
    rm_polar_profile,
    rm_profile,
    rm_score,
)
from .decoders import (
    DecodeResult,
    FanoConfig,
    fano_decode,
    sc_decision_llr,
    sc_decode,
    scl_decode,
)
from .sim import SimConfig, SimRecord, emit_report, run_campaign
from .spectrum import (
    WeightSpectrum,
    estimate_spectrum,
    min_weight,
    scl_survivor_pool,
    union_bound,
)

__version__ = "0.1.0"
