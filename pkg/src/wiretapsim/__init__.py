"""Wiretap-channel secrecy workbench.

Seeded Toeplitz-hash modular coding over a polar-coded QPSK AWGN wiretap
channel, framed in a 5G NR synchronization block, with Monte-Carlo
upper/lower bounds on the distinguishing error rate across beam angles and
PBCH power offsets.
"""

__version__ = "0.1.0"

from .gf2 import BitVec, CrcSpec, ToeplitzMatrix, crc_append, crc_check, toeplitz_from_seed
from .secrecy import (
    SecrecyParams,
    SecrecySeed,
    draw_randomness,
    draw_seed,
    secrecy_decode,
    secrecy_encode,
)
from .polar import (
    DecodeList,
    PolarCodeSpec,
    build_spec,
    codeword_metric,
    decode_payload,
    polar_encode,
    scl_decode,
    scl_decode_batch,
)
from .modem import ChannelSpec, SnrRecord, estimate_snr, evm, qpsk_llr, qpsk_mod, transmit
from .der import (
    DerBounds,
    MessagePair,
    bracketing_run,
    der_ml_oracle,
    estimate_der_bounds,
    lk_dependence_check,
    run_trial,
)
from .nrframe import OfdmParams, PowerProfile, SsbGrid, build_ssb, pack_pbch, pss_sync
from .scenario import (
    ArraySpec,
    LinkBudget,
    ScenarioPreset,
    array_gain,
    eve_snr,
    friis_path_loss,
    get_preset,
    sweep_plan,
)
from .harness import ExperimentConfig, cmd_der_sweep, run_der_sweep

__all__ = [
    "BitVec",
    "CrcSpec",
    "ToeplitzMatrix",
    "crc_append",
    "crc_check",
    "toeplitz_from_seed",
    "SecrecyParams",
    "SecrecySeed",
    "draw_randomness",
    "draw_seed",
    "secrecy_decode",
    "secrecy_encode",
    "DecodeList",
    "PolarCodeSpec",
    "build_spec",
    "codeword_metric",
    "decode_payload",
    "polar_encode",
    "scl_decode",
    "scl_decode_batch",
    "ChannelSpec",
    "SnrRecord",
    "estimate_snr",
    "evm",
    "qpsk_llr",
    "qpsk_mod",
    "transmit",
    "DerBounds",
    "MessagePair",
    "bracketing_run",
    "der_ml_oracle",
    "estimate_der_bounds",
    "lk_dependence_check",
    "run_trial",
    "OfdmParams",
    "PowerProfile",
    "SsbGrid",
    "build_ssb",
    "pack_pbch",
    "pss_sync",
    "ArraySpec",
    "LinkBudget",
    "ScenarioPreset",
    "array_gain",
    "eve_snr",
    "friis_path_loss",
    "get_preset",
    "sweep_plan",
    "ExperimentConfig",
    "cmd_der_sweep",
    "run_der_sweep",
]
