from .basic import BasicGenConfig, BasicSequenceGenerator, gen_basic_sequence, gen_lgt_sequence, opt_certificate
from .combine import Mode, combine_subchunks, realized_remaining
from .martingale import martingale_stats
from .phases import binary_deltas, offline_phase_heuristic, phase_length
from .refined import (
    GeneratorExhaustedError,
    RefinedGenerator,
    RefinedParams,
    RolloutEstimator,
    Snapshot,
    check_chunked_seq,
    gen_refined_chunks,
    gen_subchunks,
)
from .universal import (
    Case,
    UniversalDraw,
    UniversalPlan,
    case_dichotomy,
    coupon_collector_ratio,
    draw_universal,
    draws_to_sequence,
    harmonic,
    lift_to,
    sample_universal,
    select_subspace,
    uniform_plan,
)
