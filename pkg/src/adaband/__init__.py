"""Adaptive banded difference-DP alignment toolkit with a PIM cost model."""

from .core import (
    AlignmentOutcome,
    BandEscape,
    BandPolicy,
    CigarShapeMismatch,
    CorruptTraceback,
    EditOp,
    NucleotideSequence,
    PrecisionOverflow,
    ScoringScheme,
    UnsupportedScheme,
    cigar_from_string,
    cigar_to_string,
    compute_bandwidth,
    min_bit_width,
    score_cigar,
)
from .oracle import edit_distance_full, full_dp_align, full_dp_matrices, full_dp_score
from .diffdp import (
    DiffMatrices,
    PrimedDiffMatrices,
    diff_dp_matrices,
    parallel_diff_dp_matrices,
    reconstruct_scores,
    unprime,
)
from .banded import (
    EditDistanceOutcome,
    TracebackStore,
    WavefrontState,
    banded_align,
    banded_edit_distance,
    decide_direction,
    emit_traceback_flags,
    initial_wavefront,
    steer,
    step_wavefront,
    traceback,
)
from .readsim import (
    BUILTIN_PROFILES,
    ErrorProfile,
    ReadPair,
    apply_edits,
    generate_dataset,
    get_profile,
    mutate_read,
    sample_reference,
    synthetic_genome,
)
from .pimmodel import (
    ArchConfig,
    CapacityExceeded,
    CostReport,
    UnknownPrimitive,
    Workload,
    critical_path_bits,
    dse_sweep,
    estimate_run,
    estimate_write_traffic,
    max_parallelism,
    nor_full_adder,
    op_cost,
    unoptimized_step_cost,
    wavefront_step_cost,
)

__version__ = "0.1.0"
