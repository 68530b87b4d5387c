"""Analytical performance / energy model of the in-memory aligner.

Primitive costs are bit-serial: a b-bit ADD is b serial 1-bit adds, SUB adds
a 2-cycle-per-bit invert, MAX adds a select cycle per bit on top of SUB.
Per-iteration forward cost follows the five-step update schedule; the four
delta updates run in parallel (the whole point of the shifted recurrence),
so step latency takes the longest chain while energy sums every operation.
Comparisons against the edge accumulator (one 32-bit add per iteration),
the flag equality checks and the one-hot encode run in the peripheral
circuits and are charged cycles from the config, not bit-serial cost.

All coefficients live in ArchConfig so recalibration never touches code.
Energy is in relative units (1.0 per cycle per primitive by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import BandPolicy, ScoringScheme, compute_bandwidth, min_bit_width


class UnknownPrimitive(ValueError):
    pass


class CapacityExceeded(ValueError):
    pass


# (cycles per bit, energy units per cycle)
DEFAULT_OP_COSTS = {
    "XOR": (2, 1.0),
    "ADD": (6, 1.0),
    "SUB": (8, 1.0),   # 6 add + 2 invert
    "MAX": (9, 1.0),   # SUB plus one select cycle per bit
    "COPY": (1, 1.0),  # one cycle per row written
    "WRITE_ROW": (1, 1.0),
}


@dataclass(frozen=True)
class ArchConfig:
    """Geometry, clock and per-primitive costs of the modeled accelerator."""

    tiles: int = 64
    subarray_rows: int = 1024
    subarray_cols: int = 1024
    tbms_per_tile: int = 15
    column_width: int = 128
    clock_hz: float = 5.0e8
    write_endurance: float = 1.0e12
    op_costs: dict = field(default_factory=lambda: dict(DEFAULT_OP_COSTS))
    edge_accumulator_bits: int = 32
    peripheral_op_cycles: int = 2      # CMOS-side add / compare / encode
    tb_walk_cycles_per_cell: int = 1
    tb_walk_energy_per_cell: float = 1.0
    scratch_rows: int = 3              # intermediate rows rewritten per iteration

    def __post_init__(self):
        for name in ("tiles", "subarray_rows", "subarray_cols",
                     "tbms_per_tile", "column_width"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.clock_hz <= 0 or self.write_endurance <= 0:
            raise ValueError("clock_hz and write_endurance must be positive")


@dataclass(frozen=True)
class Workload:
    """A batch of identical-shape alignment pairs."""

    pair_count: int
    reference_length: int
    query_length: int
    scheme: ScoringScheme = ScoringScheme()

    def __post_init__(self):
        if self.pair_count < 0 or self.reference_length < 1 or self.query_length < 1:
            raise ValueError("workload dimensions out of range")

    @property
    def iterations(self) -> int:
        return self.reference_length + self.query_length


@dataclass(frozen=True)
class CostReport:
    cycles: float
    latency_s: float
    energy_units: float
    reads_per_s: float
    energy_per_read: float
    cells_per_s: float
    tbm_cells_used: int
    writes_per_cell: float
    parallelism: int
    bandwidth: int
    step_cycles: float
    step_energy: float

    FIELDS = ("cycles", "latency_s", "energy_units", "reads_per_s",
              "energy_per_read", "cells_per_s", "tbm_cells_used",
              "writes_per_cell", "parallelism", "bandwidth",
              "step_cycles", "step_energy")

    def row(self):
        return [getattr(self, f) for f in self.FIELDS]


def nor_full_adder(a: int, b: int, c: int) -> tuple[int, int]:
    """1-bit full adder composed strictly from NOR gates."""
    def nor(*xs):
        return 0 if any(xs) else 1

    carry = nor(nor(a, b), nor(b, c), nor(c, a))
    x = nor(nor(a, a), nor(b, b), nor(c, c))
    y = nor(nor(a, b, c), carry)
    total = nor(nor(x, y))
    return total, carry


def op_cost(primitive: str, bits: int, config: ArchConfig | None = None
            ) -> tuple[int, float]:
    """(cycles, energy units) of one row-parallel primitive at ``bits`` width."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    config = config or ArchConfig()
    try:
        per_bit, energy_coeff = config.op_costs[primitive.upper()]
    except KeyError:
        raise UnknownPrimitive(f"unknown primitive {primitive!r}") from None
    cycles = per_bit * bits
    return cycles, cycles * energy_coeff


@dataclass(frozen=True)
class StepCost:
    """Per-iteration cost split into forward update and traceback parts."""

    forward_cycles: float
    traceback_cycles: float
    forward_energy: float
    traceback_energy: float

    @property
    def cycles(self) -> float:
        return self.forward_cycles + self.traceback_cycles

    @property
    def energy(self) -> float:
        return self.forward_energy + self.traceback_energy


def wavefront_step_cost(bits: int, config: ArchConfig | None = None) -> StepCost:
    """Cost of one banded iteration of the parallelized update schedule.

    Step inventory: base compare (2-bit XOR) plus score add; two max
    reductions for the accumulator; four accumulator copies; four
    subtractions, two additions and two max reductions for the delta
    updates (the four chains run in parallel, so latency takes the longest:
    ADD + MAX + SUB); one b-bit subtraction for the edge score plus a
    peripheral wide add; two subtractions and four peripheral equality
    checks for the traceback flags, then a peripheral one-hot encode.
    Independent of the bandwidth: all B cells update row-parallel.
    """
    config = config or ArchConfig()
    xor_c, xor_en = op_cost("XOR", 2, config)
    add_c, add_en = op_cost("ADD", bits, config)
    sub_c, sub_en = op_cost("SUB", bits, config)
    max_c, max_en = op_cost("MAX", bits, config)
    copy_c, copy_en = op_cost("COPY", bits, config)
    periph = config.peripheral_op_cycles

    fwd_cycles = (
        xor_c + add_c          # s'
        + 2 * max_c            # accumulator max
        + 4 * copy_c           # fan out A'
        + (add_c + max_c + sub_c)  # longest of the four parallel chains
    )
    fwd_energy = (
        xor_en + add_en
        + 2 * max_en
        + 4 * copy_en
        + 4 * sub_en + 2 * add_en + 2 * max_en
    )
    # edge score: b-bit subtraction in-array, wide add in the periphery
    fwd_cycles += sub_c + periph
    fwd_energy += sub_en + periph

    tb_cycles = 2 * sub_c + 4 * periph + periph  # flags + one-hot encode
    tb_energy = 2 * sub_en + 5 * periph
    return StepCost(fwd_cycles, tb_cycles, fwd_energy, tb_energy)


def unoptimized_step_cost(bits: int = 32, config: ArchConfig | None = None) -> StepCost:
    """Per-iteration cost of the absolute-score schedule, fully serial.

    Two subtractions and a max for each gap carrier, the score add, two max
    reductions for the cell score, and two in-array equality checks for the
    traceback flags.  No peripheral offload and no parallel chains.
    """
    config = config or ArchConfig()
    xor_c, xor_en = op_cost("XOR", 2, config)
    add_c, add_en = op_cost("ADD", bits, config)
    sub_c, sub_en = op_cost("SUB", bits, config)
    max_c, max_en = op_cost("MAX", bits, config)
    cmp_c, cmp_en = op_cost("XOR", bits, config)
    fwd_cycles = xor_c + add_c + 2 * (2 * sub_c + max_c) + 2 * max_c
    fwd_energy = xor_en + add_en + 2 * (2 * sub_en + max_en) + 2 * max_en
    tb_cycles = 2 * cmp_c
    tb_energy = 2 * cmp_en
    return StepCost(fwd_cycles, tb_cycles, fwd_energy, tb_energy)


CRITICAL_PATH_STAGES = {
    "full_dp": 5,
    "banded_diff": 8,
    "parallel_diff": 4,
}


def critical_path_bits(algorithm: str, bits: int) -> int:
    """Serial b-bit stages on the per-cell critical path, times the width."""
    try:
        stages = CRITICAL_PATH_STAGES[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}") from None
    return stages * bits


def max_parallelism(m: int, bandwidth: int, tbms: int,
                    config: ArchConfig | None = None) -> int:
    """Pairs one compute subarray can process at once.

    Bounded by the column segments that fit one band, and by traceback
    capacity: k <= floor(rows*cols*t / (2*m*B)).
    """
    if m < 1 or bandwidth < 1 or tbms < 1:
        raise ValueError("m, bandwidth and tbms must be >= 1")
    config = config or ArchConfig()
    by_columns = config.subarray_cols // bandwidth
    by_tbm = (config.subarray_rows * config.subarray_cols * tbms) // (2 * m * bandwidth)
    k = min(by_columns, by_tbm)
    if k < 1:
        raise CapacityExceeded(
            f"no parallelism possible: m={m}, B={bandwidth}, t={tbms}")
    return k


def estimate_run(workload: Workload, policy: BandPolicy,
                 config: ArchConfig | None = None) -> CostReport:
    """Throughput / energy estimate for a batch of alignments."""
    config = config or ArchConfig()
    m = workload.reference_length
    n = workload.query_length
    bw = compute_bandwidth(policy, max(m, n))
    bits = min_bit_width(workload.scheme)
    k = max_parallelism(m, bw, config.tbms_per_tile, config)
    tbm_cells = workload.iterations * bw * k
    tbm_capacity = config.tbms_per_tile * config.subarray_rows * config.subarray_cols
    if tbm_cells > tbm_capacity:
        raise CapacityExceeded(
            f"traceback needs {tbm_cells} cells per tile, capacity {tbm_capacity}")
    step = wavefront_step_cost(bits, config)
    iters = workload.iterations
    step_latency_s = step.cycles / config.clock_hz
    reads_per_s = config.tiles * k / (iters * step_latency_s)
    walk_energy = iters * config.tb_walk_energy_per_cell
    energy_per_read = iters * step.energy + walk_energy
    batches = math.ceil(workload.pair_count / (config.tiles * k)) if workload.pair_count else 0
    cycles = batches * iters * step.cycles
    latency_s = cycles / config.clock_hz
    writes = estimate_write_traffic(workload, config, policy)
    return CostReport(
        cycles=cycles,
        latency_s=latency_s,
        energy_units=workload.pair_count * energy_per_read,
        reads_per_s=reads_per_s,
        energy_per_read=energy_per_read,
        cells_per_s=reads_per_s * iters * bw,
        tbm_cells_used=tbm_cells,
        writes_per_cell=writes.writes_per_cell_per_alignment,
        parallelism=k,
        bandwidth=bw,
        step_cycles=step.cycles,
        step_energy=step.energy,
    )


@dataclass(frozen=True)
class WriteTraffic:
    rows_written_per_iteration: int
    total_row_writes: float
    writes_per_cell_per_alignment: float
    lifetime_alignments: float


def estimate_write_traffic(workload: Workload, config: ArchConfig | None = None,
                           policy: BandPolicy | None = None) -> WriteTraffic:
    """Endurance estimate: every iteration rewrites the computing-region rows.

    Rows per iteration cover the 2-bit sequence rows (4), the five b-bit
    value partitions and the scratch rows.  Ideal wear leveling spreads the
    writes over all subarray rows; lifetime counts alignments across all
    tiles at the workload's achievable parallelism.
    """
    config = config or ArchConfig()
    policy = policy or BandPolicy()
    bits = min_bit_width(workload.scheme)
    rows_per_iter = 4 + 5 * bits + config.scratch_rows
    iters = workload.iterations
    total_row_writes = float(workload.pair_count) * iters * rows_per_iter
    per_cell = iters * rows_per_iter / config.subarray_rows
    bw = compute_bandwidth(policy, max(workload.reference_length,
                                       workload.query_length))
    try:
        k = max_parallelism(workload.reference_length, bw,
                            config.tbms_per_tile, config)
    except CapacityExceeded:
        k = 1
    lifetime = (config.write_endurance / per_cell) * k * config.tiles
    return WriteTraffic(
        rows_written_per_iteration=rows_per_iter,
        total_row_writes=total_row_writes,
        writes_per_cell_per_alignment=per_cell,
        lifetime_alignments=lifetime,
    )


def dse_sweep(axis: str, values, workload: Workload,
              policy: BandPolicy | None = None,
              config: ArchConfig | None = None) -> list[tuple]:
    """Design-space sweep along one config axis.

    ``tbms_per_tile``: rows of (t, k); k never decreases in t and saturates
    at the column bound.  ``column_width``: rows of (width, reads/s,
    reads/s/width); the peripheral read-out of B band cells of b bits goes
    through a width-wide mux, so wider columns shorten each iteration.
    """
    values = list(values)
    if not values:
        raise ValueError("empty sweep range")
    config = config or ArchConfig()
    policy = policy or BandPolicy()
    m = workload.reference_length
    bw = compute_bandwidth(policy, max(m, workload.query_length))
    bits = min_bit_width(workload.scheme)
    rows = []
    if axis == "tbms_per_tile":
        for t in values:
            try:
                k = max_parallelism(m, bw, t, config)
            except CapacityExceeded:
                k = 0
            rows.append((t, k))
    elif axis == "column_width":
        step = wavefront_step_cost(bits, config)
        for width in values:
            readout = math.ceil(bw * bits / width) * config.peripheral_op_cycles
            cycles = step.cycles + readout
            k = max_parallelism(m, bw, config.tbms_per_tile, config)
            reads_per_s = config.tiles * k * config.clock_hz / (workload.iterations * cycles)
            rows.append((width, reads_per_s, reads_per_s / width))
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    return rows
