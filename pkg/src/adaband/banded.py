"""Adaptive banded wavefront alignment.

The engine keeps one anti-diagonal of ``B`` shifted-difference cells and
moves it Right or Down once per iteration, ``m + n`` iterations in total.
Slot ``k`` of a band with origin ``(i0, j0)`` covers grid cell
``(i0 + k, j0 - k)``; the band starts straddling the ``(0, 0)`` corner
(slot ``(B-1)//2`` on the corner) so both edges can grow into the grid.

Traceback records, per iteration: the direction bit, a 2-bit edit code per
slot (which argument won the accumulator max), and two gap-extension bits
per slot.  The extension bits stored at cell ``(i, j)`` say whether the
deletion (resp. insertion) gap ending at ``(i+1, j)`` (resp. ``(i, j+1)``)
extends rather than opens; without them an affine-optimal path cannot be
recovered from 2-bit codes alone.

A cell whose in-band dependencies were clipped is computed from pessimistic
sentinels, clamped into the legal value range and marked tainted; tainted
cells are exempt from overflow checks.  The reported score is the rescored
traceback path, which equals the forward-accumulated score whenever the
band never clipped a dependency.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .core import (
    AlignmentOutcome,
    BandEscape,
    BandPolicy,
    Cigar,
    CorruptTraceback,
    EditOp,
    PrecisionOverflow,
    ScoringScheme,
    cigar_from_ops,
    compute_bandwidth,
    encode_sequence,
    score_cigar,
)

RIGHT = "R"
DOWN = "D"


def effective_bandwidth(policy: BandPolicy, m: int, n: int) -> int:
    """Policy bandwidth for the pair, clamped to the longest anti-diagonal."""
    return min(compute_bandwidth(policy, max(m, n)), min(m, n) + 1)


@dataclass
class TracebackStore:
    """Per-iteration traceback records for one banded run.

    ``flags`` holds the 2-bit edit codes (-1 where no cell was computed),
    ``ext_e``/``ext_f`` the gap-extension bitplanes, ``origins[T]`` the band
    origin at iteration ``T`` and ``dirs[T]`` the move that reached it.
    """

    band_width: int
    flags: np.ndarray
    ext_e: np.ndarray
    ext_f: np.ndarray
    origins: np.ndarray
    dirs: np.ndarray
    capacity: int | None = None

    def __post_init__(self):
        if self.capacity is not None and self.cells_stored > self.capacity:
            raise ValueError(
                f"traceback store needs {self.cells_stored} cells, "
                f"capacity is {self.capacity}")

    @property
    def iterations(self) -> int:
        return self.flags.shape[0] - 1

    @property
    def cells_stored(self) -> int:
        return self.iterations * self.band_width

    def slot(self, i: int, j: int) -> int | None:
        t = i + j
        if t < 1 or t >= self.flags.shape[0]:
            return None
        k = i - int(self.origins[t, 0])
        if 0 <= k < self.band_width:
            return k
        return None

    def flag_at(self, i: int, j: int) -> int | None:
        k = self.slot(i, j)
        if k is None:
            return None
        f = int(self.flags[i + j, k])
        return None if f < 0 else f

    def ext_e_at(self, i: int, j: int) -> bool:
        k = self.slot(i, j)
        return bool(self.ext_e[i + j, k]) if k is not None else False

    def ext_f_at(self, i: int, j: int) -> bool:
        k = self.slot(i, j)
        return bool(self.ext_f[i + j, k]) if k is not None else False

    def direction_log(self, upto: int | None = None) -> str:
        end = self.dirs.shape[0] if upto is None else upto + 1
        return "".join(RIGHT if d else DOWN for d in self.dirs[1:end])


def traceback(store: TracebackStore, end_cell: tuple[int, int]) -> Cigar:
    """Walk the recorded flags from ``end_cell`` back to the origin.

    Maintains the gap state explicitly: a deletion run keeps moving up while
    the extension bit of the cell above is set, mirroring the oracle's
    open-on-tie convention.  If a diagonal step of a narrow-band run lands
    on a cell the band never covered, the remaining path is completed along
    the diagonal (a legal, pessimistic tail; such runs are score misses
    anyway).
    """
    i, j = end_cell
    ops: list[EditOp] = []
    state = "H"
    guard = i + j + 4
    while i > 0 or j > 0:
        guard -= 1
        if guard < 0:
            raise CorruptTraceback("walk did not terminate")
        if state == "H":
            if i == 0:
                ops.extend([EditOp.INSERTION] * j)
                break
            if j == 0:
                ops.extend([EditOp.DELETION] * i)
                break
            f = store.flag_at(i, j)
            if f is None:
                d = min(i, j)
                ops.extend([EditOp.MATCH_OR_MISMATCH] * d)
                ops.extend([EditOp.DELETION] * (i - d))
                ops.extend([EditOp.INSERTION] * (j - d))
                break
            if f == 0:
                ops.append(EditOp.MATCH_OR_MISMATCH)
                i -= 1
                j -= 1
            elif f == 1:
                state = "E"
            elif f == 2:
                state = "F"
            else:
                raise CorruptTraceback(f"flag {f} at cell ({i}, {j})")
        elif state == "E":
            ops.append(EditOp.DELETION)
            extend = i - 1 >= 1 and store.ext_e_at(i - 1, j)
            i -= 1
            state = "E" if extend else "H"
        else:
            ops.append(EditOp.INSERTION)
            extend = j - 1 >= 1 and store.ext_f_at(i, j - 1)
            j -= 1
            state = "F" if extend else "H"
    ops.reverse()
    return cigar_from_ops(ops)


@dataclass
class WavefrontState:
    """Live band for the step-level API.

    ``origin`` is the (i0, j0) of the current iteration; ``edge_lo`` /
    ``edge_hi`` are (i, j, H) for the in-grid cells at the smallest and
    largest slot (the rightmost and leftmost band cells).
    """

    reference_length: int
    query_length: int
    bandwidth: int
    origin: tuple[int, int]
    iteration: int
    a: np.ndarray
    dh: np.ndarray
    dv: np.ndarray
    de: np.ndarray
    df: np.ndarray
    valid: np.ndarray
    taint: np.ndarray
    edge_lo: tuple[int, int, int]
    edge_hi: tuple[int, int, int]
    direction_log: str = ""
    flags: np.ndarray | None = None
    ext_e: np.ndarray | None = None
    ext_f: np.ndarray | None = None
    cells_computed: int = 0

    @property
    def h_edges(self) -> tuple[int, int]:
        """(H at rightmost cell, H at leftmost cell)."""
        return self.edge_lo[2], self.edge_hi[2]


def initial_wavefront(reference: str, query: str, policy_or_bandwidth) -> WavefrontState:
    m, n = len(reference), len(query)
    if isinstance(policy_or_bandwidth, BandPolicy):
        bw = effective_bandwidth(policy_or_bandwidth, m, n)
    else:
        bw = int(policy_or_bandwidth)
    c = (bw - 1) // 2
    z = np.zeros(bw, dtype=np.int64)
    u = np.zeros(bw, dtype=np.uint8)
    return WavefrontState(
        reference_length=m, query_length=n, bandwidth=bw,
        origin=(-c, c), iteration=0,
        a=z.copy(), dh=z.copy(), dv=z.copy(), de=z.copy(), df=z.copy(),
        valid=u.copy(), taint=u.copy(),
        edge_lo=(0, 0, 0), edge_hi=(0, 0, 0))


def band_windows(reference: str, query: str, origin: tuple[int, int],
                 bandwidth: int) -> tuple[np.ndarray, np.ndarray]:
    """Base codes under each band slot; 255 marks off-grid slots."""
    i0, j0 = origin
    rw = np.full(bandwidth, 255, dtype=np.uint8)
    qw = np.full(bandwidth, 255, dtype=np.uint8)
    r = encode_sequence(reference)
    q = encode_sequence(query)
    for k in range(bandwidth):
        i = i0 + k
        j = j0 - k
        if 1 <= i <= len(reference):
            rw[k] = r[i - 1]
        if 1 <= j <= len(query):
            qw[k] = q[j - 1]
    return rw, qw


def decide_direction(state: WavefrontState, adaptive: bool = True,
                     tie_right: bool = False) -> str:
    """Next band move: Right iff the rightmost edge outscores the leftmost.

    With adaptation disabled this is the fixed schedule that tracks the main
    diagonal: strict Down/Right alternation.
    """
    if adaptive:
        h_right, h_left = state.h_edges
        if h_right > h_left:
            return RIGHT
        if h_right == h_left and tie_right:
            return RIGHT
        return DOWN
    return RIGHT if (state.iteration + 1) % 2 == 0 else DOWN


def steer(state: WavefrontState, adaptive: bool = True,
          tie_right: bool = False) -> str:
    """The engine's actual next move: decide_direction plus the corner clamps.

    When the band is at least as wide as the next anti-diagonal's in-grid
    segment, the move that keeps the segment fully covered wins; a move that
    would strand the band entirely off the grid is flipped.
    """
    d = decide_direction(state, adaptive, tie_right)
    m, n = state.reference_length, state.query_length
    bw = state.bandwidth
    i0, j0 = state.origin

    def after(direction):
        return (i0 + (0 if direction == RIGHT else 1),
                j0 + (1 if direction == RIGHT else 0))

    def covers(ni0, nj0):
        t2 = ni0 + nj0
        glo, ghi = max(0, t2 - n), min(m, t2)
        return ghi - glo < bw and ni0 <= glo and ni0 + bw - 1 >= ghi

    def nonempty(ni0, nj0):
        return max(0, -ni0, nj0 - n) <= min(bw - 1, m - ni0, nj0)

    other = RIGHT if d == DOWN else DOWN
    if not covers(*after(d)) and covers(*after(other)):
        d = other
    if not nonempty(*after(d)) and nonempty(*after(other)):
        d = other
    return d


def step_wavefront(state: WavefrontState, ref_window: np.ndarray,
                   query_window: np.ndarray, scheme: ScoringScheme,
                   direction: str | None = None) -> WavefrontState:
    """Advance the band one iteration and return the new state.

    The windows must hold the base codes under the band's *new* position
    (see :func:`band_windows`); off-grid slots are masked and emit nothing.
    """
    scheme.require_primed_safe()
    if direction is None:
        direction = decide_direction(state)
    moved_right = direction == RIGHT
    i0, j0 = state.origin
    if moved_right:
        j0 += 1
    else:
        i0 += 1
    bw = state.bandwidth
    m, n = state.reference_length, state.query_length
    A, B, o, e = scheme.as_tuple()
    cur = [np.zeros(bw, dtype=np.int64) for _ in range(5)]
    valid = np.zeros(bw, dtype=np.uint8)
    taint = np.zeros(bw, dtype=np.uint8)
    flags = np.full(bw, -1, dtype=np.int8)
    ext_e = np.zeros(bw, dtype=np.uint8)
    ext_f = np.zeros(bw, dtype=np.uint8)
    cells, ovf, _mx = _kernels.band_step(
        ref_window, query_window, i0, j0, m, n, A, B, o, e, scheme.value_cap,
        moved_right,
        state.dh, state.dv, state.de, state.df, state.valid, state.taint,
        cur[0], cur[1], cur[2], cur[3], cur[4], valid, taint,
        flags, ext_e, ext_f, True)
    if ovf >= 0:
        raise PrecisionOverflow(
            f"band slot {ovf} left the {scheme.value_cap}-capped range "
            f"at iteration {state.iteration + 1}")
    st, li, lj, lh, hi2, hj2, hh, _kmin, _kmax = _kernels.edge_update(
        i0, j0, m, n, o, e, bw, cur[1], cur[2],
        *state.edge_lo, *state.edge_hi)
    if st == _kernels.ESCAPED:
        raise BandEscape(state.iteration + 1, max(state.edge_lo[2], state.edge_hi[2]))
    if st != _kernels.OK:
        raise RuntimeError("edge tracking lost adjacency (internal bug)")
    return replace(
        state,
        origin=(i0, j0), iteration=state.iteration + 1,
        a=cur[0], dh=cur[1], dv=cur[2], de=cur[3], df=cur[4],
        valid=valid, taint=taint,
        edge_lo=(li, lj, lh), edge_hi=(hi2, hj2, hh),
        direction_log=state.direction_log + direction,
        flags=flags, ext_e=ext_e, ext_f=ext_f,
        cells_computed=state.cells_computed + int(cells))


def emit_traceback_flags(state: WavefrontState, scheme: ScoringScheme) -> np.ndarray:
    """2-bit edit codes for the band's current iteration (-1 where masked)."""
    if state.flags is None:
        raise ValueError("state holds no computed iteration yet")
    return state.flags.copy()


def banded_align(reference: str, query: str, scheme: ScoringScheme,
                 policy: BandPolicy, adaptive: bool = True,
                 tie_right: bool = False, with_traceback: bool = True,
                 capacity: int | None = None,
                 _survival_override: bool = True,
                 ) -> tuple[AlignmentOutcome, TracebackStore | None]:
    """Align a pair with the adaptive banded engine.

    Returns the outcome and, when ``with_traceback``, the populated
    traceback store.  Raises :class:`BandEscape` when cell ``(m, n)`` never
    enters the band and :class:`PrecisionOverflow` on a range violation in
    an unclipped cell.
    """
    if not reference or not query:
        raise ValueError("alignment inputs must be non-empty")
    scheme.require_primed_safe()
    m, n = len(reference), len(query)
    bw = effective_bandwidth(policy, m, n)
    total = m + n
    if with_traceback:
        flags = np.full((total + 1, bw), -1, dtype=np.int8)
        ext_e = np.zeros((total + 1, bw), dtype=np.uint8)
        ext_f = np.zeros((total + 1, bw), dtype=np.uint8)
    else:
        flags = np.full((1, 1), -1, dtype=np.int8)
        ext_e = np.zeros((1, 1), dtype=np.uint8)
        ext_f = np.zeros((1, 1), dtype=np.uint8)
    origins = np.zeros((total + 1, 2), dtype=np.int64)
    dirs = np.zeros(total + 1, dtype=np.uint8)
    h_lo = np.zeros(total + 1, dtype=np.int64)
    h_hi = np.zeros(total + 1, dtype=np.int64)
    out = np.zeros(6, dtype=np.int64)
    A, B, o, e = scheme.as_tuple()
    _kernels.banded_forward(
        encode_sequence(reference), encode_sequence(query),
        A, B, o, e, scheme.value_cap, bw,
        adaptive, tie_right, _survival_override,
        flags, ext_e, ext_f, origins, dirs, h_lo, h_hi,
        with_traceback, out)
    status, fwd, cells, max_primed, stop_iter, best_edge = (int(v) for v in out)
    if status == _kernels.ESCAPED:
        raise BandEscape(stop_iter, best_edge)
    if status == _kernels.OVERFLOWED:
        raise PrecisionOverflow(
            f"shifted value left [0, {scheme.value_cap}] at iteration {stop_iter}")
    if status != _kernels.OK:
        raise RuntimeError("edge tracking lost adjacency (internal bug)")
    direction_log = "".join(RIGHT if d else DOWN for d in dirs[1:])
    store = None
    if with_traceback:
        store = TracebackStore(
            band_width=bw, flags=flags, ext_e=ext_e, ext_f=ext_f,
            origins=origins, dirs=dirs, capacity=capacity)
        cigar = traceback(store, (m, n))
        score = score_cigar(reference, query, cigar, scheme)
    else:
        cigar = []
        score = fwd
    outcome = AlignmentOutcome(
        score=score, cigar=cigar, band_used=bw,
        direction_log=direction_log, cells_computed=cells,
        edge_score=fwd, max_primed_value=max_primed)
    return outcome, store


@dataclass
class EditDistanceOutcome:
    """Edit-distance result: true Levenshtein plus the affine unit-cost view.

    ``affine_cost`` charges the first gap base twice (open + extend), so it
    can exceed the Levenshtein distance; it is reported alongside because
    the low-precision engine path computes exactly that quantity.
    """

    levenshtein: int
    affine_cost: int | None
    cigar: Cigar | None
    band_used: int
    cells_computed: int
    traceback_cells: int
    affine_escaped: bool = False
    max_primed_value: int | None = None


def banded_edit_distance(reference: str, query: str, policy: BandPolicy,
                         with_traceback: bool = True) -> EditDistanceOutcome:
    """Banded Levenshtein distance, plus the affine (0,1,1,1) engine cost.

    The Levenshtein band covers diagonal offsets within the policy bandwidth
    of the corner-to-corner line; without traceback no per-cell codes are
    allocated at all.
    """
    if not reference or not query:
        raise ValueError("alignment inputs must be non-empty")
    m, n = len(reference), len(query)
    bw = effective_bandwidth(policy, m, n)
    dmin = min(0, n - m) - bw
    dmax = max(0, n - m) + bw
    width = dmax - dmin + 1
    if with_traceback:
        flags = np.full((m + 1, width), -1, dtype=np.int8)
        tb_cells = flags.size
    else:
        flags = np.full((1, 1), -1, dtype=np.int8)
        tb_cells = 0
    out = np.zeros(2, dtype=np.int64)
    _kernels.banded_edit_kernel(
        encode_sequence(reference), encode_sequence(query),
        dmin, dmax, flags, with_traceback, out)
    dist, cells = int(out[0]), int(out[1])
    cigar = None
    if with_traceback:
        cigar = _edit_walk(flags, dmin, m, n)
    scheme = ScoringScheme(0, 1, 1, 1)
    affine_cost: int | None = None
    escaped = False
    max_primed = None
    try:
        affine_outcome, _ = banded_align(
            reference, query, scheme, policy, adaptive=True,
            with_traceback=False)
        affine_cost = -affine_outcome.score
        cells += affine_outcome.cells_computed
        max_primed = affine_outcome.max_primed_value
    except BandEscape:
        escaped = True
    return EditDistanceOutcome(
        levenshtein=dist, affine_cost=affine_cost, cigar=cigar,
        band_used=bw, cells_computed=cells, traceback_cells=tb_cells,
        affine_escaped=escaped, max_primed_value=max_primed)


def _edit_walk(flags: np.ndarray, dmin: int, m: int, n: int) -> Cigar:
    i, j = m, n
    ops: list[EditOp] = []
    while i > 0 or j > 0:
        if i == 0:
            ops.extend([EditOp.INSERTION] * j)
            break
        if j == 0:
            ops.extend([EditOp.DELETION] * i)
            break
        x = j - i - dmin
        if x < 0 or x >= flags.shape[1]:
            raise CorruptTraceback(f"cell ({i}, {j}) outside the edit band")
        f = int(flags[i, x])
        if f == 0:
            ops.append(EditOp.MATCH_OR_MISMATCH)
            i -= 1
            j -= 1
        elif f == 1:
            ops.append(EditOp.DELETION)
            i -= 1
        elif f == 2:
            ops.append(EditOp.INSERTION)
            j -= 1
        else:
            raise CorruptTraceback(f"no flag recorded for cell ({i}, {j})")
    ops.reverse()
    return cigar_from_ops(ops)
