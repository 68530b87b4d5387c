"""Unbanded, full-precision ground-truth aligners.

``full_dp_align`` is the reference every approximate component is validated
against.  Traceback tie-breaks are fixed so all engines in this package
produce byte-identical cigars for identical inputs:

* at a score cell: match/mismatch beats deletion beats insertion;
* inside a gap: opening beats extending on ties (gaps close as early as
  possible when walking backwards).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    AlignmentOutcome,
    Cigar,
    EditOp,
    ScoringScheme,
    cigar_from_ops,
    encode_sequence,
)


@dataclass
class DpMatrices:
    """Full (m+1) x (n+1) score grids.

    Row/column 0 of H hold the global-alignment boundary; the matching E/F
    entries are a large negative sentinel that forbids illegal transitions.
    """

    H: np.ndarray
    E: np.ndarray
    F: np.ndarray


def full_dp_matrices(reference: str, query: str, scheme: ScoringScheme) -> DpMatrices:
    """Affine-gap global DP, returning all three grids."""
    _require_nonempty(reference, query)
    A, B, o, e = scheme.as_tuple()
    H, E, F = _kernels.full_dp_kernel(
        encode_sequence(reference), encode_sequence(query), A, B, o, e)
    return DpMatrices(H, E, F)


def full_dp_score(reference: str, query: str, scheme: ScoringScheme) -> int:
    """Optimal global score only, in O(n) memory."""
    _require_nonempty(reference, query)
    A, B, o, e = scheme.as_tuple()
    return int(_kernels.full_dp_score_kernel(
        encode_sequence(reference), encode_sequence(query), A, B, o, e))


def full_dp_align(reference: str, query: str, scheme: ScoringScheme) -> AlignmentOutcome:
    """Optimal global alignment with one canonical traceback path."""
    mats = full_dp_matrices(reference, query, scheme)
    m, n = len(reference), len(query)
    cigar = _traceback(mats, reference, query, scheme)
    return AlignmentOutcome(
        score=int(mats.H[m, n]),
        cigar=cigar,
        band_used=min(m, n) + 1,
        direction_log="",
        cells_computed=m * n,
    )


def _traceback(mats: DpMatrices, reference: str, query: str,
               scheme: ScoringScheme) -> Cigar:
    H, E, F = mats.H, mats.E, mats.F
    A = scheme.match_score
    B = scheme.mismatch_penalty
    o = scheme.gap_open
    e = scheme.gap_extend
    i, j = len(reference), len(query)
    ops: list[EditOp] = []
    state = "H"
    while i > 0 or j > 0:
        if state == "H":
            if i == 0:
                ops.extend([EditOp.INSERTION] * j)
                break
            if j == 0:
                ops.extend([EditOp.DELETION] * i)
                break
            s = A if reference[i - 1] == query[j - 1] else -B
            if H[i, j] == H[i - 1, j - 1] + s:
                ops.append(EditOp.MATCH_OR_MISMATCH)
                i -= 1
                j -= 1
            elif H[i, j] == E[i, j]:
                state = "E"
            else:
                state = "F"
        elif state == "E":
            ops.append(EditOp.DELETION)
            # open wins ties, matching the strict-extension flag convention
            opened = E[i, j] == H[i - 1, j] - o - e
            i -= 1
            state = "H" if opened else "E"
        else:
            ops.append(EditOp.INSERTION)
            opened = F[i, j] == H[i, j - 1] - o - e
            j -= 1
            state = "H" if opened else "F"
    ops.reverse()
    return cigar_from_ops(ops)


def edit_distance_full(reference: str, query: str) -> tuple[int, Cigar]:
    """Levenshtein distance with a canonical unit-cost traceback."""
    _require_nonempty(reference, query)
    D = _kernels.edit_dp_kernel(encode_sequence(reference), encode_sequence(query))
    i, j = len(reference), len(query)
    ops: list[EditOp] = []
    while i > 0 or j > 0:
        if i == 0:
            ops.extend([EditOp.INSERTION] * j)
            break
        if j == 0:
            ops.extend([EditOp.DELETION] * i)
            break
        sub = 0 if reference[i - 1] == query[j - 1] else 1
        if D[i, j] == D[i - 1, j - 1] + sub:
            ops.append(EditOp.MATCH_OR_MISMATCH)
            i -= 1
            j -= 1
        elif D[i, j] == D[i - 1, j] + 1:
            ops.append(EditOp.DELETION)
            i -= 1
        else:
            ops.append(EditOp.INSERTION)
            j -= 1
    ops.reverse()
    return int(D[len(reference), len(query)]), cigar_from_ops(ops)


def _require_nonempty(reference: str, query: str):
    if not reference or not query:
        raise ValueError("alignment inputs must be non-empty")
