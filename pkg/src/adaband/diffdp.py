"""Full-matrix difference-form DP and its shifted (parallel-friendly) form.

The difference grids store adjacent-cell score deltas instead of absolute
scores, which bounds every stored value by the scheme rather than by the
sequence length.  The shifted form adds o+e (deltas) or 2o+2e (diagonal
accumulator and gap carriers) so everything is non-negative and the four
per-cell updates depend only on the accumulator plus previous-cell values.

This module is the equivalence bridge: reconstructing absolute scores from
the shifted grids must reproduce the oracle's H grid cell-exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import PrecisionOverflow, ScoringScheme, encode_sequence, min_bit_width

logger = logging.getLogger(__name__)


@dataclass
class DiffMatrices:
    """Signed difference grids, (m+1) x (n+1).

    dH[i,j] = H[i,j] - H[i-1,j] (defined for i >= 1; column 0 seeded),
    dV[i,j] = H[i,j] - H[i,j-1] (defined for j >= 1; row 0 seeded),
    dE[i,j] = E[i+1,j] - H[i,j] (defined at j >= 1 for all i; row 0 seeded),
    dF[i,j] = F[i,j+1] - H[i,j] (defined at i >= 1 for all j; column 0 seeded).
    Entries outside those regions are 0; the last row of dE (and last column
    of dF) extend the recurrence formally past the grid.
    """

    dH: np.ndarray
    dV: np.ndarray
    dE: np.ndarray
    dF: np.ndarray


@dataclass
class PrimedDiffMatrices:
    """Shifted non-negative grids: accumulator A' and the four deltas.

    a[i,j] = H[i,j] - H[i-1,j-1] + 2(o+e); dH'/dV' are dH/dV + (o+e);
    dE'[i,j] = dE[i,j] + dV[i,j] + 2(o+e) and symmetrically for dF'.
    Every stored value lies in [0, M + 2o + 2e].
    """

    a: np.ndarray
    dH: np.ndarray
    dV: np.ndarray
    dE: np.ndarray
    dF: np.ndarray

    def max_value(self) -> int:
        return int(max(self.a.max(), self.dH.max(), self.dV.max(),
                       self.dE.max(), self.dF.max()))

    def min_value(self) -> int:
        return int(min(self.a.min(), self.dH.min(), self.dV.min(),
                       self.dE.min(), self.dF.min()))


def diff_dp_matrices(reference: str, query: str, scheme: ScoringScheme) -> DiffMatrices:
    """Compute the signed difference grids."""
    if not reference or not query:
        raise ValueError("alignment inputs must be non-empty")
    A, B, o, e = scheme.as_tuple()
    dH, dV, dE, dF = _kernels.diff_dp_kernel(
        encode_sequence(reference), encode_sequence(query), A, B, o, e)
    _log_narrow_bound_excursions(dH, dV, scheme)
    return DiffMatrices(dH, dV, dE, dF)


def _log_narrow_bound_excursions(dH, dV, scheme):
    """Count dH/dV values outside [-o-e, -e]; diagnostic only.

    Match-scoring schemes routinely exceed -e on the high side, so this is
    logged rather than enforced.
    """
    lo, hi = -scheme.shift, -scheme.gap_extend
    inner_h = dH[1:, :]
    inner_v = dV[:, 1:]
    count = int(((inner_h < lo) | (inner_h > hi)).sum()
                + ((inner_v < lo) | (inner_v > hi)).sum())
    if count:
        logger.debug("%d dH/dV values outside [%d, %d]", count, lo, hi)


def parallel_diff_dp_matrices(reference: str, query: str,
                              scheme: ScoringScheme) -> PrimedDiffMatrices:
    """Compute the shifted grids and verify the value-range contract."""
    if not reference or not query:
        raise ValueError("alignment inputs must be non-empty")
    scheme.require_primed_safe()
    A, B, o, e = scheme.as_tuple()
    a, dH, dV, dE, dF = _kernels.parallel_diff_dp_kernel(
        encode_sequence(reference), encode_sequence(query), A, B, o, e)
    primed = PrimedDiffMatrices(a, dH, dV, dE, dF)
    cap = scheme.value_cap
    lo, hi = primed.min_value(), primed.max_value()
    if lo < 0 or hi > cap:
        raise PrecisionOverflow(
            f"shifted value range [{lo}, {hi}] escapes [0, {cap}] "
            f"({min_bit_width(scheme)}-bit domain)")
    return primed


def reconstruct_scores(primed: PrimedDiffMatrices, scheme: ScoringScheme) -> np.ndarray:
    """Accumulate absolute H scores down each column from dH'."""
    dH = primed.dH
    m = dH.shape[0] - 1
    n = dH.shape[1] - 1
    o, e = scheme.gap_open, scheme.gap_extend
    H = np.empty((m + 1, n + 1), dtype=np.int64)
    H[0, 0] = 0
    for j in range(1, n + 1):
        H[0, j] = -(o + j * e)
    H[1:, :] = dH[1:, :] - scheme.shift
    np.cumsum(H, axis=0, out=H)
    return H


def unprime(primed: PrimedDiffMatrices, scheme: ScoringScheme) -> DiffMatrices:
    """Invert the shifts, recovering the signed difference grids."""
    shift = scheme.shift
    shift2 = 2 * shift
    dH = np.zeros_like(primed.dH)
    dV = np.zeros_like(primed.dV)
    dE = np.zeros_like(primed.dE)
    dF = np.zeros_like(primed.dF)
    dH[1:, :] = primed.dH[1:, :] - shift
    dV[:, 1:] = primed.dV[:, 1:] - shift
    # dE'[i,j] = dE[i,j] + dV[i,j] + 2(o+e); row 0 falls back to the seeds
    dE[:, 1:] = primed.dE[:, 1:] - dV[:, 1:] - shift2
    dF[1:, :] = primed.dF[1:, :] - dH[1:, :] - shift2
    return DiffMatrices(dH, dV, dE, dF)
