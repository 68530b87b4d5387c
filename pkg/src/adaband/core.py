"""Shared domain types: sequences, scoring schemes, band policy, cigars.

Conventions used throughout the package:

* The DP grid has ``m + 1`` rows (reference ``R``, length ``m``) and
  ``n + 1`` columns (query ``Q``, length ``n``).  Cell ``(i, j)`` scores the
  alignment of ``R[:i]`` against ``Q[:j]``.
* Scores are maximised.  A match adds ``+A``, a mismatch subtracts ``B``,
  and a gap of length ``g`` costs ``o + g*e`` (the first gap base pays the
  opening charge on top of one extension).
* ``Deletion`` consumes a reference base (a downward step in the grid),
  ``Insertion`` consumes a query base (a rightward step).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

_BASES = "ACGT"
_BASE_CODE = {b: i for i, b in enumerate(_BASES)}


class CigarShapeMismatch(ValueError):
    """A cigar does not consume exactly the two sequences it claims to align."""


class PrecisionOverflow(ArithmeticError):
    """A shifted difference value left ``[0, M + 2o + 2e]``; recurrence bug."""


class UnsupportedScheme(ValueError):
    """Scheme cannot be run in the shifted (non-negative) difference domain."""


class BandEscape(RuntimeError):
    """The terminal cell never entered the band.

    Carries the best edge score seen so callers can retry with a larger
    base bandwidth.
    """

    def __init__(self, iteration, best_edge_score):
        super().__init__(
            f"band left the grid at iteration {iteration}; "
            f"best edge score {best_edge_score}"
        )
        self.iteration = iteration
        self.best_edge_score = best_edge_score


class CorruptTraceback(RuntimeError):
    """Traceback walk stepped outside every recorded band (internal bug)."""


class NucleotideSequence(str):
    """An ``ACGT`` string of length >= 1.

    Subclasses ``str`` so sequences interoperate with plain strings; the
    constructor only validates the alphabet.
    """

    def __new__(cls, seq):
        s = str(seq)
        if not s:
            raise ValueError("empty sequence")
        for pos, ch in enumerate(s):
            if ch not in _BASE_CODE:
                raise ValueError(f"illegal base {ch!r} at position {pos}")
        return super().__new__(cls, s)

    def encode(self) -> np.ndarray:
        return encode_sequence(self)


def encode_sequence(seq: str) -> np.ndarray:
    """Map an ACGT string to a uint8 code array (A=0, C=1, G=2, T=3)."""
    out = np.empty(len(seq), dtype=np.uint8)
    for i, ch in enumerate(seq):
        try:
            out[i] = _BASE_CODE[ch]
        except KeyError:
            raise ValueError(f"illegal base {ch!r} at position {i}") from None
    return out


def decode_sequence(codes) -> str:
    return "".join(_BASES[c] for c in codes)


@dataclass(frozen=True)
class ScoringScheme:
    """Affine-gap scoring parameters, all stored as non-negative magnitudes."""

    match_score: int = 2
    mismatch_penalty: int = 4
    gap_open: int = 4
    gap_extend: int = 2

    def __post_init__(self):
        for name in ("match_score", "mismatch_penalty", "gap_open", "gap_extend"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        if self.gap_open + self.gap_extend == 0:
            raise ValueError("zero-cost gap scheme rejected (gap_open + gap_extend == 0)")

    @property
    def max_substitution(self) -> int:
        """Largest substitution magnitude M = max(A, B)."""
        return max(self.match_score, self.mismatch_penalty)

    @property
    def shift(self) -> int:
        """Per-difference shift o + e applied in the non-negative domain."""
        return self.gap_open + self.gap_extend

    @property
    def value_cap(self) -> int:
        """Upper end of the shifted value range, M + 2o + 2e."""
        return self.max_substitution + 2 * self.shift

    @property
    def primed_safe(self) -> bool:
        """Whether shifted match/mismatch values stay non-negative."""
        return self.mismatch_penalty <= 2 * self.shift

    def require_primed_safe(self):
        if not self.primed_safe:
            raise UnsupportedScheme(
                f"mismatch penalty {self.mismatch_penalty} exceeds 2*(o+e)="
                f"{2 * self.shift}; shifted scores would go negative"
            )

    def substitution(self, match: bool) -> int:
        return self.match_score if match else -self.mismatch_penalty

    def as_tuple(self):
        return (self.match_score, self.mismatch_penalty, self.gap_open, self.gap_extend)


EDIT_DISTANCE_SCHEME = ScoringScheme(0, 1, 1, 1)


def min_bit_width(scheme: ScoringScheme) -> int:
    """Bits needed for the shifted difference domain: ceil(log2(M + 2o + 2e + 1))."""
    return max(1, math.ceil(math.log2(scheme.value_cap + 1)))


@dataclass(frozen=True)
class BandPolicy:
    """How bandwidth is derived from sequence length.

    ``bandwidth = min(base + slope * L, cap)``, optionally rounded up to the
    next multiple of ``base`` (never past ``cap``).
    """

    base_bandwidth: int = 10
    slope: float = 0.01
    cap: int = 100
    round_to_multiple: bool = True

    def __post_init__(self):
        if self.base_bandwidth < 1:
            raise ValueError("base_bandwidth must be >= 1")
        if self.cap < self.base_bandwidth:
            raise ValueError("cap must be >= base_bandwidth")
        if self.slope < 0:
            raise ValueError("slope must be non-negative")


def compute_bandwidth(policy: BandPolicy, length: int) -> int:
    """Bandwidth for a sequence of ``length`` bp under ``policy``."""
    if length < 1:
        raise ValueError("length must be >= 1")
    w = policy.base_bandwidth
    raw = min(w + policy.slope * length, float(policy.cap))
    if policy.round_to_multiple:
        b = w * math.ceil(raw / w)
        b = min(b, policy.cap)
    else:
        b = math.ceil(raw)
    return max(w, min(b, policy.cap))


class EditOp(IntEnum):
    """2-bit traceback codes.  Code 3 ("no winner") never survives encoding."""

    MATCH_OR_MISMATCH = 0
    DELETION = 1
    INSERTION = 2

    @property
    def letter(self) -> str:
        return "MDI"[self]

    @classmethod
    def from_letter(cls, ch: str) -> "EditOp":
        try:
            return {"M": cls.MATCH_OR_MISMATCH, "D": cls.DELETION, "I": cls.INSERTION}[ch]
        except KeyError:
            raise ValueError(f"unknown cigar op {ch!r}") from None


Cigar = list[tuple[EditOp, int]]


def cigar_to_string(cigar: Cigar) -> str:
    return "".join(f"{n}{op.letter}" for op, n in cigar)


def cigar_from_string(text: str) -> Cigar:
    out: Cigar = []
    num = ""
    for ch in text:
        if ch.isdigit():
            num += ch
        else:
            if not num:
                raise ValueError(f"cigar op {ch!r} without a run length")
            out.append((EditOp.from_letter(ch), int(num)))
            num = ""
    if num:
        raise ValueError("trailing run length without an op")
    return out


def cigar_from_ops(ops) -> Cigar:
    """Run-length encode a sequence of EditOps."""
    out: Cigar = []
    for op in ops:
        if out and out[-1][0] == op:
            out[-1] = (op, out[-1][1] + 1)
        else:
            out.append((op, 1))
    return out


def cigar_consumption(cigar: Cigar) -> tuple[int, int]:
    """(reference bases, query bases) consumed by the cigar."""
    ref = sum(n for op, n in cigar if op != EditOp.INSERTION)
    qry = sum(n for op, n in cigar if op != EditOp.DELETION)
    return ref, qry


def score_cigar(reference: str, query: str, cigar: Cigar, scheme: ScoringScheme) -> int:
    """Independently rescore an edit path.

    Adjacent runs of the same gap op are merged before charging, so a gap of
    length g always costs o + g*e regardless of how the runs were split.
    """
    ref_used, qry_used = cigar_consumption(cigar)
    if ref_used != len(reference) or qry_used != len(query):
        raise CigarShapeMismatch(
            f"cigar consumes {ref_used} reference / {qry_used} query bases, "
            f"sequences have {len(reference)} / {len(query)}"
        )
    score = 0
    i = j = 0
    prev_op = None
    for op, n in cigar:
        if n <= 0:
            raise CigarShapeMismatch(f"non-positive run length {n}")
        if op == EditOp.MATCH_OR_MISMATCH:
            for _ in range(n):
                score += scheme.substitution(reference[i] == query[j])
                i += 1
                j += 1
        else:
            if prev_op != op:
                score -= scheme.gap_open
            score -= n * scheme.gap_extend
            if op == EditOp.DELETION:
                i += n
            else:
                j += n
        prev_op = op
    return score


@dataclass
class AlignmentOutcome:
    """Result of a (banded or full) global alignment."""

    score: int
    cigar: Cigar
    band_used: int
    direction_log: str = ""
    cells_computed: int = 0
    edge_score: int | None = None  # forward-accumulated score at (m, n)
    max_primed_value: int | None = None

    def cigar_string(self) -> str:
        return cigar_to_string(self.cigar)

    def validate(self, reference: str, query: str, scheme: ScoringScheme):
        """Assert the outcome invariants against the aligned pair."""
        ref_used, qry_used = cigar_consumption(self.cigar)
        if ref_used != len(reference) or qry_used != len(query):
            raise CigarShapeMismatch(
                f"cigar consumption ({ref_used}, {qry_used}) != "
                f"({len(reference)}, {len(query)})"
            )
        replay = score_cigar(reference, query, self.cigar, scheme)
        if replay != self.score:
            raise AssertionError(f"cigar rescoring {replay} != reported score {self.score}")
