"""Deterministic profile-driven read simulator.

Errors are injected per reference base with one uniform draw partitioned
into substitute / insert / delete / copy.  Insertions continue geometrically
(continue probability = the insertion rate) to allow multi-base indels; the
first-insertion probability is scaled by (1 - rate) so the expected number
of inserted bases per position stays exactly at the profile rate.

Everything is reproducible: read k of a dataset uses an RNG seeded by a
stable hash of (master seed, k), so generation order does not matter.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .core import NucleotideSequence

_BASES = "ACGT"


class GenomeTooShort(ValueError):
    pass


@dataclass(frozen=True)
class ErrorProfile:
    """Per-base substitution / insertion / deletion probabilities."""

    name: str
    substitution_rate: float
    insertion_rate: float
    deletion_rate: float

    def __post_init__(self):
        rates = (self.substitution_rate, self.insertion_rate, self.deletion_rate)
        if any(r < 0 or r >= 1 for r in rates):
            raise ValueError("rates must lie in [0, 1)")
        if sum(rates) >= 1:
            raise ValueError("substitution + insertion + deletion must be < 1")

    @property
    def total_rate(self) -> float:
        return self.substitution_rate + self.insertion_rate + self.deletion_rate


BUILTIN_PROFILES = {
    "pacbio": ErrorProfile("pacbio", 0.015, 0.090, 0.045),
    "ont_2d": ErrorProfile("ont_2d", 0.165, 0.050, 0.085),
    "illumina": ErrorProfile("illumina", 0.03, 0.01, 0.01),
    "perfect": ErrorProfile("perfect", 0.0, 0.0, 0.0),
}


def get_profile(name: str) -> ErrorProfile:
    try:
        return BUILTIN_PROFILES[name.lower()]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_PROFILES))
        raise ValueError(f"unknown error profile {name!r} (known: {known})") from None


# A truth edit is (op, window_position, payload):
#   ("S", p, base)  substitute window[p] with base
#   ("D", p, "")    drop window[p]
#   ("I", p, seq)   emit seq after (the possibly edited) window[p]
TruthEdit = tuple[str, int, str]


@dataclass(frozen=True)
class ReadPair:
    """A reference window, the read derived from it, and the ground truth."""

    pair_id: str
    reference_window: NucleotideSequence
    read: NucleotideSequence
    offset: int
    truth_edits: tuple[TruthEdit, ...]
    seed: int

    @property
    def n_edits(self) -> int:
        return sum(len(payload) if op == "I" else 1
                   for op, _, payload in self.truth_edits)


def apply_edits(window: str, edits: tuple[TruthEdit, ...]) -> str:
    """Replay truth edits against the window; must reproduce the read."""
    by_pos: dict[int, list[TruthEdit]] = {}
    for ed in edits:
        by_pos.setdefault(ed[1], []).append(ed)
    out: list[str] = []
    for p, base in enumerate(window):
        emitted = base
        for op, _, payload in by_pos.get(p, ()):
            if op == "S":
                emitted = payload
            elif op == "D":
                emitted = ""
        out.append(emitted)
        for op, _, payload in by_pos.get(p, ()):
            if op == "I":
                out.append(payload)
    return "".join(out)


def synthetic_genome(length: int, seed: int) -> str:
    if length < 1:
        raise ValueError("genome length must be >= 1")
    rng = random.Random(seed)
    return "".join(rng.choices(_BASES, k=length))


def sample_reference(genome: str, length: int, rng: random.Random) -> tuple[str, int]:
    """Uniformly placed window of ``length`` bp."""
    if length < 1:
        raise ValueError("window length must be >= 1")
    if len(genome) < length:
        raise GenomeTooShort(
            f"genome has {len(genome)} bp, window needs {length}")
    offset = rng.randrange(len(genome) - length + 1)
    return genome[offset:offset + length], offset


def mutate_read(window: str, profile: ErrorProfile, rng: random.Random,
                pair_id: str = "", offset: int = 0, seed: int = 0) -> ReadPair:
    """Inject profile errors into a window, recording the ground truth."""
    p_sub = profile.substitution_rate
    p_ins = profile.insertion_rate
    p_del = profile.deletion_rate
    p_ins_first = p_ins * (1.0 - p_ins)  # unbiased with geometric continuation
    out: list[str] = []
    edits: list[TruthEdit] = []
    for p, base in enumerate(window):
        u = rng.random()
        if u < p_sub:
            other = _BASES[(_BASES.index(base) + rng.randrange(1, 4)) % 4]
            out.append(other)
            edits.append(("S", p, other))
        elif u < p_sub + p_ins_first:
            out.append(base)
            ins = [rng.choice(_BASES)]
            while rng.random() < p_ins:
                ins.append(rng.choice(_BASES))
            inserted = "".join(ins)
            out.append(inserted)
            edits.append(("I", p, inserted))
        elif u < p_sub + p_ins_first + p_del:
            edits.append(("D", p, ""))
        else:
            out.append(base)
    read = "".join(out)
    if not read:
        # every base was deleted; undelete the first so the pair stays alignable
        edits = [ed for ed in edits if ed != ("D", 0, "")]
        read = window[0]
    return ReadPair(
        pair_id=pair_id,
        reference_window=NucleotideSequence(window),
        read=NucleotideSequence(read),
        offset=offset,
        truth_edits=tuple(edits),
        seed=seed,
    )


def derive_seed(master_seed: int, index: int) -> int:
    """Stable per-read seed, independent of generation order."""
    digest = hashlib.blake2b(
        f"{master_seed}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def generate_dataset(genome: str, profile: ErrorProfile, count: int,
                     length: int, seed: int):
    """Yield ``count`` reproducible ReadPairs drawn from ``genome``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    for idx in range(count):
        s = derive_seed(seed, idx)
        rng = random.Random(s)
        window, offset = sample_reference(genome, length, rng)
        yield mutate_read(window, profile, rng,
                          pair_id=f"read{idx:06d}", offset=offset, seed=s)
