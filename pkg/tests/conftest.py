import random

import pytest

from adaband import ScoringScheme
from adaband.readsim import synthetic_genome

MINIMAP_SCHEME = ScoringScheme(2, 4, 4, 2)
BWA_SCHEME = ScoringScheme(1, 4, 6, 1)
EDIT_SCHEME = ScoringScheme(0, 1, 1, 1)


def random_seq(rng: random.Random, length: int) -> str:
    return "".join(rng.choice("ACGT") for _ in range(length))


def random_pair(rng: random.Random, max_len: int, min_len: int = 1):
    return (random_seq(rng, rng.randint(min_len, max_len)),
            random_seq(rng, rng.randint(min_len, max_len)))


def mutated_pair(rng: random.Random, length: int, edits: int):
    """A related pair: reference window plus a bounded number of edits."""
    ref = random_seq(rng, length)
    q = list(ref)
    for _ in range(edits):
        kind = rng.choice("SID")
        pos = rng.randrange(len(q)) if q else 0
        if kind == "S" and q:
            q[pos] = rng.choice("ACGT")
        elif kind == "I":
            q.insert(pos, rng.choice("ACGT"))
        elif q:
            del q[pos]
    if not q:
        q = [rng.choice("ACGT")]
    return ref, "".join(q)


@pytest.fixture(scope="session")
def genome_1m():
    return synthetic_genome(1_000_000, 7)
