import random

import numpy as np
import pytest

from adaband import EditOp
from adaband.oracle import (
    edit_distance_full,
    full_dp_align,
    full_dp_matrices,
    full_dp_score,
)

from conftest import MINIMAP_SCHEME, random_pair, random_seq


def brute_force_affine(ref, qry, scheme):
    """Exhaustive enumeration of all alignment paths (tiny inputs only)."""
    A, B = scheme.match_score, scheme.mismatch_penalty
    o, e = scheme.gap_open, scheme.gap_extend
    best = [-(1 << 30)]

    def rec(i, j, last, acc):
        if i == len(ref) and j == len(qry):
            best[0] = max(best[0], acc)
            return
        if i < len(ref) and j < len(qry):
            s = A if ref[i] == qry[j] else -B
            rec(i + 1, j + 1, "M", acc + s)
        if i < len(ref):
            rec(i + 1, j, "D", acc - (e if last == "D" else o + e))
        if j < len(qry):
            rec(i, j + 1, "I", acc - (e if last == "I" else o + e))

    rec(0, 0, None, 0)
    return best[0]


def brute_force_edit(a, b):
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        brute_force_edit(a[1:], b[1:]) + (a[0] != b[0]),
        brute_force_edit(a[1:], b) + 1,
        brute_force_edit(a, b[1:]) + 1,
    )


class TestFullDp:
    def test_identity(self):
        out = full_dp_align("ACGT", "ACGT", MINIMAP_SCHEME)
        assert out.score == 8
        assert out.cigar == [(EditOp.MATCH_OR_MISMATCH, 4)]

    def test_one_match_three_deletions(self):
        out = full_dp_align("AAAA", "A", MINIMAP_SCHEME)
        assert out.score == 2 - (4 + 3 * 2)
        ops = {op: n for op, n in out.cigar}
        assert ops == {EditOp.MATCH_OR_MISMATCH: 1, EditOp.DELETION: 3}
        out.validate("AAAA", "A", MINIMAP_SCHEME)

    def test_against_exhaustive_enumeration(self):
        ref, qry = "ACGTCCG", "AGTTATC"
        out = full_dp_align(ref, qry, MINIMAP_SCHEME)
        assert out.score == brute_force_affine(ref, qry, MINIMAP_SCHEME)
        out.validate(ref, qry, MINIMAP_SCHEME)

    def test_random_smalls_against_enumeration(self):
        rng = random.Random(11)
        for _ in range(40):
            ref, qry = random_pair(rng, 6)
            out = full_dp_align(ref, qry, MINIMAP_SCHEME)
            assert out.score == brute_force_affine(ref, qry, MINIMAP_SCHEME)
            out.validate(ref, qry, MINIMAP_SCHEME)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            full_dp_align("", "A", MINIMAP_SCHEME)

    def test_score_matches_matrix_corner(self):
        rng = random.Random(5)
        for _ in range(20):
            ref, qry = random_pair(rng, 40)
            mats = full_dp_matrices(ref, qry, MINIMAP_SCHEME)
            assert mats.H[len(ref), len(qry)] == full_dp_score(ref, qry, MINIMAP_SCHEME)
            assert (mats.H[len(ref), len(qry)]
                    == full_dp_align(ref, qry, MINIMAP_SCHEME).score)

    def test_matrix_invariants(self):
        mats = full_dp_matrices("AC", "A", MINIMAP_SCHEME)
        assert mats.H[1, 1] == 2
        # boundary: gap of length g costs o + g*e
        assert mats.H[0, 1] == -6
        assert mats.H[2, 0] == -8
        rng = random.Random(6)
        ref, qry = random_pair(rng, 30, min_len=2)
        mats = full_dp_matrices(ref, qry, MINIMAP_SCHEME)
        inner_h = mats.H[1:, 1:]
        assert (inner_h >= np.maximum(mats.E[1:, 1:], mats.F[1:, 1:])).all()

    def test_reversal_symmetry_of_score(self):
        rng = random.Random(7)
        for _ in range(30):
            ref, qry = random_pair(rng, 50)
            fwd = full_dp_score(ref, qry, MINIMAP_SCHEME)
            rev = full_dp_score(ref[::-1], qry[::-1], MINIMAP_SCHEME)
            assert fwd == rev


class TestEditDistance:
    def test_identical(self):
        dist, cigar = edit_distance_full("ACGTACGT", "ACGTACGT")
        assert dist == 0
        assert cigar == [(EditOp.MATCH_OR_MISMATCH, 8)]

    def test_single_substitution(self):
        dist, _ = edit_distance_full("ACG", "ACT")
        assert dist == 1

    def test_against_recursive_enumeration(self):
        assert edit_distance_full("ACGTCCG", "AGTTATC")[0] == brute_force_edit(
            "ACGTCCG", "AGTTATC")
        rng = random.Random(13)
        for _ in range(25):
            a, b = random_pair(rng, 7)
            assert edit_distance_full(a, b)[0] == brute_force_edit(a, b)

    def test_cigar_replays_to_distance_edits(self):
        rng = random.Random(17)
        for _ in range(30):
            a, b = random_pair(rng, 50)
            dist, cigar = edit_distance_full(a, b)
            i = j = edits = 0
            for op, n in cigar:
                if op == EditOp.MATCH_OR_MISMATCH:
                    edits += sum(a[i + t] != b[j + t] for t in range(n))
                    i += n
                    j += n
                elif op == EditOp.DELETION:
                    edits += n
                    i += n
                else:
                    edits += n
                    j += n
            assert (i, j) == (len(a), len(b))
            assert edits == dist

    def test_symmetry_and_triangle_inequality(self):
        rng = random.Random(19)
        for _ in range(25):
            a = random_seq(rng, rng.randint(1, 64))
            b = random_seq(rng, rng.randint(1, 64))
            c = random_seq(rng, rng.randint(1, 64))
            ab = edit_distance_full(a, b)[0]
            ba = edit_distance_full(b, a)[0]
            ac = edit_distance_full(a, c)[0]
            cb = edit_distance_full(c, b)[0]
            assert ab == ba
            assert ab <= ac + cb
