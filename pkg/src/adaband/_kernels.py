"""Numba kernels for the DP recurrences.

Grid convention: rows 0..m index the reference, columns 0..n the query.
All kernels take base-code arrays (uint8, A=0 C=1 G=2 T=3) and scheme
magnitudes (A, B, o, e) as plain integers.  Scores are maximised; the first
base of a gap costs o + e.

The banded kernels keep one anti-diagonal of B slots.  Slot k of a band with
origin (i0, j0) sits on grid cell (i0 + k, j0 - k); a Right move increments
j0, a Down move increments i0.  After a Right move the upper neighbour of
slot k is previous slot k - 1 and the left neighbour is previous slot k;
after a Down move they are k and k + 1.
"""

from __future__ import annotations

import numpy as np
from numba import njit

MISSING = -(1 << 60)  # stands in for minus infinity in max() arguments
EDIT_INF = 1 << 30

# status codes shared with banded.py
OK = 0
ESCAPED = 1
OVERFLOWED = 2
EDGE_BROKEN = 3


@njit(cache=True, nogil=True)
def full_dp_kernel(r, q, A, B, o, e):
    """Affine-gap global DP; returns the full H, E, F grids (64-bit)."""
    m = r.shape[0]
    n = q.shape[0]
    H = np.empty((m + 1, n + 1), dtype=np.int64)
    E = np.empty((m + 1, n + 1), dtype=np.int64)
    F = np.empty((m + 1, n + 1), dtype=np.int64)
    H[0, 0] = 0
    E[0, 0] = MISSING
    F[0, 0] = MISSING
    for j in range(1, n + 1):
        H[0, j] = -(o + j * e)
        E[0, j] = MISSING
        F[0, j] = MISSING
    for i in range(1, m + 1):
        H[i, 0] = -(o + i * e)
        E[i, 0] = MISSING
        F[i, 0] = MISSING
    for i in range(1, m + 1):
        ri = r[i - 1]
        for j in range(1, n + 1):
            ev = H[i - 1, j] - o - e
            t = E[i - 1, j] - e
            if t > ev:
                ev = t
            fv = H[i, j - 1] - o - e
            t = F[i, j - 1] - e
            if t > fv:
                fv = t
            s = A if ri == q[j - 1] else -B
            hv = H[i - 1, j - 1] + s
            if ev > hv:
                hv = ev
            if fv > hv:
                hv = fv
            E[i, j] = ev
            F[i, j] = fv
            H[i, j] = hv
    return H, E, F


@njit(cache=True, nogil=True)
def full_dp_score_kernel(r, q, A, B, o, e):
    """Score-only affine DP with O(n) memory."""
    m = r.shape[0]
    n = q.shape[0]
    prev = np.empty(n + 1, dtype=np.int64)
    cur = np.empty(n + 1, dtype=np.int64)
    ecol = np.empty(n + 1, dtype=np.int64)
    prev[0] = 0
    for j in range(1, n + 1):
        prev[j] = -(o + j * e)
        ecol[j] = MISSING
    for i in range(1, m + 1):
        cur[0] = -(o + i * e)
        fv = MISSING
        ri = r[i - 1]
        for j in range(1, n + 1):
            ev = prev[j] - o - e
            t = ecol[j] - e
            if t > ev:
                ev = t
            nf = cur[j - 1] - o - e
            t = fv - e
            if t > nf:
                nf = t
            fv = nf
            s = A if ri == q[j - 1] else -B
            hv = prev[j - 1] + s
            if ev > hv:
                hv = ev
            if fv > hv:
                hv = fv
            ecol[j] = ev
            cur[j] = hv
        for j in range(n + 1):
            prev[j] = cur[j]
    return prev[n]


@njit(cache=True, nogil=True)
def diff_dp_kernel(r, q, A, B, o, e):
    """Difference-form DP: dH, dV, dE, dF grids with boundary seeds.

    Meaningful regions: dH for i>=1 (column 0 seeded), dV for j>=1 (row 0
    seeded), dE for i>=0 at j>=1, dF for j>=0 at i>=1; unused entries are 0.
    """
    m = r.shape[0]
    n = q.shape[0]
    dH = np.zeros((m + 1, n + 1), dtype=np.int64)
    dV = np.zeros((m + 1, n + 1), dtype=np.int64)
    dE = np.zeros((m + 1, n + 1), dtype=np.int64)
    dF = np.zeros((m + 1, n + 1), dtype=np.int64)
    oe = o + e
    for j in range(1, n + 1):
        dV[0, j] = -oe if j == 1 else -e
        dE[0, j] = -oe
    for i in range(1, m + 1):
        dH[i, 0] = -oe if i == 1 else -e
        dF[i, 0] = -oe
    for i in range(1, m + 1):
        ri = r[i - 1]
        for j in range(1, n + 1):
            s = A if ri == q[j - 1] else -B
            a = s
            t = dE[i - 1, j] + dV[i - 1, j]
            if t > a:
                a = t
            t = dF[i, j - 1] + dH[i, j - 1]
            if t > a:
                a = t
            ndh = a - dV[i - 1, j]
            ndv = a - dH[i, j - 1]
            t = dE[i - 1, j] - ndh
            nde = (-o if -o > t else t) - e
            t = dF[i, j - 1] - ndv
            ndf = (-o if -o > t else t) - e
            dH[i, j] = ndh
            dV[i, j] = ndv
            dE[i, j] = nde
            dF[i, j] = ndf
    return dH, dV, dE, dF


@njit(cache=True, nogil=True)
def parallel_diff_dp_kernel(r, q, A, B, o, e):
    """Shifted (non-negative) difference DP: aP, dHp, dVp, dEp, dFp grids.

    Row/column 0 hold the boundary seeds; every stored value is expected to
    lie in [0, M + 2o + 2e] (checked by the caller).
    """
    m = r.shape[0]
    n = q.shape[0]
    aP = np.zeros((m + 1, n + 1), dtype=np.int64)
    dHp = np.zeros((m + 1, n + 1), dtype=np.int64)
    dVp = np.zeros((m + 1, n + 1), dtype=np.int64)
    dEp = np.zeros((m + 1, n + 1), dtype=np.int64)
    dFp = np.zeros((m + 1, n + 1), dtype=np.int64)
    shift2 = 2 * (o + e)
    for j in range(1, n + 1):
        seed = 0 if j == 1 else o
        dVp[0, j] = seed
        dEp[0, j] = seed
    for i in range(1, m + 1):
        seed = 0 if i == 1 else o
        dHp[i, 0] = seed
        dFp[i, 0] = seed
    for i in range(1, m + 1):
        ri = r[i - 1]
        for j in range(1, n + 1):
            sp = (A if ri == q[j - 1] else -B) + shift2
            eup = dEp[i - 1, j]
            fleft = dFp[i, j - 1]
            ap = sp
            if eup > ap:
                ap = eup
            if fleft > ap:
                ap = fleft
            vup = dVp[i - 1, j]
            hleft = dHp[i, j - 1]
            t = eup + o
            nde = (ap if ap > t else t) - hleft
            t = fleft + o
            ndf = (ap if ap > t else t) - vup
            aP[i, j] = ap
            dHp[i, j] = ap - vup
            dVp[i, j] = ap - hleft
            dEp[i, j] = nde
            dFp[i, j] = ndf
    return aP, dHp, dVp, dEp, dFp


@njit(cache=True, nogil=True)
def band_step(rw, qw, i0, j0, m, n, A, B, o, e, cap, moved_right,
              prv_dh, prv_dv, prv_de, prv_df, prv_valid, prv_taint,
              cur_a, cur_dh, cur_dv, cur_de, cur_df, cur_valid, cur_taint,
              flags_row, exte_row, extf_row, store_tb):
    """Update one wavefront of B slots sitting on anti-diagonal i0 + j0.

    rw/qw hold the reference/query base codes under each slot (255 when the
    slot is off the grid).  A missing (out-of-band) neighbour contributes 0
    for all four quantities, which models the out-of-band region as pure
    gap decay (every virtual cell sits o+e below its predecessor) and keeps
    the difference algebra coherent at the band edges.  Cells computed from
    virtual neighbours are marked tainted: they are clamped into [0, cap]
    and exempt from the overflow check, and their gap flags can never point
    out of the band (a zero gap carrier never beats the shifted score).

    Returns (cells_computed, overflow_slot, max_stored_value).
    """
    bw = cur_a.shape[0]
    shift2 = 2 * (o + e)
    cells = 0
    overflow_slot = -1
    max_seen = 0
    for k in range(bw):
        cur_valid[k] = 0
        cur_taint[k] = 0
        if store_tb:
            flags_row[k] = -1
            exte_row[k] = 0
            extf_row[k] = 0
        i = i0 + k
        j = j0 - k
        if i < 1 or i > m or j < 1 or j > n:
            continue
        # upper neighbour (i-1, j): supplies dE' and dV'
        up_ok = True
        up_taint = 0
        if i == 1:
            eup = 0 if j == 1 else o
            vup = eup
        else:
            ku = k - 1 if moved_right else k
            if 0 <= ku < bw and prv_valid[ku]:
                eup = prv_de[ku]
                vup = prv_dv[ku]
                up_taint = prv_taint[ku]
            else:
                up_ok = False
                eup = 0
                vup = 0
        # left neighbour (i, j-1): supplies dF' and dH'
        left_ok = True
        left_taint = 0
        if j == 1:
            fleft = 0 if i == 1 else o
            hleft = fleft
        else:
            kl = k if moved_right else k + 1
            if 0 <= kl < bw and prv_valid[kl]:
                fleft = prv_df[kl]
                hleft = prv_dh[kl]
                left_taint = prv_taint[kl]
            else:
                left_ok = False
                fleft = 0
                hleft = 0
        sp = (A if rw[k] == qw[k] else -B) + shift2
        ap = sp
        if eup > ap:
            ap = eup
        if fleft > ap:
            ap = fleft
        if store_tb:
            if ap == sp:
                flags_row[k] = 0
            elif ap == eup:
                flags_row[k] = 1
            else:
                flags_row[k] = 2
            if up_ok and eup + o > ap:
                exte_row[k] = 1
            if left_ok and fleft + o > ap:
                extf_row[k] = 1
        ndh = ap - vup
        ndv = ap - hleft
        t = eup + o
        nde = (ap if ap > t else t) - hleft
        t = fleft + o
        ndf = (ap if ap > t else t) - vup
        tainted = (not up_ok) or (not left_ok) or up_taint or left_taint
        if tainted:
            if ndh < 0:
                ndh = 0
            elif ndh > cap:
                ndh = cap
            if ndv < 0:
                ndv = 0
            elif ndv > cap:
                ndv = cap
            if nde < 0:
                nde = 0
            elif nde > cap:
                nde = cap
            if ndf < 0:
                ndf = 0
            elif ndf > cap:
                ndf = cap
            if ap < 0:
                ap = 0
            elif ap > cap:
                ap = cap
        else:
            if (ndh < 0 or ndh > cap or ndv < 0 or ndv > cap
                    or nde < 0 or nde > cap or ndf < 0 or ndf > cap
                    or ap < 0 or ap > cap):
                overflow_slot = k
        cur_a[k] = ap
        cur_dh[k] = ndh
        cur_dv[k] = ndv
        cur_de[k] = nde
        cur_df[k] = ndf
        cur_valid[k] = 1
        cur_taint[k] = 1 if tainted else 0
        if ap > max_seen:
            max_seen = ap
        if ndh > max_seen:
            max_seen = ndh
        if ndv > max_seen:
            max_seen = ndv
        if nde > max_seen:
            max_seen = nde
        if ndf > max_seen:
            max_seen = ndf
        cells += 1
    return cells, overflow_slot, max_seen


@njit(cache=True, nogil=True)
def edge_update(i0, j0, m, n, o, e, bw, cur_dh, cur_dv,
                lo_i, lo_j, lo_h, hi_i, hi_j, hi_h):
    """Advance the absolute-H trackers for the band's two in-grid edges.

    Boundary cells get closed-form H; interior edge cells are one grid step
    from the previous edge cell, so H advances by the cell's dV' - (o+e)
    (rightward step) or dH' - (o+e) (downward step).

    Returns (status, lo_i, lo_j, lo_h, hi_i, hi_j, hi_h, k_min, k_max).
    """
    oe = o + e
    k_min = max(0, -i0, j0 - n)
    k_max = min(bw - 1, m - i0, j0)
    if k_min > k_max:
        return ESCAPED, lo_i, lo_j, lo_h, hi_i, hi_j, hi_h, k_min, k_max
    li = i0 + k_min
    lj = j0 - k_min
    if li == 0:
        nlh = 0 if lj == 0 else -(o + lj * e)
    elif lj == 0:
        nlh = -(o + li * e)
    else:
        di = li - lo_i
        dj = lj - lo_j
        if di == 0 and dj == 1:
            nlh = lo_h + cur_dv[k_min] - oe
        elif di == 1 and dj == 0:
            nlh = lo_h + cur_dh[k_min] - oe
        else:
            return EDGE_BROKEN, lo_i, lo_j, lo_h, hi_i, hi_j, hi_h, k_min, k_max
    hi2 = i0 + k_max
    hj2 = j0 - k_max
    if hi2 == 0:
        nhh = 0 if hj2 == 0 else -(o + hj2 * e)
    elif hj2 == 0:
        nhh = -(o + hi2 * e)
    else:
        di = hi2 - hi_i
        dj = hj2 - hi_j
        if di == 0 and dj == 1:
            nhh = hi_h + cur_dv[k_max] - oe
        elif di == 1 and dj == 0:
            nhh = hi_h + cur_dh[k_max] - oe
        else:
            return EDGE_BROKEN, lo_i, lo_j, lo_h, hi_i, hi_j, hi_h, k_min, k_max
    return OK, li, lj, nlh, hi2, hj2, nhh, k_min, k_max


@njit(cache=True, nogil=True)
def banded_forward(r, q, A, B, o, e, cap, bw, adaptive, tie_right,
                   allow_survival_override,
                   flags, exte, extf, origins, dirs, h_lo_log, h_hi_log,
                   store_tb, out):
    """Run the full banded wavefront pass.

    out receives [status, forward_score, cells_computed, max_primed,
    stop_iteration, best_edge_score].
    """
    m = r.shape[0]
    n = q.shape[0]
    c = (bw - 1) // 2
    i0 = -c
    j0 = c
    origins[0, 0] = i0
    origins[0, 1] = j0

    cur_a = np.zeros(bw, dtype=np.int64)
    cur_dh = np.zeros(bw, dtype=np.int64)
    cur_dv = np.zeros(bw, dtype=np.int64)
    cur_de = np.zeros(bw, dtype=np.int64)
    cur_df = np.zeros(bw, dtype=np.int64)
    cur_valid = np.zeros(bw, dtype=np.uint8)
    cur_taint = np.zeros(bw, dtype=np.uint8)
    prv_dh = np.zeros(bw, dtype=np.int64)
    prv_dv = np.zeros(bw, dtype=np.int64)
    prv_de = np.zeros(bw, dtype=np.int64)
    prv_df = np.zeros(bw, dtype=np.int64)
    prv_valid = np.zeros(bw, dtype=np.uint8)
    prv_taint = np.zeros(bw, dtype=np.uint8)
    rw = np.empty(bw, dtype=np.uint8)
    qw = np.empty(bw, dtype=np.uint8)
    dummy_flags = np.empty(1, dtype=np.int8)
    dummy_ext = np.empty(1, dtype=np.uint8)

    # edge trackers: lo = smallest in-grid slot (rightmost cell), hi = largest
    lo_i = 0
    lo_j = 0
    lo_h = 0
    hi_i = 0
    hi_j = 0
    hi_h = 0
    best_edge = 0

    status = OK
    cells_total = 0
    max_primed = 0
    stop_iter = 0

    total = m + n
    for T in range(1, total + 1):
        if adaptive:
            move_right = lo_h > hi_h or (tie_right and lo_h == hi_h)
        else:
            # fixed schedule: strict alternation tracking the main diagonal
            move_right = T % 2 == 0
        if allow_survival_override:
            # when the band is wide enough for the whole next anti-diagonal,
            # keep it fully covered rather than wasting off-grid slots
            glo = T - n if T > n else 0
            ghi = m if m < T else T
            if ghi - glo < bw:
                i0_r = i0
                i0_d = i0 + 1
                covers_r = i0_r <= glo and i0_r + bw - 1 >= ghi
                covers_d = i0_d <= glo and i0_d + bw - 1 >= ghi
                if move_right and not covers_r and covers_d:
                    move_right = False
                elif (not move_right) and not covers_d and covers_r:
                    move_right = True
            # flip when the preferred move strands the band off the grid
            if move_right:
                nk_min = max(0, -i0, j0 + 1 - n)
                nk_max = min(bw - 1, m - i0, j0 + 1)
            else:
                nk_min = max(0, -i0 - 1, j0 - n)
                nk_max = min(bw - 1, m - i0 - 1, j0)
            if nk_min > nk_max:
                move_right = not move_right
        if move_right:
            j0 += 1
        else:
            i0 += 1
        dirs[T] = 1 if move_right else 0
        origins[T, 0] = i0
        origins[T, 1] = j0

        for k in range(bw):
            i = i0 + k
            j = j0 - k
            rw[k] = r[i - 1] if 1 <= i <= m else 255
            qw[k] = q[j - 1] if 1 <= j <= n else 255
        if store_tb:
            frow = flags[T]
            erow = exte[T]
            xrow = extf[T]
        else:
            frow = dummy_flags
            erow = dummy_ext
            xrow = dummy_ext
        cells, ovf, mx = band_step(
            rw, qw, i0, j0, m, n, A, B, o, e, cap, move_right,
            prv_dh, prv_dv, prv_de, prv_df, prv_valid, prv_taint,
            cur_a, cur_dh, cur_dv, cur_de, cur_df, cur_valid, cur_taint,
            frow, erow, xrow, store_tb)
        cells_total += cells
        if mx > max_primed:
            max_primed = mx
        if ovf >= 0:
            status = OVERFLOWED
            stop_iter = T
            break

        est, lo_i, lo_j, lo_h, hi_i, hi_j, hi_h, k_min, k_max = edge_update(
            i0, j0, m, n, o, e, bw, cur_dh, cur_dv,
            lo_i, lo_j, lo_h, hi_i, hi_j, hi_h)
        if est != OK:
            status = est
            stop_iter = T
            break
        h_lo_log[T] = lo_h
        h_hi_log[T] = hi_h
        if lo_h > best_edge:
            best_edge = lo_h
        if hi_h > best_edge:
            best_edge = hi_h

        tmp = prv_dh; prv_dh = cur_dh; cur_dh = tmp
        tmp = prv_dv; prv_dv = cur_dv; cur_dv = tmp
        tmp = prv_de; prv_de = cur_de; cur_de = tmp
        tmp = prv_df; prv_df = cur_df; cur_df = tmp
        tmpb = prv_valid; prv_valid = cur_valid; cur_valid = tmpb
        tmpb = prv_taint; prv_taint = cur_taint; cur_taint = tmpb

    fwd = MISSING
    if status == OK:
        if lo_i == m and lo_j == n:
            fwd = lo_h
            stop_iter = total
        else:
            status = ESCAPED
            stop_iter = total
    out[0] = status
    out[1] = fwd
    out[2] = cells_total
    out[3] = max_primed
    out[4] = stop_iter
    out[5] = best_edge


@njit(cache=True, nogil=True)
def edit_dp_kernel(r, q):
    """Unit-cost Levenshtein DP; returns the full distance grid."""
    m = r.shape[0]
    n = q.shape[0]
    D = np.empty((m + 1, n + 1), dtype=np.int32)
    for j in range(n + 1):
        D[0, j] = j
    for i in range(1, m + 1):
        D[i, 0] = i
        ri = r[i - 1]
        for j in range(1, n + 1):
            best = D[i - 1, j - 1] + (0 if ri == q[j - 1] else 1)
            t = D[i - 1, j] + 1
            if t < best:
                best = t
            t = D[i, j - 1] + 1
            if t < best:
                best = t
            D[i, j] = best
    return D


@njit(cache=True, nogil=True)
def banded_edit_kernel(r, q, dmin, dmax, flags, store_tb, out):
    """Banded Levenshtein over diagonal offsets j - i in [dmin, dmax].

    flags[i, j - i - dmin] records the arg-min (0=M, 1=D, 2=I) when
    store_tb is set.  out receives [distance, cells_computed].
    """
    m = r.shape[0]
    n = q.shape[0]
    width = dmax - dmin + 1
    prev = np.empty(width, dtype=np.int32)
    cur = np.empty(width, dtype=np.int32)
    cells = 0
    for x in range(width):
        j = dmin + x
        prev[x] = j if 0 <= j <= n else EDIT_INF
        if store_tb and 0 <= j <= n:
            flags[0, x] = 2 if j > 0 else -1
    for i in range(1, m + 1):
        ri = r[i - 1]
        for x in range(width):
            cur[x] = EDIT_INF
        jlo = i + dmin
        if jlo < 0:
            jlo = 0
        jhi = i + dmax
        if jhi > n:
            jhi = n
        for j in range(jlo, jhi + 1):
            x = j - i - dmin
            if j == 0:
                cur[x] = i
                if store_tb:
                    flags[i, x] = 1
                continue
            best = EDIT_INF
            op = -1
            d = prev[x] if prev[x] < EDIT_INF else EDIT_INF
            if d < EDIT_INF:
                v = d + (0 if ri == q[j - 1] else 1)
                if v < best:
                    best = v
                    op = 0
            if x + 1 < width and prev[x + 1] < EDIT_INF:
                v = prev[x + 1] + 1
                if v < best:
                    best = v
                    op = 1
            if x - 1 >= 0 and cur[x - 1] < EDIT_INF:
                v = cur[x - 1] + 1
                if v < best:
                    best = v
                    op = 2
            cur[x] = best
            if store_tb:
                flags[i, x] = op
            cells += 1
        for x in range(width):
            prev[x] = cur[x]
    xf = n - m - dmin
    out[0] = prev[xf]
    out[1] = cells
