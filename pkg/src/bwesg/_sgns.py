"""JIT-compiled inner loop for skip-gram negative-sampling training.

One call processes one (already subsampled) document: for every position
``n`` with window budget ``tcs[n]``, each in-window neighbor forms a
positive pair with the pivot, consuming ``k`` pre-drawn negative indices
from ``negs``.  A step computes every sigmoid and the pivot delta from
pre-update rows, then applies the context-row updates (gradients on
duplicate rows accumulate) and finally the pivot-row update, i.e. one
exact gradient-ascent step on the local objective of the pair and its
negatives.

All randomness (window budgets, negatives) is drawn by the caller, so
this function is pure float arithmetic in a fixed order: single-threaded
training is bit-reproducible.  The function releases the GIL, which is
what makes lock-free multi-worker training possible; concurrent callers
may race on the shared matrices by design.
"""

import numpy as np
from numba import njit


@njit(nogil=True, cache=True)
def train_document(pivot, ctx, kept, tcs, negs, k, lr, sig_table, max_exp):
    d = pivot.shape[1]
    length = kept.shape[0]
    bins = sig_table.shape[0] - 1
    scale = bins / (2.0 * max_exp)
    cursor = 0
    dw = np.empty(d, dtype=np.float32)
    wrow = np.empty(d, dtype=np.float32)
    gbuf = np.empty(k + 1, dtype=np.float32)
    rows = np.empty(k + 1, dtype=np.int64)
    for n in range(length):
        t = tcs[n]
        w_idx = kept[n]
        for j in range(d):
            wrow[j] = pivot[w_idx, j]
        lo = n - t
        if lo < 0:
            lo = 0
        hi = n + t
        if hi > length - 1:
            hi = length - 1
        for m in range(lo, hi + 1):
            if m == n:
                continue
            rows[0] = kept[m]
            for i in range(k):
                rows[i + 1] = negs[cursor + i]
            cursor += k
            for j in range(d):
                dw[j] = np.float32(0.0)
            for i in range(k + 1):
                r = rows[i]
                f = np.float32(0.0)
                for j in range(d):
                    f += wrow[j] * ctx[r, j]
                if f >= max_exp:
                    s = sig_table[bins]
                elif f <= -max_exp:
                    s = sig_table[0]
                else:
                    s = sig_table[int((f + max_exp) * scale)]
                g = np.float32(((1.0 if i == 0 else 0.0) - s) * lr)
                gbuf[i] = g
                for j in range(d):
                    dw[j] += g * ctx[r, j]
            for i in range(k + 1):
                r = rows[i]
                g = gbuf[i]
                for j in range(d):
                    ctx[r, j] += g * wrow[j]
            # keep the buffered pivot row current for the next pair
            for j in range(d):
                wrow[j] += dw[j]
                pivot[w_idx, j] = wrow[j]
    return cursor
