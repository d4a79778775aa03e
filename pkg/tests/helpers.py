"""Independent reference routines shared by the tests."""

import numpy as np


def dense_rank(m) -> int:
    """GF(2) rank by plain row reduction on a 0/1 integer array."""
    a = np.array(m, dtype=np.uint8) % 2
    if a.size == 0:
        return 0
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def dense_bits(words, ncols):
    """Unpack a (rows, W) uint64 array into a (rows, ncols) 0/1 array."""
    words = np.asarray(words, dtype=np.uint64)
    out = np.zeros((words.shape[0], ncols), dtype=np.uint8)
    for j in range(ncols):
        out[:, j] = (words[:, j >> 6] >> np.uint64(j & 63)) & np.uint64(1)
    return out
