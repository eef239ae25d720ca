"""NumPy implementations of the hot kernels, used when the compiled
extension is unavailable."""

import numpy as np

_CHUNK_ELEMS = 1 << 22


def mamdani_table(deg1, deg2, rules, out_mf, grid, xs1, xs2):
    """Centroid outputs of a two-input Mamdani system for every input pair.

    deg1 : (N1, K) membership degrees of the first input samples
    deg2 : (N2, K) membership degrees of the second input samples
    rules : (R, 4) int rows ``(label1, label2, is_or, out_label)``
    out_mf : (K, S) output membership functions sampled on ``grid``
    grid : (S,) output-domain sample positions
    xs1, xs2 : crisp input values, used for the ``(x1 + x2) / 2`` fallback
        when no rule fires

    Returns an (N1, N2) array.
    """
    deg1 = np.asarray(deg1, dtype=np.float64)
    deg2 = np.asarray(deg2, dtype=np.float64)
    out_mf = np.asarray(out_mf, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    n1, n2 = deg1.shape[0], deg2.shape[0]
    k, s = out_mf.shape

    strength = np.zeros((k, n1, n2))
    for l1, l2, is_or, out in np.asarray(rules, dtype=np.intp):
        op = np.maximum if is_or else np.minimum
        np.maximum(strength[out], op.outer(deg1[:, l1], deg2[:, l2]), out=strength[out])

    table = np.empty((n1, n2))
    rows = max(1, _CHUNK_ELEMS // max(1, n2 * s * k))
    for start in range(0, n1, rows):
        stop = min(n1, start + rows)
        sk = strength[:, start:stop, :, None]              # (K, r, N2, 1)
        agg = np.minimum(sk, out_mf[:, None, None, :]).max(axis=0)  # (r, N2, S)
        den = agg.sum(axis=-1)
        num = agg @ grid
        with np.errstate(invalid="ignore", divide="ignore"):
            table[start:stop] = num / den
        dead = den == 0
        if dead.any():
            mean = 0.5 * (np.asarray(xs1, dtype=np.float64)[start:stop, None] + np.asarray(xs2, dtype=np.float64)[None, :])
            table[start:stop][dead] = np.broadcast_to(mean, dead.shape)[dead]
    return table
