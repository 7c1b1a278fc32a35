"""Pure NumPy successive-cancellation kernel (fallback backend).

Mirrors ``_sc_core.pyx`` operation for operation so both backends produce
bit-identical decisions: XOR convolutions accumulate in ascending order
and every likelihood vector is rescaled by its maximum.
"""
import numpy as np


def _rescale(v):
    mx = v.max(axis=-1, keepdims=True)
    np.divide(v, mx, out=v, where=mx > 0)
    return v


def sc_decode_batch(lik, free_mask, frozen, genie=None, want_post=False):
    """Decode a batch of blocks.

    lik : (T, n, q) float64, P(y_j | x_j = u) per trial and position.
    free_mask, frozen : (n,) int64, users carrying data and frozen values.
    genie : (T, n) int64 true u, or None for the standalone decoder.

    Returns decisions (T, n) and, if requested, normalised leaf posteriors
    (T, n, q).
    """
    lik = np.asarray(lik, dtype=np.float64)
    T, n, q = lik.shape
    free_mask = np.asarray(free_mask, dtype=np.int64)
    frozen = np.asarray(frozen, dtype=np.int64)
    if genie is not None:
        genie = np.asarray(genie, dtype=np.int64)
    decisions = np.zeros((T, n), dtype=np.int64)
    post = np.zeros((T, n, q)) if want_post else None
    symbols = np.arange(q, dtype=np.int64)
    xor_tab = symbols[:, None] ^ symbols[None, :]

    def leaf(L, i):
        fixed = ~free_mask[i] & (q - 1)
        allowed = (symbols & fixed) == (frozen[i] & fixed)
        scores = np.where(allowed[None, :], L, -1.0)
        decisions[:, i] = np.argmax(scores, axis=1)
        if want_post:
            tot = L.sum(axis=1, keepdims=True)
            post[:, i] = np.divide(L, tot, out=np.zeros_like(L), where=tot > 0)
        if genie is not None:
            return genie[:, i].copy()
        return decisions[:, i].copy()

    def rec(L, lo):
        n_node = L.shape[1]
        if n_node == 1:
            return leaf(L[:, 0], lo)[:, None]
        half = n_node // 2
        L1, L2 = L[:, :half], L[:, half:]
        Lm = np.zeros_like(L1)
        for u2 in range(q):
            Lm += L1[:, :, xor_tab[u2]] * L2[:, :, u2:u2 + 1]
        s = rec(_rescale(Lm), lo)
        Lp = np.take_along_axis(L1, s[:, :, None] ^ symbols, axis=2) * L2
        t = rec(_rescale(Lp), lo + half)
        return np.concatenate([s ^ t, t], axis=1)

    if T:
        rec(lik, 0)
    return (decisions, post) if want_post else decisions


def polar_transform_bits(u):
    """x = u G_n over F2 along the last axis (integer symbols XOR-ed)."""
    x = np.array(u, dtype=np.int64, copy=True)
    n = x.shape[-1]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < n:
        v = x.reshape(x.shape[:-1] + (n // (2 * h), 2, h))
        v[..., 0, :] ^= v[..., 1, :]
        h *= 2
    return x
