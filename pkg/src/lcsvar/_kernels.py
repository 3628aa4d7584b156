"""Compiled inner loops. Inputs are contiguous int64 letter arrays."""
import numpy as np
from numba import njit

_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True)
def dp_lcs_length(a, b):
    """Two-row LCS dynamic program."""
    nb = b.size
    prev = np.zeros(nb + 1, np.int64)
    cur = np.zeros(nb + 1, np.int64)
    for i in range(a.size):
        ai = a[i]
        cur[0] = 0
        for j in range(1, nb + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            elif prev[j] >= cur[j - 1]:
                cur[j] = prev[j]
            else:
                cur[j] = cur[j - 1]
        prev, cur = cur, prev
    return prev[nb]


@njit(cache=True)
def dp_suffix_table(a, b):
    """``S[i, j]`` = LCS length of ``a[i:]`` and ``b[j:]``."""
    na, nb = a.size, b.size
    S = np.zeros((na + 1, nb + 1), np.int32)
    for i in range(na - 1, -1, -1):
        ai = a[i]
        for j in range(nb - 1, -1, -1):
            if ai == b[j]:
                S[i, j] = S[i + 1, j + 1] + 1
            elif S[i + 1, j] >= S[i, j + 1]:
                S[i, j] = S[i + 1, j]
            else:
                S[i, j] = S[i, j + 1]
    return S


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(cache=True)
def build_masks(b, n_alpha):
    W = (b.size + 63) >> 6
    masks = np.zeros((n_alpha, max(W, 1)), np.uint64)
    for j in range(b.size):
        masks[b[j], j >> 6] |= _ONE << np.uint64(j & 63)
    return masks


@njit(cache=True)
def _advance(src, dst, mask):
    # dst = (V + (V & M)) | (V & ~M), multiword with carry.
    carry = _ZERO
    for w in range(src.size):
        v = src[w]
        u = v & mask[w]
        s = v + u
        c1 = s < v
        s2 = s + carry
        c2 = s2 < s
        dst[w] = s2 | (v & ~u)
        carry = _ONE if (c1 or c2) else _ZERO


@njit(cache=True)
def _zeros_low_bits(V, nb):
    ones = np.uint64(0)
    full = nb >> 6
    for w in range(full):
        ones += _popcount(V[w])
    rem = nb & 63
    if rem:
        low = (_ONE << np.uint64(rem)) - _ONE
        ones += _popcount(V[full] & low)
    return nb - np.int64(ones)


@njit(cache=True)
def bitparallel_lcs_length(a, b, n_alpha):
    """Bit-vector LCS: one multiword add per letter of ``a``."""
    nb = b.size
    if nb == 0 or a.size == 0:
        return 0
    masks = build_masks(b, n_alpha)
    W = masks.shape[1]
    V = np.full(W, _ALL)
    tmp = np.empty(W, np.uint64)
    for i in range(a.size):
        _advance(V, tmp, masks[a[i]])
        V, tmp = tmp, V
    return _zeros_low_bits(V, nb)


@njit(cache=True)
def chain_profile(U, T, y, n_alpha):
    """LCS of every chain word ``Z(k)`` against ``y``, k = 0..n.

    Keeps the bit-vector state after each prefix of the current word; an
    insertion at position t only replays rows t..k.
    """
    n = U.size
    nb = y.size
    L = np.zeros(n + 1, np.int64)
    if nb == 0:
        return L
    masks = build_masks(y, n_alpha)
    W = masks.shape[1]
    states = np.empty((n + 1, W), np.uint64)
    for w in range(W):
        states[0, w] = _ALL
    Z = np.empty(n, np.int64)
    for k in range(1, n + 1):
        pos = k if k <= 2 else T[k - 1]
        for q in range(k - 1, pos - 1, -1):
            Z[q] = Z[q - 1]
        Z[pos - 1] = U[k - 1]
        for i in range(pos, k + 1):
            _advance(states[i - 1], states[i], masks[Z[i - 1]])
        L[k] = _zeros_low_bits(states[k], nb)
    return L
