"""Hot numeric kernels with a JIT fast path and a pure-numpy fallback.

The three inner loops that dominate runtime live here: the GF(2) butterfly
transform, successive-cancellation decoding, and the greedy degrading merge
used during channel quantization.  Each is written once, in numba-compatible
numpy style, and compiled with ``numba.njit`` unless the environment variable
``POLARLATTICE_NO_NUMBA=1`` selects the interpreted fallback.  Both paths run
the same source, so results are identical either way.

The module exposes ``<name>`` (the active implementation), ``<name>_py``
(always the interpreted version), and ``<name>_jit`` (``None`` when numba is
unavailable or disabled) for benchmarking.
"""

import math
import os

import numpy as np

_LN2 = math.log(2.0)
# probabilities below this are clamped to zero during merges
_PROB_FLOOR = 1e-300


def numba_disabled_by_env() -> bool:
    return os.environ.get("POLARLATTICE_NO_NUMBA", "").strip().lower() in {"1", "true", "yes"}


NUMBA_ACTIVE = not numba_disabled_by_env()
if NUMBA_ACTIVE:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ACTIVE = False


# ---------------------------------------------------------------------------
# GF(2) butterfly transform
# ---------------------------------------------------------------------------

def _polar_transform_impl(bits):
    """In-place butterfly x = u G over GF(2), narrowest stage first.

    After the final (widest) stage, position j of the left half holds
    left[j] XOR right[j] and the right half is passed through, which is the
    block structure the decoder's check/variable schedule assumes.
    """
    n = bits.shape[0]
    step = 2
    while step <= n:
        half = step >> 1
        view = bits.reshape(n // step, step)
        view[:, :half] = np.bitwise_xor(view[:, :half], view[:, half:step])
        step <<= 1
    return bits


# ---------------------------------------------------------------------------
# successive-cancellation decoding
# ---------------------------------------------------------------------------

def _sc_decode_impl(chan_llr, frozen, clamp):
    """Decode one block under successive cancellation.

    chan_llr : float64[n], log f(y|0) - log f(y|1) per code symbol
    frozen   : uint8[n], 1 where the input bit is pinned to zero
    clamp    : saturate channel log-ratios to +-clamp before decoding

    Returns (u_hat, x_hat) where x_hat is the re-encoded codeword.  Ties
    (ratio exactly zero) resolve to bit 0.  The check update is the exact
    log-domain formula, not the min-sum approximation, so decisions match
    brute-force sequential marginalization.
    """
    n = chan_llr.shape[0]
    m = 0
    while (1 << m) < n:
        m += 1
    llr = np.zeros((m + 1, n), dtype=np.float64)
    bits = np.zeros((m + 1, n), dtype=np.uint8)
    llr[0, :] = np.minimum(np.maximum(chan_llr, -clamp), clamp)
    u_hat = np.zeros(n, dtype=np.uint8)

    for i in range(n):
        # refresh levels below the first branch point relative to bit i-1
        if i == 0:
            s0 = 1
        else:
            t = 0
            while ((i >> t) & 1) == 0:
                t += 1
            s0 = m - t
        for s in range(s0, m + 1):
            length = 1 << (m - s)
            v = i >> (m - s)
            if (v & 1) == 0:
                base = v * length
                a = llr[s - 1, base:base + length]
                b = llr[s - 1, base + length:base + 2 * length]
                # exact check-node combination of two log-ratios
                mag = np.minimum(np.abs(a), np.abs(b))
                llr[s, base:base + length] = (
                    np.sign(a) * np.sign(b) * mag
                    + np.log1p(np.exp(-np.abs(a + b)))
                    - np.log1p(np.exp(-np.abs(a - b)))
                )
            else:
                base = (v - 1) * length
                a = llr[s - 1, base:base + length]
                b = llr[s - 1, base + length:base + 2 * length]
                u = bits[s, base:base + length]
                llr[s, base + length:base + 2 * length] = b + (1.0 - 2.0 * u) * a

        if frozen[i] == 1 or llr[m, i] >= 0.0:
            u_hat[i] = 0
        else:
            u_hat[i] = 1
        bits[m, i] = u_hat[i]

        # fold decided bits upward while closing right children
        s = m
        v = i
        while s > 0 and (v & 1) == 1:
            length = 1 << (m - s)
            base = (v - 1) * length
            left = bits[s, base:base + length]
            right = bits[s, base + length:base + 2 * length]
            bits[s - 1, base:base + length] = np.bitwise_xor(left, right)
            bits[s - 1, base + length:base + 2 * length] = right
            v >>= 1
            s -= 1

    x_hat = bits[0, :].copy()
    return u_hat, x_hat


# ---------------------------------------------------------------------------
# degrading merge
# ---------------------------------------------------------------------------

def _pair_mi_term(a, b):
    """Mutual-information contribution of one symbol pair (and its mirror)."""
    s = a + b
    if s <= 0.0:
        return 0.0
    out = 0.0
    if a > 0.0:
        out += a * math.log2(2.0 * a / s)
    if b > 0.0:
        out += b * math.log2(2.0 * b / s)
    return out


def _merge_pairs_impl(a_in, b_in, target_pairs):
    """Greedy capacity-preserving merge down to ``target_pairs`` pairs.

    a_in, b_in : float64[p] sorted by posterior a/(a+b) descending, a >= b
    Repeatedly merges the adjacent pair with the smallest capacity loss
    (ties to the smaller index) until the count reaches the target.  Order
    is preserved; merged pairs stay adjacent-monotone in likelihood ratio.
    """
    p = a_in.shape[0]
    a = a_in.copy()
    b = b_in.copy()
    if p <= target_pairs:
        return a, b

    nxt = np.empty(p, dtype=np.int64)
    prv = np.empty(p, dtype=np.int64)
    ver = np.zeros(p, dtype=np.int64)
    alive = np.ones(p, dtype=np.uint8)
    for i in range(p):
        nxt[i] = i + 1
        prv[i] = i - 1
    nxt[p - 1] = -1

    cap = 3 * p + 8
    h_loss = np.empty(cap, dtype=np.float64)
    h_idx = np.empty(cap, dtype=np.int64)
    h_ver = np.empty(cap, dtype=np.int64)
    h_size = 0

    # inline binary heap keyed on (loss, index)
    for i in range(p - 1):
        loss = (
            _pair_mi_term(a[i], b[i])
            + _pair_mi_term(a[i + 1], b[i + 1])
            - _pair_mi_term(a[i] + a[i + 1], b[i] + b[i + 1])
        )
        j = h_size
        h_size += 1
        h_loss[j] = loss
        h_idx[j] = i
        h_ver[j] = 0
        while j > 0:
            parent = (j - 1) >> 1
            if h_loss[j] < h_loss[parent] or (
                h_loss[j] == h_loss[parent] and h_idx[j] < h_idx[parent]
            ):
                h_loss[j], h_loss[parent] = h_loss[parent], h_loss[j]
                h_idx[j], h_idx[parent] = h_idx[parent], h_idx[j]
                h_ver[j], h_ver[parent] = h_ver[parent], h_ver[j]
                j = parent
            else:
                break

    remaining = p
    while remaining > target_pairs and h_size > 0:
        # pop root
        loss = h_loss[0]
        i = h_idx[0]
        v = h_ver[0]
        h_size -= 1
        if h_size > 0:
            h_loss[0] = h_loss[h_size]
            h_idx[0] = h_idx[h_size]
            h_ver[0] = h_ver[h_size]
            j = 0
            while True:
                lc = 2 * j + 1
                rc = lc + 1
                best = j
                if lc < h_size and (
                    h_loss[lc] < h_loss[best]
                    or (h_loss[lc] == h_loss[best] and h_idx[lc] < h_idx[best])
                ):
                    best = lc
                if rc < h_size and (
                    h_loss[rc] < h_loss[best]
                    or (h_loss[rc] == h_loss[best] and h_idx[rc] < h_idx[best])
                ):
                    best = rc
                if best == j:
                    break
                h_loss[j], h_loss[best] = h_loss[best], h_loss[j]
                h_idx[j], h_idx[best] = h_idx[best], h_idx[j]
                h_ver[j], h_ver[best] = h_ver[best], h_ver[j]
                j = best

        if alive[i] == 0 or v != ver[i] or nxt[i] == -1:
            continue

        # merge i with its right neighbour
        j2 = nxt[i]
        a[i] += a[j2]
        b[i] += b[j2]
        if a[i] < _PROB_FLOOR:
            a[i] = 0.0
        if b[i] < _PROB_FLOOR:
            b[i] = 0.0
        alive[j2] = 0
        nxt[i] = nxt[j2]
        if nxt[j2] != -1:
            prv[nxt[j2]] = i
        ver[i] += 1
        if prv[i] != -1:
            ver[prv[i]] += 1
        remaining -= 1

        # push refreshed candidates for (i, nxt[i]) and (prv[i], i)
        for c in range(2):
            if c == 0:
                left = i
            else:
                left = prv[i]
            if left == -1 or nxt[left] == -1:
                continue
            right = nxt[left]
            loss = (
                _pair_mi_term(a[left], b[left])
                + _pair_mi_term(a[right], b[right])
                - _pair_mi_term(a[left] + a[right], b[left] + b[right])
            )
            j = h_size
            h_size += 1
            h_loss[j] = loss
            h_idx[j] = left
            h_ver[j] = ver[left]
            while j > 0:
                parent = (j - 1) >> 1
                if h_loss[j] < h_loss[parent] or (
                    h_loss[j] == h_loss[parent] and h_idx[j] < h_idx[parent]
                ):
                    h_loss[j], h_loss[parent] = h_loss[parent], h_loss[j]
                    h_idx[j], h_idx[parent] = h_idx[parent], h_idx[j]
                    h_ver[j], h_ver[parent] = h_ver[parent], h_ver[j]
                    j = parent
                else:
                    break

    a_out = np.empty(remaining, dtype=np.float64)
    b_out = np.empty(remaining, dtype=np.float64)
    k = 0
    i = 0
    while i != -1:
        a_out[k] = a[i]
        b_out[k] = b[i]
        k += 1
        i = nxt[i]
    return a_out, b_out


# ---------------------------------------------------------------------------
# path selection
# ---------------------------------------------------------------------------

polar_transform_py = _polar_transform_impl
sc_decode_py = _sc_decode_impl
merge_pairs_py = _merge_pairs_impl

polar_transform_jit = None
sc_decode_jit = None
merge_pairs_jit = None

if NUMBA_ACTIVE:
    _pair_mi_term = _njit(cache=True, nogil=True)(_pair_mi_term)
    polar_transform_jit = _njit(cache=True, nogil=True)(_polar_transform_impl)
    sc_decode_jit = _njit(cache=True, nogil=True)(_sc_decode_impl)
    merge_pairs_jit = _njit(cache=True, nogil=True)(_merge_pairs_impl)
    polar_transform = polar_transform_jit
    sc_decode = sc_decode_jit
    merge_pairs = merge_pairs_jit
else:
    polar_transform = polar_transform_py
    sc_decode = sc_decode_py
    merge_pairs = merge_pairs_py


def warmup():
    """Trigger JIT compilation on tiny inputs so timing stays out of hot paths."""
    polar_transform(np.zeros(4, dtype=np.uint8))
    sc_decode(np.zeros(4, dtype=np.float64), np.ones(4, dtype=np.uint8), 40.0)
    merge_pairs(
        np.array([0.4, 0.3, 0.2], dtype=np.float64),
        np.array([0.0, 0.05, 0.05], dtype=np.float64),
        2,
    )
