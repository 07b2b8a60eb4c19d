"""Polar code construction and successive-cancellation decoding.

Bit-channel reliabilities are evolved through the quantized surrogate: each
of the m synthesis stages applies the check (minus) or variable (plus)
combination followed by a degrading merge back to the symbol budget.  Leaf i
(0-based) is reached by reading the bits of i most-significant first, 0
branching minus and 1 branching plus; that same ordering is what the
decoder's schedule realizes, with the bit-reversal absorbed into the
butterfly encoder.  The pairing is pinned by tests: a noiseless loopback
must reproduce the message, and decisions must match exhaustive sequential
marginalization on small blocks.

Bhattacharyya figures evolved this way are upper bounds on the true ones,
since every merge degrades, so free-set choices and the summed block-error
bound stay conservative.
"""

import csv
import math

import numpy as np

from . import _kernels
from .quantize import (
    DiscreteBms,
    bms_bhattacharyya,
    bms_capacity,
    degrading_merge,
    polarize_minus,
    polarize_plus,
)

#: channel log-ratios are saturated to this magnitude before decoding
LLR_CLAMP = 40.0
#: largest supported block exponent (n = 2^m)
MAX_M = 20


class BitChannelMetrics:
    """Per-index reliability figures of the n synthesized bit channels."""

    def __init__(self, z_bound, capacity):
        self.z_bound = np.asarray(z_bound, dtype=np.float64)
        self.capacity = np.asarray(capacity, dtype=np.float64)
        if self.z_bound.shape != self.capacity.shape or self.z_bound.ndim != 1:
            raise ValueError("metric arrays must be matching 1-d arrays")

    @property
    def n(self) -> int:
        return self.z_bound.size

    def dump_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "z_bound", "capacity"])
            for i in range(self.n):
                writer.writerow([i, repr(float(self.z_bound[i])), repr(float(self.capacity[i]))])


def evolve_metrics(base: DiscreteBms, m: int, mu: int) -> BitChannelMetrics:
    """Synthesize all 2^m bit channels of ``base`` and collect their figures.

    Depth-first traversal keeps only one channel per level in memory, so the
    footprint is O(m * mu) regardless of block length.
    """
    if m < 1:
        raise ValueError("need at least one polarization stage")
    if m > MAX_M:
        raise ValueError(f"block length 2^{m} exceeds the 2^{MAX_M} resource guard")
    n = 1 << m
    z = np.empty(n)
    cap = np.empty(n)
    leaf = 0
    # stack of (channel, depth); push plus before minus so minus pops first,
    # which makes leaves emerge in index order
    stack = [(base, 0)]
    while stack:
        ch, depth = stack.pop()
        if depth == m:
            z[leaf] = bms_bhattacharyya(ch)
            cap[leaf] = bms_capacity(ch)
            leaf += 1
            continue
        stack.append((polarize_plus(ch, mu), depth + 1))
        stack.append((polarize_minus(ch, mu), depth + 1))
    return BitChannelMetrics(z, cap)


class PolarCode:
    """Block of length n = 2^m with a free index set; other inputs pinned to 0."""

    def __init__(self, m: int, free_set):
        if m < 1 or m > MAX_M:
            raise ValueError(f"m must lie in [1, {MAX_M}]")
        self.m = int(m)
        self.n = 1 << self.m
        fs = np.unique(np.asarray(free_set, dtype=np.int64))
        if fs.size and (fs[0] < 0 or fs[-1] >= self.n):
            raise ValueError("free indices out of range")
        self.free_set = fs

    @property
    def k(self) -> int:
        return self.free_set.size

    @property
    def rate(self) -> float:
        return self.k / self.n

    def frozen_mask(self):
        mask = np.ones(self.n, dtype=np.uint8)
        mask[self.free_set] = 0
        return mask

    def to_jsonable(self):
        return {"m": self.m, "free_set": [int(i) for i in self.free_set]}

    @classmethod
    def from_jsonable(cls, obj) -> "PolarCode":
        return cls(int(obj["m"]), obj["free_set"])

    def __repr__(self):
        return f"PolarCode(n={self.n}, k={self.k})"


def select_free_set(
    metrics: BitChannelMetrics,
    m: int,
    threshold: float | None = None,
    rate_k: int | None = None,
) -> PolarCode:
    """Choose free indices either by reliability threshold or by count.

    threshold : keep every index whose Bhattacharyya bound is strictly below
    rate_k    : keep the ``rate_k`` most reliable indices (ties toward the
                smaller index)
    Exactly one selector must be given.
    """
    if (threshold is None) == (rate_k is None):
        raise ValueError("give exactly one of threshold or rate_k")
    if metrics.n != 1 << m:
        raise ValueError("metrics length does not match block length")
    if threshold is not None:
        if threshold < 0:
            raise ValueError("threshold must be nonnegative")
        free = np.flatnonzero(metrics.z_bound < threshold)
    else:
        if not 0 <= rate_k <= metrics.n:
            raise ValueError("rate_k out of range")
        order = np.argsort(metrics.z_bound, kind="stable")
        free = np.sort(order[:rate_k])
    return PolarCode(m, free)


def encode(code: PolarCode, info_bits) -> np.ndarray:
    """Map information bits (scattered on the free set in index order)
    through the GF(2) butterfly. O(n log n)."""
    info = np.asarray(info_bits)
    if info.shape != (code.k,):
        raise ValueError(f"expected {code.k} information bits, got shape {info.shape}")
    if np.any((info != 0) & (info != 1)):
        raise ValueError("information bits must be 0/1")
    u = np.zeros(code.n, dtype=np.uint8)
    u[code.free_set] = info.astype(np.uint8)
    return _kernels.polar_transform(u)


def sc_decode(code: PolarCode, llrs) -> tuple[np.ndarray, np.ndarray]:
    """Successive-cancellation decode one block of channel log-ratios.

    Returns (info_bits, codeword).  The codeword is the re-encoding of the
    full decision vector, so it is always a member of the code.
    """
    llr_arr = np.ascontiguousarray(llrs, dtype=np.float64)
    if llr_arr.shape != (code.n,):
        raise ValueError(f"expected {code.n} channel log-ratios")
    u_hat, x_hat = _kernels.sc_decode(llr_arr, code.frozen_mask(), LLR_CLAMP)
    return u_hat[code.free_set], x_hat


def code_error_bound(code: PolarCode, metrics: BitChannelMetrics) -> float:
    """Union bound on block error under successive cancellation: the summed
    Bhattacharyya bounds of the free indices, clipped to [0, 1]."""
    if metrics.n != code.n:
        raise ValueError("metrics length does not match the code")
    return float(min(1.0, metrics.z_bound[code.free_set].sum()))
