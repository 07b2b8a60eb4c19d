"""Finite-alphabet surrogates of the folded channel, evolved by degrading.

A binary-input symmetric channel is stored as likelihood pairs
(a_i, b_i) = (P(y_i|0), P(y_i|1)) for the half of the output alphabet with
likelihood ratio at least one; each listed symbol has an implicit mirror
with the probabilities swapped, so sum_i (a_i + b_i) = 1 covers the whole
alphabet.  Quantizing by integrating the continuous densities over output
intervals, and merging adjacent pairs with the smallest mutual-information
loss, both produce channels degraded with respect to the original, so every
reliability figure computed from them (capacity below, Bhattacharyya above)
stays on the safe side of the true value.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import _kernels
from .channel import Mod2AwgnChannel

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class QuantizationConfig:
    """Output-quantization knobs: ``intervals`` uniform cells per unit of the
    folded output, and a total symbol budget ``mu`` kept through evolution."""

    intervals: int = 32
    mu: int = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.intervals < 2:
            raise ValueError("need at least 2 quantization intervals")
        if self.mu is None:
            object.__setattr__(self, "mu", 2 * self.intervals)
        if self.mu < 4:
            raise ValueError("symbol budget mu must be at least 4")


class DiscreteBms:
    """Symmetric binary-input channel over a finite alphabet of mirror pairs."""

    def __init__(self, a, b, validate: bool = True):
        self.a = np.asarray(a, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        if validate:
            self.validate()

    @property
    def pair_count(self) -> int:
        return self.a.size

    @property
    def symbol_count(self) -> int:
        return 2 * self.a.size

    def validate(self):
        a, b = self.a, self.b
        if a.shape != b.shape or a.ndim != 1 or a.size == 0:
            raise ValueError("likelihood pairs must be matching 1-d arrays")
        if np.any(b < 0.0) or np.any(a < b):
            raise ValueError("each pair needs a >= b >= 0")
        total = float(np.sum(a) + np.sum(b))
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"alphabet mass {total} differs from 1 beyond tolerance")
        post = _posterior(a, b)
        if np.any(np.diff(post) > 0.0):
            raise ValueError("pairs must be sorted by likelihood ratio, descending")

    # -- constructors -----------------------------------------------------

    @classmethod
    def bsc(cls, p: float) -> "DiscreteBms":
        if not 0.0 <= p <= 0.5:
            raise ValueError("crossover must lie in [0, 0.5]")
        return cls([1.0 - p], [p])

    @classmethod
    def bec(cls, eps: float) -> "DiscreteBms":
        """Erasure channel; the erasure symbol is split into a mirror pair."""
        if not 0.0 <= eps <= 1.0:
            raise ValueError("erasure probability must lie in [0, 1]")
        if eps == 0.0:
            return cls([1.0], [0.0])
        if eps == 1.0:
            return cls([0.5], [0.5])
        return cls([1.0 - eps, eps / 2.0], [0.0, eps / 2.0])

    @classmethod
    def noiseless(cls) -> "DiscreteBms":
        return cls([1.0], [0.0])

    @classmethod
    def useless(cls) -> "DiscreteBms":
        return cls([0.5], [0.5])

    # -- serialization ----------------------------------------------------

    def to_jsonable(self):
        return [[float(x), float(y)] for x, y in zip(self.a, self.b)]

    @classmethod
    def from_jsonable(cls, pairs) -> "DiscreteBms":
        arr = np.asarray(pairs, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("expected a list of [a, b] pairs")
        return cls(arr[:, 0], arr[:, 1])

    def __repr__(self):
        return (
            f"DiscreteBms(pairs={self.pair_count}, "
            f"capacity={bms_capacity(self):.6f}, z={bms_bhattacharyya(self):.3e})"
        )


def _posterior(a, b):
    s = a + b
    out = np.full_like(a, 0.5)
    np.divide(a, s, out=out, where=s > 0)
    return out


def _finalize(a, b) -> DiscreteBms:
    """Normalize total mass to one and restore exact posterior order.

    Renormalization perturbs each entry by an ulp or so, which can invert
    the order of near-tied posteriors; the final stable sort re-establishes
    the sortedness invariant on the exact stored values.
    """
    total = a.sum() + b.sum()
    a = a / total
    b = b / total
    order = np.argsort(-_posterior(a, b), kind="stable")
    return DiscreteBms(a[order], b[order])


def _canonical(a, b, pool: bool = True) -> DiscreteBms:
    """Fold mirrors onto a >= b, order by likelihood ratio, renormalize.

    With ``pool`` set, runs of bitwise-equal posteriors collapse into one
    pair (lossless) and dead symbols are dropped; without it the pair count
    is preserved exactly, dead pairs sitting at the tail.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    swap = a < b
    a2 = np.where(swap, b, a)
    b2 = np.where(swap, a, b)
    if pool:
        mass = a2 + b2
        keep = mass > 0.0
        a2, b2 = a2[keep], b2[keep]
    if a2.size == 0:
        raise ValueError("channel has no probability mass")
    post = _posterior(a2, b2)
    order = np.argsort(-post, kind="stable")
    a2, b2, post = a2[order], b2[order], post[order]
    if pool:
        boundaries = np.flatnonzero(np.diff(post) != 0.0) + 1
        starts = np.concatenate(([0], boundaries))
        a2 = np.add.reduceat(a2, starts)
        b2 = np.add.reduceat(b2, starts)
    return _finalize(a2, b2)


# ---------------------------------------------------------------------------
# figures of merit
# ---------------------------------------------------------------------------

def bms_capacity(bms: DiscreteBms) -> float:
    """Mutual information (bits) with uniform inputs."""
    a, b = bms.a, bms.b
    s = a + b

    def half(v):
        # v * log2(2v / (a+b)) with the 0 log 0 = 0 convention
        ratio = np.divide(2.0 * v, s, out=np.ones_like(v), where=(v > 0) & (s > 0))
        return v * np.log2(ratio)

    return float((half(a) + half(b)).sum())


def bms_bhattacharyya(bms: DiscreteBms) -> float:
    """Bhattacharyya parameter: sum over the full alphabet of sqrt(P(y|0)P(y|1))."""
    return float(2.0 * np.sqrt(bms.a * bms.b).sum())


# ---------------------------------------------------------------------------
# quantization and evolution steps
# ---------------------------------------------------------------------------

def discretize_channel(channel: Mod2AwgnChannel, config: QuantizationConfig) -> DiscreteBms:
    """Integrate the folded conditional densities over uniform output cells.

    The folded output is symmetric, so only y in [0, 1] is partitioned; the
    mirror half is implied.  Returns exactly ``config.intervals`` pairs.
    """
    k = config.intervals
    edges = np.linspace(0.0, 1.0, k + 1)
    a = np.empty(k)
    b = np.empty(k)
    for i in range(k):
        lo, hi = edges[i], edges[i + 1]
        a[i], _ = integrate.quad(lambda y: channel.conditional_pdf(y, 0), lo, hi, epsabs=1e-13, epsrel=1e-13)
        b[i], _ = integrate.quad(lambda y: channel.conditional_pdf(y, 1), lo, hi, epsabs=1e-13, epsrel=1e-13)
    return _canonical(a, b, pool=False)


def degrading_merge(bms: DiscreteBms, mu: int) -> DiscreteBms:
    """Reduce the alphabet to at most ``mu`` symbols.

    Adjacent-in-likelihood-ratio pairs are pooled greedily, least capacity
    loss first (ties toward the smaller index), which keeps the result
    degraded with respect to the input: capacity never increases and the
    Bhattacharyya parameter never decreases.
    """
    if mu < 4:
        raise ValueError("symbol budget mu must be at least 4")
    target_pairs = mu // 2
    if bms.pair_count <= target_pairs:
        return bms
    a, b = _kernels.merge_pairs(
        np.ascontiguousarray(bms.a), np.ascontiguousarray(bms.b), target_pairs
    )
    return _finalize(a, b)


def polarize_minus(bms: DiscreteBms, mu: int | None = None) -> DiscreteBms:
    """Single-step check-combination of two independent channel uses.

    Output symbols pair one listed symbol with one symbol of the full
    (mirrored) alphabet.  With ``mu`` set, the result is degraded down to
    the symbol budget; with ``mu=None`` the exact alphabet is kept.
    """
    a, b = bms.a, bms.b
    full0 = np.concatenate((a, b))  # P(y|0) over listed then mirrored symbols
    full1 = np.concatenate((b, a))
    a_new = 0.5 * (np.outer(a, full0) + np.outer(b, full1))
    b_new = 0.5 * (np.outer(b, full0) + np.outer(a, full1))
    out = _canonical(a_new, b_new)
    return out if mu is None else degrading_merge(out, mu)


def polarize_plus(bms: DiscreteBms, mu: int | None = None) -> DiscreteBms:
    """Single-step variable-combination with the first bit known.

    Symbols that are identical up to relabeling are pooled analytically,
    which keeps Z(plus) = Z(input)^2 an exact identity of the construction.
    """
    a, b = bms.a, bms.b
    a_new = np.concatenate((np.outer(a, a), np.outer(b, a)))
    b_new = np.concatenate((np.outer(b, b), np.outer(a, b)))
    out = _canonical(a_new, b_new)
    return out if mu is None else degrading_merge(out, mu)
