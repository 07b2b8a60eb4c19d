"""Multilevel lattices built from nested polar codes over Z/2Z/.../2^(r-1)Z.

A lattice point is sum_l 2^(l-1) c_l + 2^(r-1) z with c_l a codeword of the
level-l code and z any integer vector.  Level l sees the folded mod-2
channel at sigma / 2^(l-1), so one quantized construction per level selects
its free set; using one shared reliability threshold across levels keeps
the free sets nested, which is what makes the union of codeword translates
an actual lattice (closed under addition).

The designer picks the number of levels from the channel itself: walk down
the chain until a level is both nearly noiseless (capacity above the upper
cutoff) and clean enough that the remaining integer part meets its share of
the error budget uncoded.  Levels with capacity below the lower cutoff
carry no code.  Decoding proceeds level by level: fold the residual mod 2,
decode, subtract, halve, and round what remains to the nearest integers.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import Mod2AwgnChannel, level_sigma, llr, partition_capacity
from .polar import BitChannelMetrics, PolarCode, code_error_bound, encode, evolve_metrics, sc_decode, select_free_set
from .quantize import QuantizationConfig, discretize_channel

#: capacity cutoffs bounding the levels worth coding
CAP_LO = 0.02
CAP_HI = 0.98
#: sanity ceiling on chain depth during design
MAX_LEVELS = 24


class InfeasibleDesignError(RuntimeError):
    """No level count within bounds meets the requested error budget."""


class ConstructionDLattice:
    """Chain of r levels: r-1 nested binary codes plus the 2^(r-1) Z layer."""

    def __init__(self, n: int, codes):
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError("dimension must be a power of two, at least 2")
        self.n = int(n)
        self.codes: list[PolarCode] = list(codes)
        for code in self.codes:
            if code.n != self.n:
                raise ValueError("all level codes must match the lattice dimension")

    @property
    def r(self) -> int:
        return len(self.codes) + 1

    @property
    def top_scale(self) -> int:
        return 1 << (self.r - 1)

    def to_jsonable(self):
        return {
            "N": self.n,
            "r": self.r,
            "free_sets": [[int(i) for i in code.free_set] for code in self.codes],
        }

    @classmethod
    def from_jsonable(cls, obj) -> "ConstructionDLattice":
        n = int(obj["N"])
        r = int(obj["r"])
        free_sets = obj["free_sets"]
        if len(free_sets) != r - 1:
            raise ValueError("free set count must be r - 1")
        m = n.bit_length() - 1
        return cls(n, [PolarCode(m, fs) for fs in free_sets])

    def __repr__(self):
        ks = [code.k for code in self.codes]
        return f"ConstructionDLattice(n={self.n}, r={self.r}, k={ks})"


@dataclass(frozen=True)
class NestingReport:
    ok: bool
    level: int | None = None  # 1-based level whose free set leaks
    index: int | None = None  # offending free index


def verify_nested(lattice: ConstructionDLattice) -> NestingReport:
    """Check that each level's free set is contained in the next level's.

    Vacuously true with fewer than two coded levels.  On failure reports the
    first (level, index) pair, scanning levels upward and indices ascending.
    """
    for lvl in range(len(lattice.codes) - 1):
        lower = lattice.codes[lvl].free_set
        upper = lattice.codes[lvl + 1].free_set
        missing = np.setdiff1d(lower, upper, assume_unique=True)
        if missing.size:
            return NestingReport(False, lvl + 1, int(missing[0]))
    return NestingReport(True)


def lattice_encode(lattice: ConstructionDLattice, per_level_info, z) -> np.ndarray:
    """Combine per-level information bits and an integer vector into a point."""
    if len(per_level_info) != len(lattice.codes):
        raise ValueError("need one information block per coded level")
    z_arr = np.asarray(z, dtype=np.int64)
    if z_arr.shape != (lattice.n,):
        raise ValueError("integer part must be one value per dimension")
    point = (1 << (lattice.r - 1)) * z_arr
    for lvl, (code, info) in enumerate(zip(lattice.codes, per_level_info)):
        point = point + (1 << lvl) * encode(code, info).astype(np.int64)
    return point


def log2_volume(lattice: ConstructionDLattice) -> float:
    """log2 of the fundamental volume: N(r-1) minus the total dimension count
    of the coded levels."""
    return float(lattice.n * (lattice.r - 1) - sum(code.k for code in lattice.codes))


def vnr(lattice: ConstructionDLattice, sigma: float) -> float:
    """Volume-to-noise ratio V^(2/N) / (2 pi e sigma^2); 1 is the sphere bound."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return 2.0 ** (2.0 * log2_volume(lattice) / lattice.n) / (
        2.0 * math.pi * math.e * sigma * sigma
    )


def vnr_db(lattice: ConstructionDLattice, sigma: float) -> float:
    return 10.0 * math.log10(vnr(lattice, sigma))


# ---------------------------------------------------------------------------
# design
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelDesign:
    """Designed figures for one coded level."""

    level: int
    sigma: float
    capacity: float
    k: int
    error_bound: float  # summed Bhattacharyya bound of the free set


@dataclass(frozen=True)
class DesignResult:
    lattice: ConstructionDLattice
    levels: tuple[LevelDesign, ...]
    top_error_bound: float
    sigma: float
    target_pe: float

    @property
    def total_bound(self) -> float:
        return min(1.0, sum(l.error_bound for l in self.levels) + self.top_error_bound)


def _top_union_bound(n: int, sigma_level: float) -> float:
    """N times the two-sided Gaussian tail past half the unit spacing."""
    from .bounds import top_level_block_error

    return top_level_block_error(sigma_level, n, 1.0).union


def design_lattice(
    sigma: float,
    target_pe: float,
    n: int,
    config: QuantizationConfig | None = None,
) -> DesignResult:
    """Size the chain and pick one polar code per level for noise ``sigma``.

    The error budget ``target_pe`` is split equally over all levels,
    including the final integer level.  The chain stops at the first level
    that is past the upper capacity cutoff and whose uncoded integer lattice
    already meets its budget share; coded levels select free indices with
    one shared per-index threshold (budget / n), which keeps the free sets
    nested.  Trailing full-rate levels are redundant (the code is the whole
    space) and are stripped.
    """
    if not 0.0 < target_pe < 1.0:
        raise ValueError("target error probability must lie in (0, 1)")
    if n < 2 or (n & (n - 1)) != 0:
        raise ValueError("dimension must be a power of two, at least 2")
    if config is None:
        config = QuantizationConfig()

    capacities = []
    r = 1
    while True:
        cap = partition_capacity(r, sigma)
        budget = target_pe / r
        if cap > CAP_HI and _top_union_bound(n, level_sigma(r, sigma)) <= budget:
            break
        capacities.append(cap)
        r += 1
        if r > MAX_LEVELS:
            raise InfeasibleDesignError(
                f"no feasible chain within {MAX_LEVELS} levels at sigma={sigma}"
            )

    budget = target_pe / r
    threshold = budget / n
    m = n.bit_length() - 1
    codes = []
    levels = []
    for lvl in range(1, r):
        cap = capacities[lvl - 1]
        sig_l = level_sigma(lvl, sigma)
        if cap < CAP_LO:
            # too noisy to carry information; pin the whole level
            code = PolarCode(m, [])
            bound = 0.0
        else:
            channel = Mod2AwgnChannel(sig_l)
            metrics = evolve_metrics(discretize_channel(channel, config), m, config.mu)
            code = select_free_set(metrics, m, threshold=threshold)
            bound = code_error_bound(code, metrics)
        codes.append(code)
        levels.append(LevelDesign(lvl, sig_l, cap, code.k, bound))

    while codes and codes[-1].k == n:
        codes.pop()
        levels.pop()
        r -= 1

    top_bound = _top_union_bound(n, level_sigma(r, sigma))
    return DesignResult(
        lattice=ConstructionDLattice(n, codes),
        levels=tuple(levels),
        top_error_bound=top_bound,
        sigma=sigma,
        target_pe=target_pe,
    )


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------

@dataclass
class MultistageResult:
    point: np.ndarray
    level_codewords: list
    integer_part: np.ndarray


def multistage_decode(
    lattice: ConstructionDLattice, y, sigma: float
) -> MultistageResult:
    """Peel the received vector level by level, then round the remainder.

    At level l the residual is folded mod 2 and decoded at the level noise
    sigma / 2^(l-1); the decided codeword is subtracted and the residual
    halved.  Rounding uses the half-to-even rule.  The output is a lattice
    point by construction: every decided word is a codeword and the integer
    part is unconstrained.
    """
    y_arr = np.asarray(y, dtype=np.float64)
    if y_arr.shape != (lattice.n,):
        raise ValueError("received vector length must match the dimension")
    residual = y_arr.copy()
    codewords = []
    point = np.zeros(lattice.n, dtype=np.int64)
    for lvl, code in enumerate(lattice.codes):
        sig_l = sigma / (1 << lvl)
        t = np.mod(residual + 1.0, 2.0) - 1.0
        folded = 2.0 * np.abs(t) - 1.0
        _, x_hat = sc_decode(code, llr(folded, sig_l))
        codewords.append(x_hat)
        point += (1 << lvl) * x_hat.astype(np.int64)
        residual = (residual - x_hat) / 2.0
    z_hat = np.rint(residual).astype(np.int64)
    point += (1 << (lattice.r - 1)) * z_hat
    return MultistageResult(point=point, level_codewords=codewords, integer_part=z_hat)
