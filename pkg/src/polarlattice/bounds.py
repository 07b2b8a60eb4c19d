"""Analytic error bounds and the volume-to-noise gap decomposition.

Everything here is closed-form or single quadratures: Gaussian tail bounds
for the uncoded integer level, union bounds across levels, the gap to the
sphere bound in dB, and its split into three information terms — the
capacity left in the scalar mod-1 channel (eps1), the entropy deficit of
aliasing the noise into the coarsest level (eps2), and the rate backed off
from the per-level capacities (eps3).  The exact identity
log2 vnr = 2 (eps1 - eps2 + eps3) is kept to quadrature accuracy and
doubles as a cross-check between two independent integration routes.
"""

import math
from dataclasses import dataclass

from scipy.special import erfc, log_ndtr

from .channel import aliased_entropy, gaussian_entropy, mod_channel_capacity

_DB_PER_BIT = 10.0 * math.log10(2.0)


def qfunc(x: float) -> float:
    """Upper Gaussian tail Q(x), full double precision via erfc."""
    return 0.5 * erfc(x / math.sqrt(2.0))


def log2_qfunc(x: float) -> float:
    """log2 Q(x), usable far past where Q underflows."""
    return log_ndtr(-x) / math.log(2.0)


@dataclass(frozen=True)
class TopLevelError:
    """Block-error figures for the uncoded scaled-integer level."""

    per_symbol: float  # 2 Q(spacing / 2 sigma)
    union: float       # n * per_symbol, clipped to 1
    exact: float       # 1 - (1 - per_symbol)^n


def top_level_block_error(sigma: float, n: int, spacing: float) -> TopLevelError:
    """Probability that rounding to a spaced integer grid misses in n tries.

    A coordinate errs when |noise| exceeds spacing/2, which happens with
    probability 2 Q(spacing / (2 sigma)).
    """
    if sigma <= 0 or spacing <= 0 or n < 1:
        raise ValueError("sigma and spacing must be positive, n at least 1")
    p = 2.0 * qfunc(spacing / (2.0 * sigma))
    exact = -math.expm1(n * math.log1p(-p)) if p < 1.0 else 1.0
    return TopLevelError(per_symbol=p, union=min(1.0, n * p), exact=exact)


def union_bound(level_bounds, top_bound: float) -> float:
    """Total block-error bound: per-level bounds plus the integer level."""
    total = float(sum(level_bounds)) + float(top_bound)
    if total < 0:
        raise ValueError("bounds must be nonnegative")
    return min(1.0, total)


def vnr_gap_db(log2_vol_top: float, rate: float, sigma: float) -> float:
    """Gap to the sphere bound in dB for a per-dimension rate ``rate`` taken
    out of a chain topped by a lattice of per-dimension log-volume
    ``log2_vol_top`` (r - 1 for the 2^(r-1) Z layer)."""
    bits = 2.0 * (log2_vol_top - rate - gaussian_entropy(sigma))
    return _DB_PER_BIT * bits


@dataclass(frozen=True)
class EpsilonTerms:
    """Decomposition of the log-VNR into its three information terms."""

    eps1: float  # capacity remaining in the mod-Z channel
    eps2: float  # entropy lost to aliasing at the top level
    eps3: float  # total per-level rate backoff
    gap_bits: float  # 2 (eps1 - eps2 + eps3)
    gap_db: float
    upper_gap_db: float  # with eps2 dropped: 2 (eps1 + eps3)
    eps2_tail_estimate: float  # classical estimate pi * P_e(top lattice)

    def to_jsonable(self):
        return {
            "eps1": self.eps1,
            "eps2": self.eps2,
            "eps3": self.eps3,
            "gap_bits": self.gap_bits,
            "gap_db": self.gap_db,
            "upper_gap_db": self.upper_gap_db,
            "eps2_tail_estimate": self.eps2_tail_estimate,
        }


def epsilon_terms(sigma: float, r: int, rates) -> EpsilonTerms:
    """Evaluate the three gap terms for an r-level chain with the given
    per-level rates (bits per dimension, one per coded level).

    eps1 integrates the mod-Z channel capacity, eps2 the aliased-noise
    entropy deficit at scale 2^(r-1), and eps3 sums the per-level capacities
    minus the rates actually carried.  All by quadrature; the identity
    2(eps1 - eps2 + eps3) = log2 vnr holds to integration accuracy.
    """
    if r < 1:
        raise ValueError("need at least one level")
    rates = [float(x) for x in rates]
    if len(rates) != r - 1:
        raise ValueError("need one rate per coded level")
    eps1 = mod_channel_capacity(1.0, sigma)
    top_scale = float(1 << (r - 1))
    eps2 = gaussian_entropy(sigma) - aliased_entropy(top_scale, sigma)
    # capacity of the full coded stack: C(top) - C(Z), as a difference of
    # mod-channel capacities
    stack_capacity = mod_channel_capacity(top_scale, sigma) - mod_channel_capacity(1.0, sigma)
    eps3 = stack_capacity - sum(rates)
    gap_bits = 2.0 * (eps1 - eps2 + eps3)
    p_top = 2.0 * qfunc(top_scale / (2.0 * sigma))
    return EpsilonTerms(
        eps1=eps1,
        eps2=eps2,
        eps3=eps3,
        gap_bits=gap_bits,
        gap_db=_DB_PER_BIT * gap_bits,
        upper_gap_db=_DB_PER_BIT * 2.0 * (eps1 + eps3),
        eps2_tail_estimate=math.pi * p_top,
    )


def theorem_bound(n: int, betas, sigma: float, r: int) -> float:
    """Asymptotic-form total bound: sum over coded levels of n 2^(-n^beta)
    plus the uncoded integer level, computed in log space so large n and
    beta cannot overflow or underflow to garbage."""
    if r < 1 or n < 1:
        raise ValueError("n and r must be positive")
    betas = [float(b) for b in betas]
    if len(betas) != r - 1:
        raise ValueError("need one exponent per coded level")
    total = 0.0
    for beta in betas:
        if not 0.0 < beta < 0.5:
            raise ValueError("exponents must lie in (0, 1/2)")
        log2_term = math.log2(n) - float(n) ** beta
        if log2_term > -1074.0:
            total += 2.0 ** log2_term
    # n * 2 Q(2^(r-1) / (2 sigma)) in log space
    log2_top = math.log2(n) + 1.0 + log2_qfunc((1 << (r - 1)) / (2.0 * sigma))
    if log2_top > -1074.0:
        total += 2.0 ** log2_top
    return min(1.0, total)


@dataclass(frozen=True)
class LevelReport:
    level: int
    sigma: float
    capacity: float
    rate: float
    error_bound: float


@dataclass(frozen=True)
class PerformanceReport:
    """Analytic summary of one designed lattice at one noise level."""

    n: int
    r: int
    sigma: float
    vnr_db: float
    eps: EpsilonTerms
    levels: tuple[LevelReport, ...]
    top_error_bound: float
    union_bound_pe: float
    theorem_bound_pe: float | None

    def to_jsonable(self):
        return {
            "n": self.n,
            "r": self.r,
            "sigma": self.sigma,
            "vnr_db": self.vnr_db,
            "epsilon": self.eps.to_jsonable(),
            "levels": [
                {
                    "level": l.level,
                    "sigma": l.sigma,
                    "capacity": l.capacity,
                    "rate": l.rate,
                    "error_bound": l.error_bound,
                }
                for l in self.levels
            ],
            "top_error_bound": self.top_error_bound,
            "union_bound_pe": self.union_bound_pe,
            "theorem_bound_pe": self.theorem_bound_pe,
        }


def performance_report(design, sigma: float, betas=None) -> PerformanceReport:
    """Assemble the analytic report for a design at noise ``sigma``.

    ``design`` is a DesignResult; the bound from the asymptotic form is
    included only when per-level exponents are passed explicitly.
    """
    from .lattice import vnr_db as lattice_vnr_db

    lattice = design.lattice
    n = lattice.n
    levels = tuple(
        LevelReport(
            level=l.level,
            sigma=l.sigma,
            capacity=l.capacity,
            rate=l.k / n,
            error_bound=l.error_bound,
        )
        for l in design.levels
    )
    eps = epsilon_terms(sigma, lattice.r, [l.rate for l in levels])
    top = top_level_block_error(sigma / (1 << (lattice.r - 1)), n, 1.0).union
    theorem = None
    if betas is not None:
        theorem = theorem_bound(n, betas, sigma, lattice.r)
    return PerformanceReport(
        n=n,
        r=lattice.r,
        sigma=sigma,
        vnr_db=lattice_vnr_db(lattice, sigma),
        eps=eps,
        levels=levels,
        top_error_bound=top,
        union_bound_pe=union_bound([l.error_bound for l in levels], top),
        theorem_bound_pe=theorem,
    )
