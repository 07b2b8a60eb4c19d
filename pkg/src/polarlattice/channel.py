"""Binary-input mod-2 AWGN channel and capacities of the 2^k Z partition chain.

A channel use transmits a bit x in {0,1} as the coset x + 2Z on the real
line.  The receiver reduces the Gaussian-corrupted signal modulo 2 into
[-1, 1) and keeps the absolute-value fold y = 2|t| - 1, which is a
sufficient statistic because both conditional densities are even in t.
The resulting conditional densities are wrapped Gaussians (theta series),
and everything downstream (quantization, code construction, analytic
bounds) is driven by the two scalar channel parameters: the noise standard
deviation and the partition level, where level l sees sigma / 2^(l-1).

All probability and information quantities here are in bits.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import logsumexp

_LOG2E = math.log2(math.e)
#: integration accuracy demanded of the entropy/capacity quadratures
QUAD_TOL = 1e-9


class IntegrationError(RuntimeError):
    """Raised when a quadrature cannot reach the requested accuracy."""


def _check_sigma(sigma) -> float:
    sigma = float(sigma)
    if not sigma > 0.0 or not math.isfinite(sigma):
        raise ValueError(f"sigma must be a positive finite real, got {sigma!r}")
    return sigma


def _folded_offsets(y, x, sigma):
    """Squared-exponent arguments of the wrapped-Gaussian series for f(y|x).

    Term count scales with sigma so the dropped tail stays below 1e-30 of
    the retained sum across the whole support.
    """
    n_terms = 1 + int(math.ceil(6.1 * sigma))
    j = np.arange(-n_terms, n_terms + 1, dtype=np.float64)
    shift = 1.0 if x == 0 else -1.0
    z = np.asarray(y, dtype=np.float64)[..., None] + shift + 4.0 * j
    return -(z * z) / (8.0 * sigma * sigma)


def conditional_pdf(y, x: int, sigma: float):
    """Density of the folded observation y in [-1, 1] given the sent bit.

    Parameters
    ----------
    y : float or ndarray
        Folded observation(s); must lie in [-1, 1].
    x : int
        Transmitted bit, 0 or 1.
    sigma : float
        Noise standard deviation before folding, > 0.

    Returns
    -------
    float or ndarray matching the shape of ``y``.
    """
    sigma = _check_sigma(sigma)
    if x not in (0, 1):
        raise ValueError(f"x must be 0 or 1, got {x!r}")
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(y_arr < -1.0) or np.any(y_arr > 1.0):
        raise ValueError("folded observation outside [-1, 1]")
    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma * sigma)
    vals = norm * np.exp(_folded_offsets(y_arr, x, sigma)).sum(axis=-1)
    return vals if y_arr.ndim else float(vals)


def llr(y, sigma: float):
    """Log-likelihood ratio ln f(y|0) - ln f(y|1) of the folded observation.

    Computed as a difference of log-sum-exp series, so it stays finite and
    accurate even where either conditional density underflows.  Odd in y.
    """
    sigma = _check_sigma(sigma)
    y_arr = np.asarray(y, dtype=np.float64)
    if np.any(y_arr < -1.0) or np.any(y_arr > 1.0):
        raise ValueError("folded observation outside [-1, 1]")
    log_f0 = logsumexp(_folded_offsets(y_arr, 0, sigma), axis=-1)
    log_f1 = logsumexp(_folded_offsets(y_arr, 1, sigma), axis=-1)
    out = log_f0 - log_f1
    return out if y_arr.ndim else float(out)


def sample_observation(x, sigma: float, noise):
    """Map standard-normal draws to folded observations. Pure function.

    t = ((x + sigma * noise + 1) mod 2) - 1 reduces the noisy signal into
    [-1, 1); y = 2|t| - 1 applies the absolute-value fold.
    """
    sigma = _check_sigma(sigma)
    x_arr = np.asarray(x)
    if np.any((x_arr != 0) & (x_arr != 1)):
        raise ValueError("transmitted symbols must be bits")
    t = np.mod(x_arr + sigma * np.asarray(noise, dtype=np.float64) + 1.0, 2.0) - 1.0
    y = 2.0 * np.abs(t) - 1.0
    return y if y.ndim else float(y)


@dataclass(frozen=True)
class Mod2AwgnChannel:
    """Mod-2 folded binary-input AWGN channel with noise deviation ``sigma``."""

    sigma: float

    def __post_init__(self):
        _check_sigma(self.sigma)

    def conditional_pdf(self, y, x: int):
        return conditional_pdf(y, x, self.sigma)

    def llr(self, y):
        return llr(y, self.sigma)

    def sample_observation(self, x, noise):
        return sample_observation(x, self.sigma, noise)


# ---------------------------------------------------------------------------
# lattice-aliased Gaussian entropies and capacities
# ---------------------------------------------------------------------------

def aliased_pdf(t, scale: float, sigma: float):
    """Density of a N(0, sigma^2) variable reduced mod scale*Z into the
    centered fundamental interval [-scale/2, scale/2]."""
    scale = float(scale)
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    sigma = _check_sigma(sigma)
    ratio = sigma / scale
    n_terms = 1 + int(math.ceil(math.sqrt(0.25 + 148.0 * ratio * ratio)))
    j = np.arange(-n_terms, n_terms + 1, dtype=np.float64)
    t_arr = np.asarray(t, dtype=np.float64)
    z = t_arr[..., None] + scale * j
    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma * sigma)
    vals = norm * np.exp(-(z * z) / (2.0 * sigma * sigma)).sum(axis=-1)
    return vals if t_arr.ndim else float(vals)


def _quad(fn, lo, hi):
    val, err = integrate.quad(fn, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=400)
    if err > QUAD_TOL:
        raise IntegrationError(
            f"quadrature error {err:.3e} exceeds tolerance {QUAD_TOL:.1e}"
        )
    return val


def aliased_entropy(scale: float, sigma: float) -> float:
    """Differential entropy (bits) of the mod-scale*Z aliased Gaussian."""
    if sigma >= 2.0 * scale:
        # aliased density is uniform to within exp(-8 pi^2) ~ 1e-35,
        # far below quadrature tolerance
        return math.log2(scale)

    def neg_plogp(t):
        f = aliased_pdf(t, scale, sigma)
        return -f * math.log2(f) if f > 0.0 else 0.0

    return _quad(neg_plogp, -scale / 2.0, scale / 2.0)


def mod_channel_capacity(scale: float, sigma: float) -> float:
    """Capacity log2(scale) - h of the mod-scale*Z additive Gaussian channel.

    Tends to 0 as sigma grows (the aliased density flattens to uniform) and
    to the full log2(scale) - gaussian_entropy as aliasing vanishes.
    """
    return math.log2(scale) - aliased_entropy(scale, sigma)


def gaussian_entropy(sigma: float) -> float:
    """Differential entropy (bits) of N(0, sigma^2)."""
    sigma = _check_sigma(sigma)
    return 0.5 * math.log2(2.0 * math.pi * math.e * sigma * sigma)


def level_sigma(level: int, sigma_top: float) -> float:
    """Noise deviation seen by partition level ``level`` (1-based)."""
    if level < 1:
        raise ValueError("level is 1-based and must be >= 1")
    return _check_sigma(sigma_top) / float(2 ** (level - 1))


def partition_capacity(level: int, sigma_top: float, method: str = "direct") -> float:
    """Capacity (bits) of the binary partition channel at one chain level.

    Level l of the chain Z / 2Z / ... carries one bit whose channel is the
    mod-2 folded AWGN channel at sigma_top / 2^(l-1).

    Parameters
    ----------
    method : "direct" or "difference"
        "direct" integrates the binary-input mutual information of the
        folded channel; "difference" evaluates the same quantity as
        mod_channel_capacity(2, s) - mod_channel_capacity(1, s).  Both
        agree to well under 1e-6 bits; direct is the default.
    """
    sigma = level_sigma(level, sigma_top)
    if sigma >= 4.0:
        # both folded densities are flat to ~1e-35: no information flows
        return 0.0
    if method == "difference":
        value = mod_channel_capacity(2.0, sigma) - mod_channel_capacity(1.0, sigma)
    elif method == "direct":

        def integrand(y):
            f0 = conditional_pdf(y, 0, sigma)
            f1 = conditional_pdf(y, 1, sigma)
            mix = 0.5 * (f0 + f1)
            acc = 0.0
            if f0 > 0.0:
                acc += 0.5 * f0 * math.log2(f0 / mix)
            if f1 > 0.0:
                acc += 0.5 * f1 * math.log2(f1 / mix)
            return acc

        value = _quad(integrand, -1.0, 1.0)
    else:
        raise ValueError(f"unknown method {method!r}")
    # quadrature can stray a hair outside [0, 1] at the saturated extremes
    return min(max(value, 0.0), 1.0)
