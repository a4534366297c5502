"""Seed distributions on [0, infinity) for row-bias scaling limits.

A seed distribution F describes the limit in law of n * theta where theta is
a row bias drawn from the finite-n mixing law.  Seeds drive three things:

* size-coupled mixing laws (``SeedCdf`` in :mod:`exchgraph.mixing`), where the
  finite-n law of theta is F(x n) / F(n) on [0, 1];
* Poisson-mixture degree limits (:mod:`exchgraph.degrees`);
* kernel-counting rate functions through the Laplace transform
  ``integral exp(-s t) dF(t)`` (:mod:`exchgraph.gf2`).

Closed forms are used wherever they exist (CDF inverses, Laplace transforms
for the exponential-family seeds); everything else goes through checked
adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._numerics import checked_quad
from .errors import InversionError, ParameterError

__all__ = [
    "SeedDistribution",
    "DiracSeed",
    "ExponentialSeed",
    "GammaSeed",
    "ParetoTailSeed",
    "PowerLawSeed",
    "LerchSeed",
    "seed_from_json",
]


def _upper_gamma(a: float, z: float) -> float:
    """Upper incomplete gamma for any real a, z > 0.

    Nonpositive a is lifted into (0, 1] and walked back down with
    Gamma(a, z) = (Gamma(a+1, z) - z^a e^-z) / a.
    """
    if not z > 0:
        raise ParameterError("upper incomplete gamma needs z > 0")
    steps = 0
    while a < 0.0:
        a += 1.0
        steps += 1
    if a == 0.0:
        value = float(special.exp1(z))
    else:
        value = float(special.gammaincc(a, z)) * math.gamma(a)
    for _ in range(steps):
        a -= 1.0
        value = (value - z ** a * math.exp(-z)) / a
    return value


class SeedDistribution:
    """Base interface; subclasses override closed forms where available."""

    kind = "abstract"

    # -- distribution surface -------------------------------------------------
    def cdf(self, x):
        raise NotImplementedError

    def density(self, x):
        raise ParameterError(f"{self.kind} seed has no density")

    def has_density(self) -> bool:
        return True

    def mean_is_finite(self) -> bool:
        raise NotImplementedError

    def power_tail(self):
        """(c, eta) with 1 - F(x) ~ c * x**(-eta), or None if not power-type."""
        return None

    # -- transforms -----------------------------------------------------------
    def laplace(self, s: float) -> float:
        """integral exp(-s t) dF(t); generic route integrates the density."""
        if s < 0:
            raise ParameterError("laplace transform argument must be >= 0")
        if s == 0:
            return 1.0
        return checked_quad(lambda t: math.exp(-s * t) * self.density(t),
                            *self._support(), rel_tol=1e-9)

    def t_laplace(self, s: float) -> float:
        """integral t exp(-s t) dF(t); diverges at s=0 for infinite-mean seeds."""
        if s <= 0:
            raise ParameterError("t-weighted laplace transform needs s > 0")
        return checked_quad(lambda t: t * math.exp(-s * t) * self.density(t),
                            *self._support(), rel_tol=1e-9)

    # -- sampling -------------------------------------------------------------
    def inverse_cdf(self, u):
        """Quantile function, vectorized; generic route bisects the CDF.

        The bracket is grown geometrically from [0, 1] until it contains the
        quantile, then halved to an absolute width of 1e-12.
        """
        u = np.asarray(u, dtype=float)
        if np.any((u < 0.0) | (u >= 1.0)):
            raise ParameterError("quantile argument must lie in [0, 1)")
        hi_scalar = 1.0
        for _ in range(200):
            if np.all(self.cdf(hi_scalar) > np.max(u)):
                break
            hi_scalar *= 2.0
        else:
            raise InversionError("could not bracket the requested quantile")
        lo = np.zeros_like(u)
        hi = np.full_like(u, hi_scalar)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.max(hi - lo) < 1e-12:
                break
        else:
            raise InversionError("quantile bisection failed to converge")
        return 0.5 * (lo + hi)

    def _support(self):
        return 0.0, np.inf

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class DiracSeed(SeedDistribution):
    """Point mass at t0 > 0: the scaling limit of a fixed row bias t0 / n."""

    t0: float
    kind = "dirac"

    def __post_init__(self):
        if not self.t0 > 0:
            raise ParameterError("dirac seed needs t0 > 0")

    def cdf(self, x):
        return np.where(np.asarray(x, dtype=float) >= self.t0, 1.0, 0.0)

    def has_density(self) -> bool:
        return False

    def mean_is_finite(self) -> bool:
        return True

    def laplace(self, s: float) -> float:
        return math.exp(-s * self.t0)

    def t_laplace(self, s: float) -> float:
        return self.t0 * math.exp(-s * self.t0)

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        return np.full_like(u, self.t0)

    def to_json(self) -> dict:
        return {"kind": "dirac", "t0": self.t0}


@dataclass(frozen=True)
class ExponentialSeed(SeedDistribution):
    """F(x) = 1 - exp(-gamma x); degree limit is geometric."""

    gamma: float
    kind = "exponential"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ParameterError("exponential seed needs gamma > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.gamma * x), 0.0)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.gamma * np.exp(-self.gamma * x), 0.0)

    def mean_is_finite(self) -> bool:
        return True

    def laplace(self, s: float) -> float:
        return self.gamma / (self.gamma + s)

    def t_laplace(self, s: float) -> float:
        return self.gamma / (self.gamma + s) ** 2

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        return -np.log1p(-u) / self.gamma

    def to_json(self) -> dict:
        return {"kind": "exponential", "gamma": self.gamma}


@dataclass(frozen=True)
class GammaSeed(SeedDistribution):
    """Gamma(shape r, rate gamma); degree limit is negative binomial."""

    r: float
    gamma: float
    kind = "gamma"

    def __post_init__(self):
        if not (self.r > 0 and self.gamma > 0):
            raise ParameterError("gamma seed needs r > 0 and gamma > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return special.gammainc(self.r, self.gamma * np.clip(x, 0.0, None))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            logpdf = (self.r * math.log(self.gamma) + (self.r - 1.0) * np.log(x)
                      - self.gamma * x - special.gammaln(self.r))
        return np.where(x > 0, np.exp(logpdf), 0.0)

    def mean_is_finite(self) -> bool:
        return True

    def laplace(self, s: float) -> float:
        return (self.gamma / (self.gamma + s)) ** self.r

    def t_laplace(self, s: float) -> float:
        return self.r * self.gamma ** self.r / (self.gamma + s) ** (self.r + 1.0)

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        return special.gammaincinv(self.r, u) / self.gamma

    def to_json(self) -> dict:
        return {"kind": "gamma", "r": self.r, "gamma": self.gamma}


@dataclass(frozen=True)
class ParetoTailSeed(SeedDistribution):
    """Shifted Pareto: 1 - F(x) = alpha**eta / (alpha + x)**eta on x >= 0."""

    alpha: float
    eta: float
    kind = "pareto_tail"

    def __post_init__(self):
        if not (self.alpha > 0 and self.eta > 0):
            raise ParameterError("pareto tail seed needs alpha > 0 and eta > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.clip(x, 0.0, None)
        return 1.0 - (self.alpha / (self.alpha + xp)) ** self.eta

    def density(self, x):
        x = np.asarray(x, dtype=float)
        val = self.eta * self.alpha ** self.eta / (self.alpha + x) ** (self.eta + 1.0)
        return np.where(x >= 0, val, 0.0)

    def mean_is_finite(self) -> bool:
        return self.eta > 1.0

    def power_tail(self):
        return self.alpha ** self.eta, self.eta

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        return self.alpha * ((1.0 - u) ** (-1.0 / self.eta) - 1.0)

    def to_json(self) -> dict:
        return {"kind": "pareto_tail", "alpha": self.alpha, "eta": self.eta}


@dataclass(frozen=True)
class PowerLawSeed(SeedDistribution):
    """Pure power tail: F(x) = 1 - (alpha / x)**(beta - 1) on x >= alpha.

    This is the scaling limit of the truncated power-law mixing family with
    the same (alpha, beta); its mean is finite only for beta > 2.
    """

    alpha: float
    beta: float
    kind = "power_law"

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 1):
            raise ParameterError("power law seed needs alpha > 0 and beta > 1")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            val = 1.0 - (self.alpha / x) ** (self.beta - 1.0)
        return np.where(x > self.alpha, val, 0.0)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            val = (self.beta - 1.0) * self.alpha ** (self.beta - 1.0) * x ** (-self.beta)
        return np.where(x > self.alpha, val, 0.0)

    def mean_is_finite(self) -> bool:
        return self.beta > 2.0

    def power_tail(self):
        return self.alpha ** (self.beta - 1.0), self.beta - 1.0

    def inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        return self.alpha * (1.0 - u) ** (-1.0 / (self.beta - 1.0))

    def laplace(self, s: float) -> float:
        # (beta-1) alpha^(beta-1) s^(beta-1) Gamma(1-beta, alpha s): the
        # generic quadrature loses the slow tail at small s, the closed form
        # does not
        if s < 0:
            raise ParameterError("laplace transform argument must be >= 0")
        if s == 0.0:
            return 1.0
        bm1 = self.beta - 1.0
        return bm1 * (self.alpha * s) ** bm1 * _upper_gamma(1.0 - self.beta,
                                                           self.alpha * s)

    def t_laplace(self, s: float) -> float:
        if s <= 0:
            raise ParameterError("t-weighted laplace transform needs s > 0")
        bm1 = self.beta - 1.0
        return (bm1 * self.alpha ** bm1 * s ** (self.beta - 2.0)
                * _upper_gamma(2.0 - self.beta, self.alpha * s))

    def _support(self):
        return self.alpha, np.inf

    def to_json(self) -> dict:
        return {"kind": "power_law", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class LerchSeed(SeedDistribution):
    """Exponential-mixture seed whose Poisson mixture is the Lerch zipf pmf.

    The density is, for x > 0 and alpha > 1, s > 1,

        f(x) = Z^-1 * integral_0^inf exp(-x u) log(1+u)**(s-1) (1+u)**(-alpha) du

    with Z = Gamma(s) * Phi(1, s, alpha) and Phi(1, s, alpha) the Hurwitz-type
    normalizer sum_{k>=0} (alpha+k)**(-s).  The u-integral form comes from the
    change of variable u = exp(tau) - 1 in the defining tau-integral; it keeps
    the integrand bounded at the origin (it vanishes like u**(s-1)).
    """

    alpha: float
    s: float
    kind = "lerch"

    def __post_init__(self):
        if not (self.alpha > 1 and self.s > 1):
            raise ParameterError("lerch seed needs alpha > 1 and s > 1")

    def _norm(self) -> float:
        return float(special.gamma(self.s) * special.zeta(self.s, self.alpha))

    def _log_weight(self, u):
        # log of log(1+u)**(s-1) * (1+u)**(-alpha), the mixing weight sans 1/Z
        with np.errstate(divide="ignore"):
            return (self.s - 1.0) * np.log(np.log1p(u)) - self.alpha * np.log1p(u)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        z = self._norm()

        def one(xv: float) -> float:
            if xv <= 0:
                return 0.0
            val = checked_quad(
                lambda u: math.exp(self._log_weight(u) - xv * u) if u > 0 else 0.0,
                0.0, np.inf, rel_tol=1e-9)
            return val / z

        if x.ndim == 0:
            return one(float(x))
        return np.array([one(xv) for xv in x.ravel()]).reshape(x.shape)

    def cdf(self, x):
        # integral_0^x f collapses to a single u-integral of (1-exp(-xu))/u
        x = np.asarray(x, dtype=float)
        z = self._norm()

        def one(xv: float) -> float:
            if xv <= 0:
                return 0.0
            val = checked_quad(
                lambda u: math.exp(self._log_weight(u)) * (-math.expm1(-xv * u)) / u
                if u > 0 else 0.0,
                0.0, np.inf, rel_tol=1e-9)
            return val / z

        if x.ndim == 0:
            return one(float(x))
        return np.array([one(xv) for xv in x.ravel()]).reshape(x.shape)

    def mean_is_finite(self) -> bool:
        # mean transfers from the pmf tail (alpha+k)**(-s): finite iff s > 2
        return self.s > 2.0

    def laplace(self, s: float) -> float:
        if s < 0:
            raise ParameterError("laplace transform argument must be >= 0")
        if s == 0:
            return 1.0
        z = self._norm()
        val = checked_quad(
            lambda u: math.exp(self._log_weight(u)) / (u + s) if u > 0 else 0.0,
            0.0, np.inf, rel_tol=1e-9)
        return val / z

    def t_laplace(self, s: float) -> float:
        if s <= 0:
            raise ParameterError("t-weighted laplace transform needs s > 0")
        z = self._norm()
        val = checked_quad(
            lambda u: math.exp(self._log_weight(u)) / (u + s) ** 2 if u > 0 else 0.0,
            0.0, np.inf, rel_tol=1e-9)
        return val / z

    def to_json(self) -> dict:
        return {"kind": "lerch", "alpha": self.alpha, "s": self.s}


_SEED_KINDS = {
    "dirac": lambda d: DiracSeed(t0=float(d["t0"])),
    "exponential": lambda d: ExponentialSeed(gamma=float(d["gamma"])),
    "gamma": lambda d: GammaSeed(r=float(d["r"]), gamma=float(d["gamma"])),
    "pareto_tail": lambda d: ParetoTailSeed(alpha=float(d["alpha"]), eta=float(d["eta"])),
    "power_law": lambda d: PowerLawSeed(alpha=float(d["alpha"]), beta=float(d["beta"])),
    "lerch": lambda d: LerchSeed(alpha=float(d["alpha"]), s=float(d["s"])),
}


def seed_from_json(data: dict) -> SeedDistribution:
    """Rebuild a seed distribution from its JSON dict (see ``to_json``)."""
    try:
        kind = data["kind"]
    except (KeyError, TypeError) as exc:
        raise ParameterError("seed JSON needs a 'kind' discriminator") from exc
    try:
        builder = _SEED_KINDS[kind]
    except KeyError as exc:
        raise ParameterError(f"unknown seed kind {kind!r}") from exc
    return builder(data)
