"""Row-bias mixing laws and their moments, tails, and transforms.

A mixing law ``pi_n`` is a probability measure on [0, 1] governing the bias
theta of a matrix row of width n.  The families implemented here:

``DiracMixing(lam)``
    Point mass at theta = lam / n.
``PowerLawMixing(alpha, beta)``
    Density proportional to theta**(-beta) on (alpha/n, 1]; needs n > alpha.
``ModulatedPowerLawMixing(alpha, beta, g_table)``
    Density proportional to g(n theta) * theta**(-beta) on (alpha/n, 1] with
    g tabulated, piecewise linear, and bounded away from 0 and infinity.
``SeedCdfMixing(seed)``
    CDF x -> F(x n) / F(n) built from a seed distribution F on [0, inf).
``HierarchicalMixing(A, beta, gamma_exp)``
    First draw a cutoff a ~ const * a**(-gamma) on [A, n/2], then theta from
    ``PowerLawMixing(a, beta)``; requires gamma_exp > beta > 2.

Public operations (all dispatch on the spec variant after validating it
against n): :func:`sample_theta` / :func:`sample_thetas`, :func:`moment`,
:func:`tail`, :func:`xi`, and the log-space row polynomial
:func:`log_row_prob` that degree and motif formulas build on.

Numerical policy: closed forms for Dirac and the pure power family; adaptive
quadrature after the substitution t = n * theta everywhere else, so the
integrand is O(1) near the lower support edge.  The signed moment
``xi(i) = E (1 - 2 theta)**i`` is expanded into ordinary moments for small i
and split at theta = 1/2 into two single-sign integrals for large i, which
avoids the alternating-sum cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from ._numerics import checked_quad, kahan_sum, log_quad
from .errors import ParameterError
from .seeds import SeedDistribution, DiracSeed, PowerLawSeed, seed_from_json

__all__ = [
    "MixingSpec",
    "DiracMixing",
    "PowerLawMixing",
    "ModulatedPowerLawMixing",
    "SeedCdfMixing",
    "HierarchicalMixing",
    "mixing_from_json",
    "implied_seed",
    "sample_theta",
    "sample_thetas",
    "moment",
    "tail",
    "xi",
    "log_row_prob",
]

# Binomial expansion of (1 - 2 theta)**i is safe up to this order; beyond it
# the alternating sum loses more digits than the split quadrature does.
_XI_EXPANSION_MAX = 10


def _log_power_int(a: float, b: float, p: float) -> float:
    """log of integral_a^b t**p dt for 0 < a < b, any real p."""
    if not 0 < a < b:
        raise ParameterError(f"bad power-integral range [{a}, {b}]")
    q = p + 1.0
    if q == 0.0:
        return math.log(math.log(b / a))
    if q > 0:
        return q * math.log(b) + math.log1p(-math.exp(q * math.log(a / b))) - math.log(q)
    return q * math.log(a) + math.log1p(-math.exp(q * math.log(b / a))) - math.log(-q)


def _power_int(a: float, b: float, p: float) -> float:
    if b <= a:
        return 0.0
    return math.exp(_log_power_int(a, b, p))


class MixingSpec:
    """Base class; concrete families fill in the hooks below."""

    variant = "abstract"

    def validate(self, n: int) -> None:
        if not (isinstance(n, (int, np.integer)) and n >= 1):
            raise ParameterError(f"matrix width n must be a positive integer, got {n!r}")

    # hooks ------------------------------------------------------------------
    def _moment(self, n: int, i: int) -> float:
        raise NotImplementedError

    def _tail(self, n: int, t: float) -> float:
        raise NotImplementedError

    def _partial(self, n: int, f, lo: float, hi: float) -> float:
        """integral of f(theta) over [lo, hi] against pi_n (normalized)."""
        raise NotImplementedError

    def _log_row_prob(self, n: int, r: int) -> float:
        raise NotImplementedError

    def _sample(self, n: int, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def _xi(self, n: int, i: int) -> float:
        if i == 0:
            return 1.0
        if i <= _XI_EXPANSION_MAX:
            terms = [math.comb(i, j) * (-2.0) ** j * self._moment(n, j)
                     for j in range(i + 1)]
            return kahan_sum(terms)
        head = self._partial(n, lambda th: (1.0 - 2.0 * th) ** i, 0.0, 0.5)
        sign = -1.0 if i % 2 else 1.0
        tail_part = self._partial(n, lambda th: (2.0 * th - 1.0) ** i, 0.5, 1.0)
        return head + sign * tail_part

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class DiracMixing(MixingSpec):
    """All rows share the deterministic bias theta = lam / n."""

    lam: float
    variant = "dirac"

    def __post_init__(self):
        if not self.lam >= 0:
            raise ParameterError("dirac mixing needs lam >= 0")

    def validate(self, n: int) -> None:
        super().validate(n)
        if self.lam > n:
            raise ParameterError(f"dirac mixing needs lam <= n, got lam={self.lam}, n={n}")

    def _theta(self, n: int) -> float:
        return self.lam / n

    def _moment(self, n: int, i: int) -> float:
        return 1.0 if i == 0 else self._theta(n) ** i

    def _tail(self, n: int, t: float) -> float:
        return 1.0 if self._theta(n) > t else 0.0

    def _partial(self, n, f, lo, hi):
        th = self._theta(n)
        inside = (lo < th <= hi) or (lo == 0.0 and th == 0.0)
        return float(f(th)) if inside else 0.0

    def _xi(self, n: int, i: int) -> float:
        return (1.0 - 2.0 * self._theta(n)) ** i

    def _log_row_prob(self, n: int, r: int) -> float:
        th = self._theta(n)
        if th == 0.0:
            return 0.0 if r == 0 else -np.inf
        if th == 1.0:
            return 0.0 if r == n else -np.inf
        return r * math.log(th) + (n - r) * math.log1p(-th)

    def _sample(self, n, rng, size):
        return np.full(size, self._theta(n))

    def to_json(self) -> dict:
        return {"variant": "dirac", "lambda": self.lam}


@dataclass(frozen=True)
class PowerLawMixing(MixingSpec):
    """Density Z_n**-1 theta**(-beta) on (alpha/n, 1]."""

    alpha: float
    beta: float
    variant = "power_law"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError("power law mixing needs alpha > 0")
        if not self.beta > 1:
            raise ParameterError("power law mixing needs beta > 1")

    def validate(self, n: int) -> None:
        super().validate(n)
        if not n > self.alpha:
            raise ParameterError(
                f"power law mixing needs n > alpha, got n={n}, alpha={self.alpha}")

    # All integrals are ratios of power integrals over theta in (alpha/n, 1].
    def _moment(self, n: int, i: int) -> float:
        lo = self.alpha / n
        return math.exp(_log_power_int(lo, 1.0, i - self.beta)
                        - _log_power_int(lo, 1.0, -self.beta))

    def _tail(self, n: int, t: float) -> float:
        lo = self.alpha / n
        if t >= 1.0:
            return 0.0
        if t <= lo:
            return 1.0
        return math.exp(_log_power_int(t, 1.0, -self.beta)
                        - _log_power_int(lo, 1.0, -self.beta))

    def _log_norm_t(self, n: int) -> float:
        # log integral_alpha^n t**(-beta) dt, the t-space normalizer
        return _log_power_int(self.alpha, float(n), -self.beta)

    def _partial(self, n, f, lo, hi):
        a = max(self.alpha, lo * n)
        b = min(float(n), hi * n)
        if b <= a:
            return 0.0
        val = checked_quad(lambda t: f(t / n) * t ** (-self.beta), a, b)
        return val * math.exp(-self._log_norm_t(n))

    def _log_row_prob(self, n: int, r: int) -> float:
        def logf(t):
            if t <= 0 or t > n:
                return -np.inf
            out = -self.beta * math.log(t)
            if r:
                out += r * math.log(t / n)
            if r < n:
                if t == n:
                    return -np.inf
                out += (n - r) * math.log1p(-t / n)
            return out

        peak = min(max(self.alpha, float(r)), float(n))
        return (log_quad(logf, self.alpha, float(n), points=[peak])
                - self._log_norm_t(n))

    def _inverse_cdf(self, n: int, u: np.ndarray) -> np.ndarray:
        # F(x) = ((n/alpha)**(beta-1) - x**(1-beta)) / ((n/alpha)**(beta-1) - 1)
        bm1 = self.beta - 1.0
        top = (n / self.alpha) ** bm1
        return (top - u * (top - 1.0)) ** (-1.0 / bm1)

    def _sample(self, n, rng, size):
        return self._inverse_cdf(n, rng.random(size))

    def to_json(self) -> dict:
        return {"variant": "power_law", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class ModulatedPowerLawMixing(MixingSpec):
    """Density proportional to g(n theta) theta**(-beta) on (alpha/n, 1].

    ``g_table`` is a sequence of (tau, value) pairs defining g by linear
    interpolation on tau = n * theta, held constant beyond either end.  Every
    table value must be strictly positive; the implied bounds c1 = min g and
    c2 = max g are exposed as attributes.  Because g is piecewise linear, all
    moment/tail/CDF integrals reduce to closed-form power integrals per
    segment; only the signed moment of high order falls back to quadrature.
    """

    alpha: float
    beta: float
    g_table: tuple = field()
    variant = "modulated_power_law"

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 1):
            raise ParameterError("modulated power law needs alpha > 0 and beta > 1")
        pts = tuple((float(t), float(v)) for t, v in self.g_table)
        if len(pts) < 2:
            raise ParameterError("g table needs at least two points")
        taus = [t for t, _ in pts]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ParameterError("g table abscissae must be strictly increasing")
        if any(t < 0 for t in taus):
            raise ParameterError("g table abscissae must be >= 0")
        if any(v <= 0 for _, v in pts):
            raise ParameterError("g table values must be strictly positive")
        object.__setattr__(self, "g_table", pts)

    @property
    def c1(self) -> float:
        return min(v for _, v in self.g_table)

    @property
    def c2(self) -> float:
        return max(v for _, v in self.g_table)

    def validate(self, n: int) -> None:
        super().validate(n)
        if not n > self.alpha:
            raise ParameterError(
                f"modulated power law needs n > alpha, got n={n}, alpha={self.alpha}")

    def modulation(self, t):
        """The tabulated factor g evaluated at t = n * theta (clamped at the ends)."""
        taus = np.array([p[0] for p in self.g_table])
        vals = np.array([p[1] for p in self.g_table])
        return np.interp(t, taus, vals)

    def _segments(self, n: int):
        """Break [alpha, n] at the g knots; g is affine A + B t on each piece."""
        taus = [p[0] for p in self.g_table]
        vals = [p[1] for p in self.g_table]
        cuts = sorted({self.alpha, float(n), *[t for t in taus if self.alpha < t < n]})
        segs = []
        for a, b in zip(cuts, cuts[1:]):
            mid = 0.5 * (a + b)
            k = np.searchsorted(taus, mid) - 1
            if k < 0:
                segs.append((a, b, vals[0], 0.0))
            elif k >= len(taus) - 1:
                segs.append((a, b, vals[-1], 0.0))
            else:
                slope = (vals[k + 1] - vals[k]) / (taus[k + 1] - taus[k])
                segs.append((a, b, vals[k] - slope * taus[k], slope))
        return segs

    def _seg_mass(self, a, b, const, slope, p):
        """integral_a^b (const + slope t) t**p dt in closed form."""
        out = const * _power_int(a, b, p) if const else 0.0
        if slope:
            out += slope * _power_int(a, b, p + 1.0)
        return out

    def _t_integral(self, n: int, p: float, lo=None, hi=None) -> float:
        """integral g(t) t**(p - beta) dt over [lo, hi] intersect [alpha, n]."""
        total = 0.0
        lo = self.alpha if lo is None else max(lo, self.alpha)
        hi = float(n) if hi is None else min(hi, float(n))
        for a, b, const, slope in self._segments(n):
            aa, bb = max(a, lo), min(b, hi)
            if bb > aa:
                total += self._seg_mass(aa, bb, const, slope, p - self.beta)
        return total

    def _moment(self, n: int, i: int) -> float:
        return self._t_integral(n, i) / (n ** i * self._t_integral(n, 0))

    def _tail(self, n: int, t: float) -> float:
        if t >= 1.0:
            return 0.0
        return self._t_integral(n, 0, lo=t * n) / self._t_integral(n, 0)

    def _partial(self, n, f, lo, hi):
        a = max(self.alpha, lo * n)
        b = min(float(n), hi * n)
        if b <= a:
            return 0.0
        knots = [p[0] for p in self.g_table if a < p[0] < b]
        val = checked_quad(lambda t: f(t / n) * self.modulation(t) * t ** (-self.beta),
                           a, b, points=knots[:64])
        return val / self._t_integral(n, 0)

    def _log_row_prob(self, n: int, r: int) -> float:
        knots = [p[0] for p in self.g_table if self.alpha < p[0] < n]

        def logf(t):
            if t <= 0 or t >= n:
                return -np.inf if r < n else -self.beta * math.log(t) + math.log(self.modulation(t))
            out = -self.beta * math.log(t) + math.log(self.modulation(t))
            if r:
                out += r * math.log(t / n)
            out += (n - r) * math.log1p(-t / n)
            return out

        peak = min(max(self.alpha, float(r)), float(n))
        return (log_quad(logf, self.alpha, float(n), points=[peak] + knots[:32])
                - math.log(self._t_integral(n, 0)))

    def _sample(self, n, rng, size):
        u = rng.random(size)
        segs = self._segments(n)
        masses = np.array([self._seg_mass(a, b, c, s, -self.beta) for a, b, c, s in segs])
        cum = np.concatenate([[0.0], np.cumsum(masses)])
        targets = u * cum[-1]
        idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(segs) - 1)
        lo = np.array([segs[k][0] for k in idx])
        hi = np.array([segs[k][1] for k in idx])
        rem = targets - cum[idx]
        consts = np.array([segs[k][2] for k in idx])
        slopes = np.array([segs[k][3] for k in idx])
        left = lo.copy()
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            m = np.array([self._seg_mass(a, x, c, s, -self.beta)
                          for a, x, c, s in zip(left, mid, consts, slopes)])
            under = m < rem
            lo = np.where(under, mid, lo)
            hi = np.where(under, hi, mid)
        return 0.5 * (lo + hi) / n

    def to_json(self) -> dict:
        return {"variant": "modulated_power_law", "alpha": self.alpha,
                "beta": self.beta, "g_table": [list(p) for p in self.g_table]}


@dataclass(frozen=True)
class SeedCdfMixing(MixingSpec):
    """theta has CDF F(x n) / F(n) on [0, 1] for a seed distribution F."""

    seed: SeedDistribution
    variant = "seed_cdf"

    def validate(self, n: int) -> None:
        super().validate(n)
        if float(self.seed.cdf(float(n))) <= 0.0:
            raise ParameterError(f"seed cdf has no mass on [0, {n}]")

    def _mass(self, n: int) -> float:
        return float(self.seed.cdf(float(n)))

    def _moment(self, n: int, i: int) -> float:
        if i == 0:
            return 1.0
        return self._partial(n, lambda th: th ** i, 0.0, 1.0)

    def _tail(self, n: int, t: float) -> float:
        if t >= 1.0:
            return 0.0
        if t < 0.0:
            return 1.0
        fn = self._mass(n)
        return (fn - float(self.seed.cdf(t * n))) / fn

    def _partial(self, n, f, lo, hi):
        if not self.seed.has_density():
            # only the Dirac seed lacks a density; delegate to a point mass
            t0 = self.seed.t0  # type: ignore[attr-defined]
            if t0 > n:
                raise ParameterError("dirac seed mass lies above n")
            th = t0 / n
            inside = (lo < th <= hi) or (lo == 0.0 and th == 0.0)
            return float(f(th)) if inside else 0.0
        a, b = max(0.0, lo * n), min(float(n), hi * n)
        if b <= a:
            return 0.0
        val = checked_quad(lambda t: f(t / n) * float(self.seed.density(t)), a, b,
                           rel_tol=1e-9)
        return val / self._mass(n)

    def _log_row_prob(self, n: int, r: int) -> float:
        if not self.seed.has_density():
            t0 = self.seed.t0  # type: ignore[attr-defined]
            return DiracMixing(lam=t0)._log_row_prob(n, r)

        def logf(t):
            if t <= 0 or t > n:
                return -np.inf
            d = float(self.seed.density(t))
            if d <= 0.0:
                return -np.inf
            out = math.log(d)
            if r:
                out += r * math.log(t / n)
            if r < n:
                if t == n:
                    return -np.inf
                out += (n - r) * math.log1p(-t / n)
            return out

        return log_quad(logf, 0.0, float(n), points=[max(float(r), 1e-3)]) \
            - math.log(self._mass(n))

    def _sample(self, n, rng, size):
        u = rng.random(size) * self._mass(n)
        return np.asarray(self.seed.inverse_cdf(u), dtype=float) / n

    def to_json(self) -> dict:
        return {"variant": "seed_cdf", "seed": self.seed.to_json()}


@dataclass(frozen=True)
class HierarchicalMixing(MixingSpec):
    """Cutoff a ~ const * a**(-gamma_exp) on [A, n/2], then power law theta.

    The per-row law is the a-marginalized mixture; the two-level ensemble in
    :mod:`exchgraph.ensemble` shares one cutoff draw across all rows instead.
    """

    A: float
    beta: float
    gamma_exp: float
    variant = "hierarchical"

    def __post_init__(self):
        if not self.A > 0:
            raise ParameterError("hierarchical mixing needs A > 0")
        if not (self.gamma_exp > self.beta > 2):
            raise ParameterError("hierarchical mixing needs gamma_exp > beta > 2")

    def validate(self, n: int) -> None:
        super().validate(n)
        if not n / 2 > self.A:
            raise ParameterError(f"hierarchical mixing needs n > 2 A, got n={n}, A={self.A}")

    def _cut_norm(self, n: int) -> float:
        return _power_int(self.A, n / 2.0, -self.gamma_exp)

    def _outer(self, n: int, inner) -> float:
        """Average inner(alpha) over the cutoff law on [A, n/2]."""
        val = checked_quad(lambda a: inner(a) * a ** (-self.gamma_exp),
                           self.A, n / 2.0, rel_tol=1e-9)
        return val / self._cut_norm(n)

    def _inner_mix(self, a: float) -> PowerLawMixing:
        return PowerLawMixing(alpha=a, beta=self.beta)

    def _moment(self, n: int, i: int) -> float:
        return self._outer(n, lambda a: self._inner_mix(a)._moment(n, i))

    def _tail(self, n: int, t: float) -> float:
        if t >= 1.0:
            return 0.0
        return self._outer(n, lambda a: self._inner_mix(a)._tail(n, t))

    def _partial(self, n, f, lo, hi):
        return self._outer(n, lambda a: self._inner_mix(a)._partial(n, f, lo, hi))

    def _log_row_prob(self, n: int, r: int) -> float:
        def inner(a):
            return math.exp(self._inner_mix(a)._log_row_prob(n, r))
        val = self._outer(n, inner)
        return math.log(val) if val > 0 else -np.inf

    def sample_cutoff(self, n: int, rng: np.random.Generator, size=None):
        """Draw the top-level cutoff(s) from const * a**(-gamma) on [A, n/2]."""
        u = rng.random() if size is None else rng.random(size)
        q = 1.0 - self.gamma_exp
        lo_p, hi_p = self.A ** q, (n / 2.0) ** q
        return (lo_p + u * (hi_p - lo_p)) ** (1.0 / q)

    def _sample(self, n, rng, size):
        cuts = self.sample_cutoff(n, rng, size)
        u = rng.random(size)
        bm1 = self.beta - 1.0
        top = (n / cuts) ** bm1
        return (top - u * (top - 1.0)) ** (-1.0 / bm1)

    def to_json(self) -> dict:
        return {"variant": "hierarchical", "A": self.A, "beta": self.beta,
                "gamma_exp": self.gamma_exp}


# ---------------------------------------------------------------------------
# public operations


def sample_theta(spec: MixingSpec, n: int, rng: np.random.Generator) -> float:
    """Draw one row bias from pi_n."""
    spec.validate(n)
    return float(spec._sample(n, rng, 1)[0])


def sample_thetas(spec: MixingSpec, n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` iid row biases from pi_n (vectorized)."""
    spec.validate(n)
    return spec._sample(n, rng, int(size))


def moment(spec: MixingSpec, n: int, i: int) -> float:
    """i-th moment of theta under pi_n; moment(spec, n, 1) is the edge probability."""
    spec.validate(n)
    if not (isinstance(i, (int, np.integer)) and i >= 0):
        raise ParameterError(f"moment order must be a nonnegative integer, got {i!r}")
    if i == 0:
        return 1.0
    return float(spec._moment(n, int(i)))


def tail(spec: MixingSpec, n: int, t: float) -> float:
    """Upper-tail mass pi_n((t, 1])."""
    spec.validate(n)
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"tail threshold must lie in [0, 1], got {t!r}")
    return float(spec._tail(n, float(t)))


def xi(spec: MixingSpec, n: int, i: int) -> float:
    """Signed moment E (1 - 2 theta)**i under pi_n; drives kernel counting."""
    spec.validate(n)
    if not (isinstance(i, (int, np.integer)) and i >= 0):
        raise ParameterError(f"signed moment order must be a nonnegative integer, got {i!r}")
    return float(spec._xi(n, int(i)))


def log_row_prob(spec: MixingSpec, n: int, r: int) -> float:
    """log E theta**r (1 - theta)**(n - r): log-probability of one fixed row
    pattern with r ones out of n under pi_n."""
    spec.validate(n)
    if not 0 <= r <= n:
        raise ParameterError(f"row weight r must lie in [0, {n}], got {r!r}")
    return float(spec._log_row_prob(n, int(r)))


def implied_seed(spec: MixingSpec) -> SeedDistribution:
    """Scaling limit of n * theta as a seed distribution, where closed-form.

    Defined for Dirac (point mass), PowerLaw (pure power tail), and SeedCdf
    (the seed itself).  Other families have no closed-form limit here.
    """
    if isinstance(spec, DiracMixing):
        if spec.lam <= 0:
            raise ParameterError("dirac mixing at 0 has a degenerate scaling limit")
        return DiracSeed(t0=spec.lam)
    if isinstance(spec, PowerLawMixing):
        return PowerLawSeed(alpha=spec.alpha, beta=spec.beta)
    if isinstance(spec, SeedCdfMixing):
        return spec.seed
    raise ParameterError(f"no closed-form seed limit for variant {spec.variant!r}")


_MIXING_KINDS = {
    "dirac": lambda d: DiracMixing(lam=float(d["lambda"])),
    "power_law": lambda d: PowerLawMixing(alpha=float(d["alpha"]), beta=float(d["beta"])),
    "modulated_power_law": lambda d: ModulatedPowerLawMixing(
        alpha=float(d["alpha"]), beta=float(d["beta"]),
        g_table=tuple((float(t), float(v)) for t, v in d["g_table"])),
    "seed_cdf": lambda d: SeedCdfMixing(seed=seed_from_json(d["seed"])),
    "hierarchical": lambda d: HierarchicalMixing(
        A=float(d["A"]), beta=float(d["beta"]), gamma_exp=float(d["gamma_exp"])),
}


def mixing_from_json(data: dict) -> MixingSpec:
    """Rebuild a mixing spec from its JSON dict (see ``to_json``)."""
    try:
        variant = data["variant"]
    except (KeyError, TypeError) as exc:
        raise ParameterError("mixing JSON needs a 'variant' discriminator") from exc
    try:
        builder = _MIXING_KINDS[variant]
    except KeyError as exc:
        raise ParameterError(f"unknown mixing variant {variant!r}") from exc
    return builder(data)
