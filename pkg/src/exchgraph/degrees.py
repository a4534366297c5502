"""Exact finite-n degree laws and their large-n limit families.

Out-degrees: a row with bias theta has Binomial(n, theta) ones, so the exact
out-degree pmf is the mixing-averaged binomial

    P{S_n = k} = C(n, k) * E theta**k (1 - theta)**(n - k),

computed through the log-space row polynomial of :mod:`exchgraph.mixing`.
In-degrees: a column collects one Bernoulli(mu_n) entry from each of the m
independent rows, so the exact in-degree law is Binomial(m, mu_n).

Limit families: when n * theta converges to a seed distribution F, out-degrees
converge to the Poisson mixture integral t**k e**-t / k! dF(t).  Closed forms
of that mixture for the named seeds (geometric, negative binomial, power-law
tail, Lerch zipf, hierarchical two-term combination) are implemented directly
and cross-checked against the quadrature route in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._numerics import checked_quad, log_quad
from .errors import ParameterError
from .mixing import (MixingSpec, DiracMixing, HierarchicalMixing, PowerLawMixing,
                     SeedCdfMixing, log_row_prob, moment)
from .seeds import (SeedDistribution, DiracSeed, ExponentialSeed, GammaSeed,
                    LerchSeed, PowerLawSeed, seed_from_json)

__all__ = [
    "LimitLaw",
    "PoissonLaw",
    "PoissonMixtureLaw",
    "GeometricLaw",
    "NegativeBinomialLaw",
    "PowerLawTailLaw",
    "LerchZipfLaw",
    "HierarchicalMixtureLaw",
    "limit_law_from_json",
    "default_limit_law",
    "out_pmf_exact",
    "in_pmf_exact",
    "limit_pmf",
    "tail_asymptote",
    "moment_transfer_check",
    "MomentTransferReport",
    "total_variation",
    "write_pmf_table",
]


def _check_orders(k) -> np.ndarray:
    ks = np.atleast_1d(np.asarray(k))
    if not np.issubdtype(ks.dtype, np.integer):
        if not np.all(ks == np.floor(ks)):
            raise ParameterError("degree values must be integers")
        ks = ks.astype(np.int64)
    if np.any(ks < 0):
        raise ParameterError("degree values must be nonnegative")
    return ks


class LimitLaw:
    """Base class for limit degree distributions on {0, 1, 2, ...}."""

    kind = "abstract"

    def _log_pmf(self, ks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_pmf(self, k):
        out = self._log_pmf(_check_orders(k))
        return out if np.ndim(k) else float(out.ravel()[0])

    def pmf(self, k):
        out = np.exp(self._log_pmf(_check_orders(k)))
        return out if np.ndim(k) else float(out.ravel()[0])

    def to_json(self) -> dict:
        raise NotImplementedError


def _poisson_window(k: int, lo: float) -> float:
    """Upper cutoff for integrals of t**k e**-t times a probability density.

    Beyond the cutoff the factor t**k e**-t has dropped by e**-120 relative
    to its own maximum, and the density integrates to at most one, so the
    discarded tail is negligible against any nonzero result.
    """
    mode = max(float(k), lo)
    return mode + math.sqrt(240.0 * (mode + 1.0)) + 120.0


@dataclass(frozen=True)
class PoissonLaw(LimitLaw):
    lam: float
    kind = "poisson"

    def __post_init__(self):
        if not self.lam >= 0:
            raise ParameterError("poisson law needs lam >= 0")

    def _log_pmf(self, ks):
        if self.lam == 0.0:
            return np.where(ks == 0, 0.0, -np.inf)
        return ks * math.log(self.lam) - self.lam - special.gammaln(ks + 1.0)

    def to_json(self):
        return {"kind": "poisson", "lam": self.lam}


@dataclass(frozen=True)
class PoissonMixtureLaw(LimitLaw):
    """p_k = integral t**k exp(-t) / k! dF(t) for a seed distribution F."""

    seed: SeedDistribution
    kind = "poisson_mixture"

    def _log_pmf(self, ks):
        if isinstance(self.seed, DiracSeed):
            return PoissonLaw(lam=self.seed.t0)._log_pmf(ks)
        out = np.empty(ks.shape, dtype=float)
        for idx, kk in np.ndenumerate(ks):
            out[idx] = self._log_pmf_one(int(kk))
        return out

    def _log_pmf_one(self, k: int) -> float:
        def logf(t):
            if t <= 0:
                return -np.inf
            d = float(self.seed.density(t))
            if d <= 0.0:
                return -np.inf
            return k * math.log(t) - t + math.log(d)

        lo = self.seed.alpha if isinstance(self.seed, PowerLawSeed) else 0.0
        hi = _poisson_window(k, lo)
        peak = min(max(float(k), lo + 0.5), hi)
        return log_quad(logf, lo, hi, points=[peak]) - special.gammaln(k + 1.0)

    def to_json(self):
        return {"kind": "poisson_mixture", "seed": self.seed.to_json()}


@dataclass(frozen=True)
class GeometricLaw(LimitLaw):
    """p_k = (gamma / (1 + gamma)) * (1 + gamma)**-k: exponential-seed mixture."""

    gamma: float
    kind = "geometric"

    def __post_init__(self):
        if not self.gamma > 0:
            raise ParameterError("geometric law needs gamma > 0")

    def _log_pmf(self, ks):
        g = self.gamma
        return math.log(g) - (ks + 1.0) * math.log1p(g)

    def to_json(self):
        return {"kind": "geometric", "gamma": self.gamma}


@dataclass(frozen=True)
class NegativeBinomialLaw(LimitLaw):
    """p_k = C(r+k-1, k) (gamma/(1+gamma))**r (1+gamma)**-k: gamma-seed mixture."""

    r: float
    gamma: float
    kind = "negative_binomial"

    def __post_init__(self):
        if not (self.r > 0 and self.gamma > 0):
            raise ParameterError("negative binomial law needs r > 0 and gamma > 0")

    def _log_pmf(self, ks):
        r, g = self.r, self.gamma
        return (special.gammaln(r + ks) - special.gammaln(ks + 1.0) - special.gammaln(r)
                + r * (math.log(g) - math.log1p(g)) - ks * math.log1p(g))

    def to_json(self):
        return {"kind": "negative_binomial", "r": self.r, "gamma": self.gamma}


@dataclass(frozen=True)
class PowerLawTailLaw(LimitLaw):
    """Poisson mixture of the pure power-tail seed on (alpha, inf).

    p_k = alpha**(beta-1) (beta-1) / k! * integral_alpha^inf t**(k-beta) e**-t dt,
    which decays like k**-beta.  Single values go through log-space quadrature;
    bulk ranges use the stable upward recurrence of the incomplete-gamma-type
    integral G_k = integral t**(k-beta) e**-t dt,

        G_{k+1} = (k+1-beta) G_k + alpha**(k+1-beta) e**-alpha,

    which tracks the dominant solution and so keeps relative accuracy.
    """

    alpha: float
    beta: float
    kind = "power_law_tail"

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 1):
            raise ParameterError("power law tail needs alpha > 0 and beta > 1")

    def _log_G(self, k: int) -> float:
        def logf(t):
            return (k - self.beta) * math.log(t) - t if t > 0 else -np.inf

        hi = _poisson_window(k, self.alpha)
        peak = min(max(self.alpha, float(k) - self.beta), hi)
        return log_quad(logf, self.alpha, hi, points=[peak])

    def _log_prefactor(self, ks: np.ndarray) -> np.ndarray:
        return ((self.beta - 1.0) * math.log(self.alpha) + math.log(self.beta - 1.0)
                - special.gammaln(ks + 1.0))

    def _log_pmf(self, ks):
        logG = np.array([self._log_G(int(kk)) for kk in ks.ravel()]).reshape(ks.shape)
        return self._log_prefactor(ks) + logG

    def log_pmf_range(self, k_max: int) -> np.ndarray:
        """log pmf for all k = 0..k_max via the upward recurrence."""
        ks = np.arange(k_max + 1)
        logG = np.empty(k_max + 1)
        k_direct = min(k_max, int(math.ceil(self.beta)) + 1)
        for kk in range(k_direct + 1):
            logG[kk] = self._log_G(kk)
        la, a = math.log(self.alpha), self.alpha
        for kk in range(k_direct, k_max):
            c = kk + 1.0 - self.beta
            logG[kk + 1] = np.logaddexp(math.log(c) + logG[kk], c * la - a)
        return self._log_prefactor(ks) + logG

    def to_json(self):
        return {"kind": "power_law_tail", "alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class LerchZipfLaw(LimitLaw):
    """p_k = (alpha + k)**-s / Phi(1, s, alpha): the Lerch-seed mixture."""

    alpha: float
    s: float
    kind = "lerch_zipf"

    def __post_init__(self):
        if not (self.alpha > 0 and self.s > 1):
            raise ParameterError("lerch zipf law needs alpha > 0 and s > 1")

    def _log_pmf(self, ks):
        norm = float(special.zeta(self.s, self.alpha))
        return -self.s * np.log(self.alpha + ks) - math.log(norm)

    def to_json(self):
        return {"kind": "lerch_zipf", "alpha": self.alpha, "s": self.s}


@dataclass(frozen=True)
class HierarchicalMixtureLaw(LimitLaw):
    """Two-term combination arising from a power-law cutoff over power laws.

    p_k = (g-1)/(g-b) p_{A,b}(k) - (b-1)/(g-b) p_{A,g}(k) with b = beta,
    g = gamma_exp; equals the exact double integral of the two-level model.
    """

    A: float
    beta: float
    gamma_exp: float
    kind = "hierarchical_mixture"

    def __post_init__(self):
        if not (self.A > 0 and self.gamma_exp > self.beta > 2):
            raise ParameterError("hierarchical mixture needs gamma_exp > beta > 2 and A > 0")

    def _parts(self):
        return (PowerLawTailLaw(alpha=self.A, beta=self.beta),
                PowerLawTailLaw(alpha=self.A, beta=self.gamma_exp))

    def _pmf_array(self, ks: np.ndarray) -> np.ndarray:
        low, high = self._parts()
        b, g = self.beta, self.gamma_exp
        return ((g - 1.0) / (g - b) * np.exp(low._log_pmf(ks))
                - (b - 1.0) / (g - b) * np.exp(high._log_pmf(ks)))

    def pmf(self, k):
        out = self._pmf_array(_check_orders(k))
        return out if np.ndim(k) else float(out.ravel()[0])

    def _log_pmf(self, ks):
        with np.errstate(divide="ignore"):
            return np.log(self._pmf_array(ks))

    def pmf_range(self, k_max: int) -> np.ndarray:
        low, high = self._parts()
        b, g = self.beta, self.gamma_exp
        return ((g - 1.0) / (g - b) * np.exp(low.log_pmf_range(k_max))
                - (b - 1.0) / (g - b) * np.exp(high.log_pmf_range(k_max)))

    def to_json(self):
        return {"kind": "hierarchical_mixture", "A": self.A, "beta": self.beta,
                "gamma_exp": self.gamma_exp}


_LAW_KINDS = {
    "poisson": lambda d: PoissonLaw(lam=float(d["lam"])),
    "poisson_mixture": lambda d: PoissonMixtureLaw(seed=seed_from_json(d["seed"])),
    "geometric": lambda d: GeometricLaw(gamma=float(d["gamma"])),
    "negative_binomial": lambda d: NegativeBinomialLaw(r=float(d["r"]), gamma=float(d["gamma"])),
    "power_law_tail": lambda d: PowerLawTailLaw(alpha=float(d["alpha"]), beta=float(d["beta"])),
    "lerch_zipf": lambda d: LerchZipfLaw(alpha=float(d["alpha"]), s=float(d["s"])),
    "hierarchical_mixture": lambda d: HierarchicalMixtureLaw(
        A=float(d["A"]), beta=float(d["beta"]), gamma_exp=float(d["gamma_exp"])),
}


def limit_law_from_json(data: dict) -> LimitLaw:
    try:
        kind = data["kind"]
        return _LAW_KINDS[kind](data)
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"bad limit law JSON {data!r}") from exc


def default_limit_law(spec: MixingSpec) -> LimitLaw:
    """The out-degree limit naturally paired with a mixing law."""
    if isinstance(spec, DiracMixing):
        return PoissonLaw(lam=spec.lam)
    if isinstance(spec, PowerLawMixing):
        return PowerLawTailLaw(alpha=spec.alpha, beta=spec.beta)
    if isinstance(spec, HierarchicalMixing):
        return HierarchicalMixtureLaw(A=spec.A, beta=spec.beta, gamma_exp=spec.gamma_exp)
    if isinstance(spec, SeedCdfMixing):
        seed = spec.seed
        if isinstance(seed, ExponentialSeed):
            return GeometricLaw(gamma=seed.gamma)
        if isinstance(seed, GammaSeed):
            return NegativeBinomialLaw(r=seed.r, gamma=seed.gamma)
        if isinstance(seed, LerchSeed):
            return LerchZipfLaw(alpha=seed.alpha, s=seed.s)
        if isinstance(seed, PowerLawSeed):
            return PowerLawTailLaw(alpha=seed.alpha, beta=seed.beta)
        return PoissonMixtureLaw(seed=seed)
    raise ParameterError(f"no default limit law for mixing variant {spec.variant!r}")


# ---------------------------------------------------------------------------
# exact finite-n laws


def out_pmf_exact(spec: MixingSpec, n: int, k) -> np.ndarray | float:
    """P{out-degree = k} for a row of width n under the mixing law."""
    ks = _check_orders(k)
    if np.any(ks > n):
        raise ParameterError(f"out-degree cannot exceed n={n}")
    out = np.empty(ks.shape, dtype=float)
    for idx, kk in np.ndenumerate(ks):
        logc = special.gammaln(n + 1.0) - special.gammaln(kk + 1.0) - special.gammaln(n - kk + 1.0)
        out[idx] = math.exp(logc + log_row_prob(spec, n, int(kk)))
    return out if np.ndim(k) else float(out.ravel()[0])


def in_pmf_exact(spec: MixingSpec, n: int, m: int, k) -> np.ndarray | float:
    """P{in-degree = k} = Binomial(m, mu_n) pmf at k."""
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ParameterError(f"row count m must be a positive integer, got {m!r}")
    ks = _check_orders(k)
    if np.any(ks > m):
        raise ParameterError(f"in-degree cannot exceed m={m}")
    mu = moment(spec, n, 1)
    out = np.empty(ks.shape, dtype=float)
    for idx, kk in np.ndenumerate(ks):
        logc = special.gammaln(m + 1.0) - special.gammaln(kk + 1.0) - special.gammaln(m - kk + 1.0)
        if mu == 0.0:
            out[idx] = 1.0 if kk == 0 else 0.0
        elif mu == 1.0:
            out[idx] = 1.0 if kk == m else 0.0
        else:
            out[idx] = math.exp(logc + kk * math.log(mu) + (m - kk) * math.log1p(-mu))
    return out if np.ndim(k) else float(out.ravel()[0])


def limit_pmf(law: LimitLaw, k) -> np.ndarray | float:
    """Evaluate a limit law pmf at k (vectorized)."""
    return law.pmf(k)


def tail_asymptote(alpha: float, beta: float, k) -> np.ndarray | float:
    """Leading large-k form of the power-tail mixture: a**(b-1) (b-1) k**-b."""
    if not (alpha > 0 and beta > 1):
        raise ParameterError("tail asymptote needs alpha > 0 and beta > 1")
    ks = np.asarray(k, dtype=float)
    out = alpha ** (beta - 1.0) * (beta - 1.0) * ks ** (-beta)
    return out if np.ndim(k) else float(out)


# ---------------------------------------------------------------------------
# moment transfer diagnostic


@dataclass(frozen=True)
class MomentTransferReport:
    gamma_ord: float
    k_cap: int
    pmf_partial: float
    pmf_prev_decade: float
    pmf_stabilized: bool
    mixing_partial: float
    mixing_prev_decade: float
    mixing_stabilized: bool
    agree: bool
    both_finite_verdict: bool


_STABILIZE_REL = 1e-6


def _law_pmf_array(law: LimitLaw, k_max: int) -> np.ndarray:
    if isinstance(law, PowerLawTailLaw):
        return np.exp(law.log_pmf_range(k_max))
    if isinstance(law, HierarchicalMixtureLaw):
        return law.pmf_range(k_max)
    if isinstance(law, PoissonMixtureLaw) and isinstance(law.seed, DiracSeed):
        return np.exp(PoissonLaw(lam=law.seed.t0).log_pmf(np.arange(k_max + 1)))
    return np.exp(law.log_pmf(np.arange(k_max + 1)))


def _law_seed_moment(law: LimitLaw, gamma_ord: float, cap: float) -> float:
    """integral_0^cap t**gamma_ord dF(t) for the seed behind a limit law."""
    if isinstance(law, PoissonLaw):
        return law.lam ** gamma_ord if law.lam <= cap else 0.0
    if isinstance(law, GeometricLaw):
        seed: SeedDistribution = ExponentialSeed(gamma=law.gamma)
    elif isinstance(law, NegativeBinomialLaw):
        seed = GammaSeed(r=law.r, gamma=law.gamma)
    elif isinstance(law, PowerLawTailLaw):
        seed = PowerLawSeed(alpha=law.alpha, beta=law.beta)
    elif isinstance(law, LerchZipfLaw):
        seed = LerchSeed(alpha=law.alpha, s=law.s)
    elif isinstance(law, HierarchicalMixtureLaw):
        b, g = law.beta, law.gamma_exp
        low = _law_seed_moment(PowerLawTailLaw(alpha=law.A, beta=b), gamma_ord, cap)
        high = _law_seed_moment(PowerLawTailLaw(alpha=law.A, beta=g), gamma_ord, cap)
        return (g - 1.0) / (g - b) * low - (b - 1.0) / (g - b) * high
    elif isinstance(law, PoissonMixtureLaw):
        seed = law.seed
    else:
        raise ParameterError(f"no seed associated with law kind {law.kind!r}")
    if isinstance(seed, DiracSeed):
        return seed.t0 ** gamma_ord if seed.t0 <= cap else 0.0
    lo = seed.alpha if isinstance(seed, PowerLawSeed) else 0.0
    if cap <= lo:
        return 0.0
    return checked_quad(lambda t: t ** gamma_ord * float(seed.density(t)),
                        lo, cap, rel_tol=1e-9)


def moment_transfer_check(law: LimitLaw, gamma_ord: float, k_cap: int = 10_000) -> MomentTransferReport:
    """Check that sum k**g p_k and integral t**g dF stabilize (or grow) together.

    Stabilization means the partial quantity grew by less than a relative
    1e-6 over the last decade of the cap.  Finiteness of the two moments is
    equivalent, so the two stabilization flags must agree; the verdict field
    is their common value.
    """
    if not gamma_ord > 0:
        raise ParameterError("moment order gamma_ord must be positive")
    if k_cap < 100:
        raise ParameterError("k_cap must be at least 100 for a stabilization check")
    pmf = _law_pmf_array(law, k_cap)
    ks = np.arange(k_cap + 1, dtype=float)
    weights = ks ** gamma_ord
    weights[0] = 0.0
    cum = np.cumsum(weights * pmf)
    s_full, s_prev = float(cum[k_cap]), float(cum[k_cap // 10])
    pmf_stab = (s_full - s_prev) <= _STABILIZE_REL * s_full

    m_full = _law_seed_moment(law, gamma_ord, float(k_cap))
    m_prev = _law_seed_moment(law, gamma_ord, float(k_cap // 10))
    mix_stab = (m_full - m_prev) <= _STABILIZE_REL * m_full

    return MomentTransferReport(
        gamma_ord=gamma_ord, k_cap=k_cap,
        pmf_partial=s_full, pmf_prev_decade=s_prev, pmf_stabilized=pmf_stab,
        mixing_partial=m_full, mixing_prev_decade=m_prev, mixing_stabilized=mix_stab,
        agree=(pmf_stab == mix_stab), both_finite_verdict=(pmf_stab and mix_stab))


# ---------------------------------------------------------------------------
# helpers shared with the CLI and tests


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """TV distance restricted to the common support grid of p and q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ParameterError("pmf arrays must share a shape")
    return 0.5 * float(np.abs(p - q).sum())


def write_pmf_table(path, ks, exact, limit) -> None:
    """CSV with columns k,exact,limit,abs_diff."""
    ks = np.atleast_1d(ks)
    exact = np.atleast_1d(exact)
    limit = np.atleast_1d(limit)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,exact,limit,abs_diff\n")
        for kk, ev, lv in zip(ks, exact, limit):
            ev, lv = float(ev), float(lv)
            fh.write(f"{int(kk)},{ev!r},{lv!r},{abs(ev - lv)!r}\n")
