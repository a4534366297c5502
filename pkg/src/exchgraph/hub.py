"""Extreme-value behavior of the busiest sender.

The hub is the largest out-degree among the tracked senders.  Conditional on
its bias, a row sum is Binomial(n, theta), so the hub rides the largest bias,
and a power-law bias tail puts the scaled hub in Frechet territory.  The
tracked-sender count m and the tail exponent eta = beta - 1 set the scale
b = m**(1/eta); three canonical pairings of m with n keep that scale
meaningful as n grows (see hub_limit_cdf).

Monte Carlo here samples row sums directly as Binomials, which is
law-identical to popcounting sampled bit rows and orders of magnitude
cheaper; replica streams are deterministic in (master_seed, chunk).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import spawn_rng
from .ensemble import EnsembleConfig, GraphSample, out_degrees, sample_bias_matrix
from .errors import ParameterError
from .mixing import DiracMixing, PowerLawMixing, SeedCdfMixing

__all__ = [
    "hub_statistic",
    "HubLimit",
    "hub_general_limit",
    "HubScaling",
    "hub_limit_cdf",
    "frechet_moment",
    "competing_moment_constant",
    "HubReport",
    "mc_hub_values",
    "mc_hub",
    "hub_atom_estimate",
    "write_hub_cdf",
]

_TAG_HUB = 104


def hub_statistic(sample: GraphSample) -> int:
    """Largest out-degree over the sampled sender rows."""
    return int(out_degrees(sample).max())


@dataclass(frozen=True)
class HubLimit:
    """Frechet-type reference CDF exp(-c_eta * x**-eta), optionally truncated.

    A finite cutoff pins all remaining mass there: the CDF jumps to 1 at
    x = cutoff, leaving an atom of size 1 - exp(-c_eta * cutoff**-eta).
    """

    c_eta: float
    eta: float
    cutoff: float = math.inf

    def __post_init__(self):
        if not (self.c_eta > 0 and self.eta > 0 and self.cutoff > 0):
            raise ParameterError("hub limit needs c_eta > 0, eta > 0, cutoff > 0")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            body = np.exp(-self.c_eta * np.power(np.clip(x, 1e-300, None), -self.eta))
        out = np.where(x > 0.0, body, 0.0)
        out = np.where(x >= self.cutoff, 1.0, out)
        return out if out.ndim else float(out)

    @property
    def atom_mass(self) -> float:
        if math.isinf(self.cutoff):
            return 0.0
        return 1.0 - math.exp(-self.c_eta * self.cutoff ** -self.eta)

    def to_json(self) -> dict:
        return {"c_eta": self.c_eta, "eta": self.eta,
                "cutoff": None if math.isinf(self.cutoff) else self.cutoff}


def hub_general_limit(c_eta: float, eta: float, cutoff: float = math.inf) -> HubLimit:
    """Reference CDF for a max of m rows whose bias tail is c*(n*t)**-eta.

    Any bias family whose slice tail has that shape, with m growing slowly
    enough that the remainder term m/n**eta vanishes, sends the hub over
    b = m**(1/eta) to this curve with c_eta equal to the tail constant.
    """
    return HubLimit(c_eta=float(c_eta), eta=float(eta), cutoff=float(cutoff))


@dataclass(frozen=True)
class HubScaling:
    """Tracked-sender count, hub scale, and the reference curve they produce."""

    rows: int
    scale: float
    limit: HubLimit

    def cdf(self, x):
        return self.limit.cdf(x)


def hub_limit_cdf(alpha: float, beta: float, n: int) -> HubScaling:
    """Reference hub law for the power-law bias family at size n.

    Three regimes pair the tracked-sender count with the tail exponent
    eta = beta - 1 so that the scale b = rows**(1/eta) neither collapses
    nor outruns the graph:

      beta > 2:      rows = n,                scale = n**(1/(beta-1))
      beta = 2:      rows = floor(n/log n),   scale = n/log n
      1 < beta < 2:  rows = floor(n**(beta-1)), scale = n, cutoff at 1

    In the last regime the scale is the graph size itself, so the curve is
    truncated at 1 and the leftover mass 1 - exp(-alpha**(beta-1)) sits there
    as an atom.  Simulated ensembles put far less mass at the cutoff than
    that atom claims (the bounded bias slice lifts the CDF continuously to 1
    instead); the Monte Carlo suite therefore checks the continuous part by
    KS only above beta = 2 and reports the cutoff proportion separately.
    """
    if not alpha > 0:
        raise ParameterError("hub reference law needs alpha > 0")
    if not beta > 1:
        raise ParameterError("hub reference law needs beta > 1")
    if not (isinstance(n, int) and n >= 2):
        raise ParameterError("hub reference law needs integer n >= 2")
    eta = beta - 1.0
    c_eta = alpha ** eta
    if beta > 2:
        return HubScaling(rows=n, scale=n ** (1.0 / eta),
                          limit=HubLimit(c_eta, eta))
    if beta == 2:
        scale = n / math.log(n)
        return HubScaling(rows=math.floor(scale), scale=scale,
                          limit=HubLimit(c_eta, eta))
    return HubScaling(rows=math.floor(n ** eta), scale=float(n),
                      limit=HubLimit(c_eta, eta, cutoff=1.0))


def frechet_moment(alpha: float, eta: float, d: float) -> float:
    """d-th moment of the Frechet CDF exp(-(alpha/x)**eta): alpha**d * Gamma(1 - d/eta)."""
    if not (alpha > 0 and eta > 0):
        raise ParameterError("frechet moment needs alpha > 0 and eta > 0")
    if not 0 < d < eta:
        raise ParameterError(f"moment order must lie in (0, eta); d={d}, eta={eta}")
    return alpha ** d * math.gamma(1.0 - d / eta)


def competing_moment_constant(alpha: float, beta: float, d: float) -> float:
    """Second candidate for the limiting d-th moment of the scaled hub.

    Evaluates (beta-1)**2 * alpha**2 * Gamma((beta-1-d)/(beta-1)).  For most
    parameters this disagrees with frechet_moment(alpha, beta-1, d); reports
    print both side by side and let the Monte Carlo mean pick the curve it
    tracks rather than silently dropping one.
    """
    if not (alpha > 0 and beta > 1):
        raise ParameterError("competing moment constant needs alpha > 0, beta > 1")
    if not (0 < d < beta - 1.0):
        raise ParameterError(
            f"moment order must lie in (0, beta-1); d={d}, beta={beta}")
    eta = beta - 1.0
    return eta ** 2 * alpha ** 2 * math.gamma((eta - d) / eta)


# -- Monte Carlo ------------------------------------------------------------


@dataclass(frozen=True)
class HubReport:
    """Empirical scaled-hub CDF next to its reference curve."""

    n: int
    m_n: int
    b_n: float
    L: float
    empirical_cdf: tuple
    limit_cdf_params: dict = field(compare=False)
    ks_distance: float

    def __post_init__(self):
        if not 0.0 <= self.ks_distance <= 1.0:
            raise ParameterError("ks distance must lie in [0, 1]")
        c, e = self.limit_cdf_params["c_eta"], self.limit_cdf_params["eta"]
        if (c > 0) != (e > 0) or c < 0 or e < 0:
            raise ParameterError("limit params need c_eta, eta both positive or both zero")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m_n": self.m_n,
            "b_n": self.b_n,
            "L": None if math.isinf(self.L) else self.L,
            "empirical_cdf": [[x, f] for x, f in self.empirical_cdf],
            "limit_cdf_params": dict(self.limit_cdf_params),
            "ks_distance": self.ks_distance,
        }


def mc_hub_values(config: EnsembleConfig, chunk: int = 2048) -> np.ndarray:
    """Hub statistic for each configured replica, as an int64 array.

    Samples row sums directly as Binomial(n, theta), which matches the law
    of popcounted bit rows exactly.  Deterministic in (master_seed, chunk).
    """
    n, m, replicas = config.n, config.m, config.replicas
    chunk = max(1, min(chunk, 4_000_000 // m))
    values = np.empty(replicas, dtype=np.int64)
    for lo in range(0, replicas, chunk):
        c = min(chunk, replicas - lo)
        rng = spawn_rng(config.master_seed, lo, _TAG_HUB)
        thetas = sample_bias_matrix(config, c, rng)
        sums = rng.binomial(n, thetas)
        values[lo:lo + c] = sums.max(axis=1)
    return values


def _reference_scaling(config: EnsembleConfig):
    """Pick the reference curve and scale for a config; None means hub == 0."""
    if config.variant != "partially_exchangeable":
        raise ParameterError(
            "hub limit theory needs independent per-sender biases")
    mixing, n, m = config.mixing, config.n, config.m
    if isinstance(mixing, DiracMixing):
        if mixing.lam == 0:
            return None
        raise ParameterError("a point-mass bias has no power tail, so no hub limit")
    if isinstance(mixing, PowerLawMixing):
        canonical = hub_limit_cdf(mixing.alpha, mixing.beta, n)
        if m == canonical.rows:
            return canonical
        eta = mixing.beta - 1.0
        return _subcritical_scaling(mixing.alpha ** eta, eta, n, m)
    if isinstance(mixing, SeedCdfMixing):
        tail = mixing.seed.power_tail()
        if tail is None:
            raise ParameterError(
                f"{mixing.seed.kind} seed has no power tail, so no hub limit")
        c_eta, eta = tail
        return _subcritical_scaling(c_eta, eta, n, m)
    raise ParameterError(
        f"no hub reference law for the {mixing.variant} mixing family")


def _subcritical_scaling(c_eta: float, eta: float, n: int, m: int) -> HubScaling:
    scale = m ** (1.0 / eta)
    if scale > n / 2:
        raise ParameterError(
            "tracked-sender count too large for this tail exponent: the hub "
            "scale reaches the graph size; use the matched pairing instead")
    return HubScaling(rows=m, scale=scale, limit=HubLimit(c_eta, eta))


def mc_hub(config: EnsembleConfig, grid_points: int = 1000,
           chunk: int = 2048) -> HubReport:
    """Sample the configured replicas and compare the scaled hub to its limit.

    The empirical CDF is evaluated on a grid mapped through floor(x * b_n),
    the same integer truncation the scaled statistic itself undergoes, so
    grid points between attainable values do not bias the comparison.  The
    KS distance covers the continuous part of the reference curve only
    (everything below the cutoff when one is present).
    """
    if config.replicas < 100:
        raise ParameterError("hub Monte Carlo needs at least 100 replicas")
    scaling = _reference_scaling(config)
    values = mc_hub_values(config, chunk=chunk)
    if scaling is None:
        grid = tuple((float(j) / grid_points, 1.0)
                     for j in range(1, grid_points + 1))
        return HubReport(n=config.n, m_n=config.m, b_n=1.0, L=0.0,
                         empirical_cdf=grid,
                         limit_cdf_params={"c_eta": 0.0, "eta": 0.0},
                         ks_distance=0.0)
    limit, b = scaling.limit, scaling.scale
    if math.isinf(limit.cutoff):
        x_hi = (values.max() + 1.0) / b
    else:
        x_hi = limit.cutoff
    xs = x_hi * np.arange(1, grid_points + 1) / grid_points
    ordered = np.sort(values)
    thresholds = np.floor(xs * b)
    f_emp = np.searchsorted(ordered, thresholds, side="right") / len(values)
    f_lim = limit.cdf(xs)
    mask = xs < limit.cutoff
    ks = float(np.max(np.abs(f_emp[mask] - f_lim[mask]))) if mask.any() else 0.0
    return HubReport(
        n=config.n, m_n=scaling.rows, b_n=float(b),
        L=limit.cutoff if not math.isinf(limit.cutoff) else math.inf,
        empirical_cdf=tuple(zip(xs.tolist(), f_emp.tolist())),
        limit_cdf_params={"c_eta": limit.c_eta, "eta": limit.eta},
        ks_distance=min(ks, 1.0),
    )


def hub_atom_estimate(values: np.ndarray, n: int,
                      threshold: float = 0.99) -> tuple[float, float]:
    """Fraction of replicas whose hub exceeds threshold * n, with its SE."""
    if not 0 < threshold < 1:
        raise ParameterError("threshold must lie in (0, 1)")
    values = np.asarray(values)
    p = float(np.mean(values > threshold * n))
    se = math.sqrt(p * (1.0 - p) / len(values))
    return p, se


def write_hub_cdf(report: HubReport, path) -> None:
    """CSV of the report grid: x, empirical CDF, reference CDF."""
    params = report.limit_cdf_params
    if params["c_eta"] > 0:
        limit = HubLimit(params["c_eta"], params["eta"],
                         cutoff=report.L if report.L > 0 else math.inf)
        ref = lambda x: float(limit.cdf(x))
    else:
        ref = lambda x: 1.0
    with open(path, "w", encoding="ascii") as handle:
        handle.write("x,F_emp,F_limit\n")
        for x, f in report.empirical_cdf:
            handle.write(f"{x:.10g},{f:.10g},{ref(x):.10g}\n")
