"""Shared numeric helpers: checked quadrature, log-domain integrals, RNG streams.

All integrals in the package funnel through :func:`checked_quad` so that the
package-wide accuracy contract (relative tolerance ``REL_TOL``, absolute floor
``ABS_FLOOR``) is enforced in one place.  Integrands that vary over many
orders of magnitude go through :func:`log_quad`, which factors out the peak
of ``log f`` before handing the rescaled integrand to QUADPACK.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

from .errors import QuadratureError

__all__ = [
    "REL_TOL",
    "ABS_FLOOR",
    "checked_quad",
    "log_quad",
    "kahan_sum",
    "stream_seed",
    "spawn_rng",
]

REL_TOL = 1e-10
ABS_FLOOR = 1e-300

# QUADPACK is asked for one digit more than we promise.
_EPS_REQUEST = 1e-11
_LIMIT = 200


def checked_quad(func, a, b, points=None, rel_tol=REL_TOL):
    """Integrate ``func`` over [a, b], failing loudly if accuracy is not met.

    Parameters
    ----------
    func : callable
        Scalar integrand.
    a, b : float
        Integration limits; ``b`` may be ``np.inf``.
    points : sequence of float, optional
        Interior break points (peaks, kinks).  Only used on finite intervals,
        where QUADPACK accepts them.
    rel_tol : float
        Acceptance threshold on the reported error estimate, relative to the
        integral value with an absolute floor of ``ABS_FLOOR``.
    """
    if a == b:
        return 0.0
    kwargs = {"epsabs": ABS_FLOOR, "epsrel": _EPS_REQUEST, "limit": _LIMIT}
    if points is not None and np.isfinite(b) and np.isfinite(a):
        pts = [p for p in points if a < p < b]
        if pts:
            kwargs["points"] = sorted(pts)
    value, abserr = integrate.quad(func, a, b, full_output=0, **kwargs)
    if abserr > max(rel_tol * abs(value), ABS_FLOOR):
        # One retry with a finer subdivision limit before giving up.
        kwargs["limit"] = 1000
        value, abserr = integrate.quad(func, a, b, full_output=0, **kwargs)
        if abserr > max(rel_tol * abs(value), ABS_FLOOR):
            raise QuadratureError(
                f"quadrature on [{a}, {b}] reached |err|~{abserr:.3e} "
                f"for value {value:.6e}, above tolerance {rel_tol:.1e}",
                achieved=abserr,
            )
    return value


def log_quad(log_func, a, b, points=None, n_scan=257, rel_tol=REL_TOL):
    """Compute log of ``integral(exp(log_func))`` over [a, b].

    The peak of ``log_func`` is located on a scan grid (log-spaced when the
    interval spans orders of magnitude), subtracted off, and the remaining
    O(1) integrand is passed to :func:`checked_quad`.  Returns ``-inf`` for an
    identically negligible integrand.
    """
    if not b > a:
        return -np.inf
    if np.isfinite(b):
        if a > 0 and b / a > 50.0:
            grid = np.geomspace(a, b, n_scan)
        else:
            grid = np.linspace(a, b, n_scan)
    else:
        lo = a if a > 0 else 1e-12
        grid = np.concatenate([np.geomspace(lo, max(10.0 * lo, 1.0), n_scan // 2),
                               np.geomspace(max(10.0 * lo, 1.0), 1e6, n_scan // 2)])
        grid = np.unique(np.clip(grid, a, None))
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.array([log_func(g) for g in grid], dtype=float)
    vals[~np.isfinite(vals)] = -np.inf
    peak = float(np.max(vals))
    if peak == -np.inf:
        return -np.inf
    peak_x = float(grid[int(np.argmax(vals))])
    brk = [peak_x] if points is None else sorted(set(list(points) + [peak_x]))

    def scaled(x):
        v = log_func(x) - peak
        return np.exp(v) if v > -745.0 else 0.0

    value = checked_quad(scaled, a, b, points=brk, rel_tol=rel_tol)
    if value <= 0.0:
        return -np.inf
    return peak + np.log(value)


def kahan_sum(terms):
    """Compensated summation of an iterable of floats."""
    total = 0.0
    carry = 0.0
    for t in terms:
        y = t - carry
        s = total + y
        carry = (s - total) - y
        total = s
    return total


# SplitMix64 constants; the finalizer below is the standard 64-bit mix.
_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_seed(master_seed: int, replica_index: int, stream_tag: int = 0) -> int:
    """Derive a 64-bit stream seed from (master_seed, replica_index, tag).

    Each input is absorbed with a SplitMix64 round so that nearby master
    seeds or replica indices land in unrelated streams.  Pure function of its
    arguments: the same triple always yields the same stream regardless of
    scheduling.
    """
    state = _mix64(master_seed + _GOLDEN)
    state = _mix64(state + _GOLDEN * (replica_index + 1))
    state = _mix64(state + _GOLDEN * (stream_tag + 1))
    return state


def spawn_rng(master_seed: int, replica_index: int, stream_tag: int = 0) -> np.random.Generator:
    """Deterministic per-replica generator; see :func:`stream_seed`."""
    return np.random.Generator(np.random.PCG64(stream_seed(master_seed, replica_index, stream_tag)))
