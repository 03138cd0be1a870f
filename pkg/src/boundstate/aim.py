"""Numeric asymptotic iteration method (AIM) for the reduced radial equation.

With R(s) = s**c (1-s)**gamma f(s) the polynomial factor obeys

    f'' = lambda_0 f' + s_0 f,   lambda_0 = (beta s - delta)/(s(1-s)),
                                 s_0      = eta/(s(1-s)),

and the ladder lambda_k = lambda'_{k-1} + s_{k-1} + lambda_0 lambda_{k-1},
s_k = s'_{k-1} + s_0 lambda_{k-1} terminates where
Delta_k = lambda_k s_{k-1} - lambda_{k-1} s_k vanishes.  Nothing here uses
the closed-form spectrum: eigenvalues come from root-finding Delta_k in the
decay exponent c.

Two realisations live side by side.  The ``RationalFn`` route (``seed``,
``iterate``, ``delta_k``) works over any number type: exact integers and
fractions for structural checks, mpmath floats for root refinement.  The
compiled float ladder in ``_kernels`` scans c quickly but loses digits to
cancellation (s_k/lambda_k converges, so Delta_k is a difference of nearly
equal products), badly so when c is large.  ``solve_spectrum`` therefore
brackets roots with the float scan, trusting only entries well above the
rounding floor, and polishes each bracket in extended precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath
import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import InvalidParams, NoConvergence
from .model import ReducedParams
from .rational import RationalFn, poly_eval

__all__ = [
    "AimConfig",
    "seed",
    "seed_from",
    "iterate",
    "ladder",
    "delta_k",
    "delta_deviation",
    "default_bracket",
    "solve_spectrum",
    "s_independence_check",
    "polynomial_theorem_check",
]


@dataclass(frozen=True)
class AimConfig:
    s0: float = 0.5
    k_max: int = 30
    c_bracket: Optional[tuple] = None
    root_tol: float = 1e-12
    stability_tol: float = 1e-8
    scan_samples: int = 512
    #: float-scan entries whose cancellation ratio is below this carry no sign
    noise_floor: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.s0 < 1.0:
            raise InvalidParams("s0 must lie in (0, 1)")
        if self.k_max < 2:
            raise InvalidParams("k_max must be >= 2")
        if self.root_tol <= 0:
            raise InvalidParams("root_tol must be > 0")
        if self.scan_samples < 2:
            raise InvalidParams("scan_samples must be >= 2")


def seed_from(beta, delta, eta):
    """lambda_0, s_0 for explicit (beta, delta, eta); exact for int/Fraction input."""
    return RationalFn((-delta, beta), 1, 1), RationalFn((eta,), 1, 1)


def seed(reduced: ReducedParams, c: float):
    return seed_from(reduced.beta(c), reduced.delta(c), reduced.eta(c))


def iterate(lam_prev: RationalFn, s_prev: RationalFn, lam0: RationalFn, s0: RationalFn):
    lam = lam_prev.derivative() + s_prev + lam0 * lam_prev
    s = s_prev.derivative() + s0 * lam_prev
    return lam.check_scale(), s.check_scale()


def ladder(lam0: RationalFn, s0: RationalFn, k: int):
    """[(lambda_0, s_0), ..., (lambda_k, s_k)]."""
    out = [(lam0, s0)]
    for _ in range(k):
        out.append(iterate(*out[-1], lam0, s0))
    return out


def delta_k(lam_k: RationalFn, s_k: RationalFn, lam_prev: RationalFn, s_prev: RationalFn) -> RationalFn:
    return lam_k * s_prev - lam_prev * s_k


def _norm_scale(lam_k, lam_prev):
    scale = float(lam_k.max_coefficient()) * float(lam_prev.max_coefficient())
    return scale if scale > 0 else 1.0


def delta_deviation(lam_k, s_k, lam_prev, s_prev, points=None) -> float:
    """Size of Delta_k's numerator relative to |L_k| |L_{k-1}| (max-coefficient norms).

    With ``points`` the numerator is evaluated there; without, its largest
    coefficient is used.  Invariant under a common rescaling of the iterates.
    """
    num = delta_k(lam_k, s_k, lam_prev, s_prev).numer
    scale = _norm_scale(lam_k, lam_prev)
    if points is None:
        return max((abs(float(x)) for x in num), default=0.0) / scale
    return max((abs(float(poly_eval(num, float(s)))) for s in points), default=0.0) / scale


def default_bracket(reduced: ReducedParams, root_tol: float = 1e-12):
    # c_n = K/(2(gamma+n)) - (gamma+n)/2 <= K/(2 gamma), with K = -(A + 2B)
    k = max(reduced.binding, 1.0)
    return (root_tol, k / (2.0 * reduced.gamma) + 1.0)


def _delta_mp(reduced, c, k, s0):
    """Normalised Delta_k(s0) at decay exponent c, through the RationalFn ladder in mpmath."""
    # cancellation costs roughly log10(c) digits per step on top of the basis loss
    digits = 30 + k * (2 + math.ceil(math.log10(max(abs(c), 10.0))))
    with mpmath.workdps(digits):
        cm = mpmath.mpf(c)
        g = mpmath.mpf(reduced.gamma)
        eta = g * g + 2 * cm * g + mpmath.mpf(reduced.a_coef) + 2 * mpmath.mpf(reduced.b_coef)
        steps = ladder(*seed_from(2 * cm + 2 * g + 1, 2 * cm + 1, eta), k)
        num = delta_k(*steps[k], *steps[k - 1]).numer
        scale = steps[k][0].max_coefficient() * steps[k - 1][0].max_coefficient()
        return float(poly_eval(num, mpmath.mpf(s0)) / scale) if scale else 0.0


def _scan_grid(reduced, cfg, lo, hi):
    """Trial decay exponents dense enough to put samples between neighbouring roots.

    Adjacent roots sit about 1 apart near c = 0 and about 2 c^2 / K apart for
    c above sqrt(K), K = max(-(A + 2B), 1).  Steps of 1/4 in c up to sqrt(K),
    then of 1/(4K) in 1/c, keep four samples per gap with ~8 sqrt(K) points
    in all.
    """
    knee = min(max(math.sqrt(max(reduced.binding, 1.0)), lo), hi)
    near = math.ceil(4.0 * (knee - lo)) + 1
    far = math.ceil(4.0 * (1.0 / knee - 1.0 / hi) * knee * knee) + 1 if hi > knee else 0
    boost = max(1.0, cfg.scan_samples / (near + far))
    grid = np.linspace(lo, knee, math.ceil(boost * near))
    if far:
        tail = 1.0 / np.linspace(1.0 / knee, 1.0 / hi, math.ceil(boost * far))
        grid = np.concatenate([grid, tail[1:]])
    return grid


def _scan_roots(reduced, cfg, grid, values, ok, k):
    """Refined roots of Delta_k between consecutive trustworthy scan points.

    A sign change may bridge at most one untrustworthy sample; that covers
    the dip of the cancellation ratio right at a root.
    """
    idx = np.flatnonzero(ok)
    roots = []
    for i, j in zip(idx[:-1], idx[1:]):
        if j - i > 2:
            continue
        f0, f1 = values[i], values[j]
        if f0 == 0.0:
            roots.append(float(grid[i]))
        elif f0 * f1 < 0.0:
            root = brentq(
                lambda c: _delta_mp(reduced, c, k, cfg.s0),
                float(grid[i]), float(grid[j]), xtol=cfg.root_tol, rtol=4 * np.finfo(float).eps,
            )
            roots.append(float(root))
    return roots


def _frontier_root(reduced, cfg, grid, below, k, budget=64):
    """First sign change of Delta_k walking down the grid from ``below``, in extended precision.

    The next level's root sits just under the smallest one found so far.
    When c is large the float scan cannot see it at all, since Delta_k then
    cancels to about c**-k relative; this walk needs a handful of
    evaluations because the grid puts ~8 samples between neighbouring roots.
    """
    start = int(np.searchsorted(grid, below * (1.0 - cfg.stability_tol), side="left")) - 1
    prev_c = prev_v = None
    for i in range(start, max(start - budget, -1), -1):
        c = float(grid[i])
        v = _delta_mp(reduced, c, k, cfg.s0)
        if v == 0.0:
            return c
        if prev_v is not None and v * prev_v < 0.0:
            return float(brentq(lambda x: _delta_mp(reduced, x, k, cfg.s0), c, prev_c,
                                xtol=cfg.root_tol, rtol=4 * np.finfo(float).eps))
        prev_c, prev_v = c, v
    return None


def _persists(reduced, cfg, root, k):
    """True if Delta_k changes sign within root * (1 -+ stability_tol/2)."""
    h = 0.5 * cfg.stability_tol * abs(root)
    lo = _delta_mp(reduced, root - h, k, cfg.s0)
    hi = _delta_mp(reduced, root + h, k, cfg.s0)
    return lo * hi <= 0.0


def _matched(root, others, tol):
    return any(abs(root - o) <= tol * max(abs(root), abs(o)) for o in others)


def solve_spectrum(reduced: ReducedParams, cfg: AimConfig = AimConfig(), n_levels: int = 1) -> list[float]:
    """Decay exponents of the lowest ``n_levels`` states, largest c first.

    Each Delta_k vanishes exactly at c_0..c_k, and the float scan always
    resolves the newest root c_k but can lose older ones as k grows.  So a
    root found by the scan at level k is followed into levels k+1 and k+2 by
    extended-precision sign tests within ``stability_tol`` instead of being
    rediscovered there.  A root counts once it has held for three
    consecutive iterations; the value reported is the one from its first
    level.  Where the float scan sees nothing below the smallest root so
    far, an extended-precision walk down the grid looks for the next one.  Raises NoConvergence, carrying the partial list, if ``k_max``
    runs out first.
    """
    lo, hi = cfg.c_bracket or default_bracket(reduced, cfg.root_tol)
    if n_levels <= 0:
        return []
    grid = _scan_grid(reduced, cfg, lo, hi)
    table, rel = _kernels.aim_delta_table(grid, reduced.gamma, reduced.a_coef, reduced.b_coef, cfg.s0, cfg.k_max)
    trusted = rel > cfg.noise_floor
    tol = cfg.stability_tol
    pending: dict[float, int] = {}  # root -> consecutive levels it has held
    stable: list[float] = []
    for k in range(1, cfg.k_max + 1):
        pending = {r: hits + 1 for r, hits in pending.items() if _persists(reduced, cfg, r, k)}
        known = list(pending) + stable
        found = _scan_roots(reduced, cfg, grid, table[:, k - 1], trusted[:, k - 1], k)
        frontier = min(known, default=grid[-1] / (1.0 - tol))
        if not any(r < frontier * (1.0 - tol) for r in found):
            r = _frontier_root(reduced, cfg, grid, frontier, k)
            if r is not None:
                found.append(r)
        for r in found:
            if not _matched(r, list(pending) + stable, tol):
                pending[r] = 1
        for r in [r for r, hits in pending.items() if hits >= 3]:
            stable.append(r)
            del pending[r]
        stable.sort(reverse=True)
        if len(stable) >= n_levels and not any(r > stable[n_levels - 1] for r in pending):
            return stable[:n_levels]
    raise NoConvergence(f"only {len(stable)} of {n_levels} stable roots after k_max={cfg.k_max}", stable)


def s_independence_check(reduced: ReducedParams, c_root: float, k: int, sample_points: Sequence[float]) -> float:
    """Largest normalised |Delta_k| over ``sample_points`` at decay exponent ``c_root``."""
    steps = ladder(*seed(reduced, c_root), k)
    return delta_deviation(*steps[k], *steps[k - 1], points=sample_points)


def polynomial_theorem_check(lam_n, s_n, lam_prev, s_prev, tol: float = 1e-8) -> bool:
    """True when lambda_n s_{n-1} - lambda_{n-1} s_n vanishes coefficient-wise."""
    return delta_deviation(lam_n, s_n, lam_prev, s_prev) < tol
