"""Finite-difference eigensolver for the radial equation, independent of AIM.

The radial equation  -R''/(2M) + V_eff R = E R  is solved on a logarithmic
grid x = ln r with R = exp(x/2) P, which turns it into

    -P'' + [1/4 + 2M r^2 V_eff(r)] P = 2M E r^2 P.

Three-point differences give a symmetric tridiagonal pencil T - E W with W
diagonal and positive.  Eigenvalues come from Sturm-sequence bisection on the
pencil directly (the equivalent symmetric matrix W^-1/2 T W^-1/2 spans ~19
decades on a log grid, too much for dense tridiagonal solvers).  The inner end
uses the regular Frobenius branch P ~ r^kappa (1 + a1 r) as a ghost value; the
outer end is Dirichlet.  Richardson extrapolation over successive grid
doublings supplies the value and its error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from . import _kernels
from .errors import GridTooCoarse, InvalidParams, NoBoundStates, NotBound
from .model import PotentialSpec, RadialProblem, centrifugal_constant, reduce
from .spectrum import _energy, _level_count

__all__ = [
    "FORMS",
    "GridSpec",
    "OracleResult",
    "effective_potential",
    "default_grid",
    "solve",
    "eigenvector",
    "node_counts",
    "pekeris_error_report",
]

FORMS = ("pekeris", "exact")

#: Richardson estimates above this fraction of |E| reject the grid.
MAX_RELATIVE_ERROR = 1e-4


def _check_form(form):
    if form not in FORMS:
        raise InvalidParams(f"form must be one of {FORMS}, got {form!r}")


@dataclass(frozen=True)
class GridSpec:
    r_min: float
    r_max: float
    points: int = 2000
    refinement_levels: int = 3

    def __post_init__(self):
        if not (0.0 < self.r_min < self.r_max and math.isfinite(self.r_max)):
            raise InvalidParams("need 0 < r_min < r_max < inf")
        if self.points < 200:
            raise InvalidParams(f"points must be >= 200, got {self.points}")
        if self.refinement_levels < 2:
            raise InvalidParams("refinement_levels must be >= 2 for a Richardson estimate")


@dataclass(frozen=True)
class OracleResult:
    eigenvalues: tuple
    grid_error_estimate: tuple
    form: str
    convergence_ratio: tuple = ()

    def __post_init__(self):
        ev = self.eigenvalues
        if any(b <= a for a, b in zip(ev, ev[1:])):
            raise ValueError("eigenvalues must be strictly ascending")
        if any(not e > 0 for e in self.grid_error_estimate):
            raise ValueError("error estimates must be positive")


def _scaled_potential(pot, problem, form, r):
    """2M r^2 V_eff(r), written so no term overflows as r -> 0."""
    m, a = problem.mass, pot.alpha
    inv_sq = 2.0 * m * pot.v1 + centrifugal_constant(problem)
    x = a * r
    coth_term = r * r * pot.v3 / np.tanh(x) + pot.v4 * r * r
    if form == "exact":
        return inv_sq + 2.0 * m * (pot.v2 * r * np.exp(-x) + coth_term)
    ratio = x / np.sinh(x)  # alpha r / sinh(alpha r): Pekeris 1/r^2 -> (alpha/sinh)^2
    return inv_sq * ratio * ratio + 2.0 * m * (pot.v2 * r * ratio * np.exp(-x) + coth_term)


def effective_potential(pot: PotentialSpec, problem: RadialProblem, form: str, r):
    """V(r) + N/(2M r^2) in the exact or the Pekeris form."""
    _check_form(form)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InvalidParams("r must be > 0")
    out = _scaled_potential(pot, problem, form, r) / (2.0 * problem.mass * r * r)
    return float(out) if out.ndim == 0 else out


def _closed_form_hint(pot, problem, n_states):
    """Highest closed-form energy among the first n_states levels, or None."""
    reduced = reduce(pot, problem)
    count = min(_level_count(reduced), n_states)
    if count == 0:
        return None
    return _energy(pot, problem, reduced.gamma, count - 1)


def default_grid(pot: PotentialSpec, problem: RadialProblem, n_states: int = 1, points: int = 2000, levels: int = 3) -> GridSpec:
    """Grid sized from the closed-form decay of the highest requested level.

    r_max = 40/kappa with kappa = sqrt(2M (V3 + V4 - E)); r_min = 1e-8 r_max.
    Falls back to 40/alpha when no level binds.
    """
    hint = _closed_form_hint(pot, problem, n_states)
    gap = None if hint is None else pot.asymptote - hint
    if gap is not None and gap > 0:
        r_max = 40.0 / math.sqrt(2.0 * problem.mass * gap)
    else:
        r_max = 40.0 / pot.alpha
    return GridSpec(r_min=1e-8 * r_max, r_max=r_max, points=points, refinement_levels=levels)


def _pencil(pot, problem, form, r_min, r_max, points):
    reduce(pot, problem)  # raises FallToCenter before kappa goes complex
    m = problem.mass
    kappa = math.sqrt(max(0.25 + centrifugal_constant(problem) + 2.0 * m * pot.v1, 0.0))
    x = np.linspace(math.log(r_min), math.log(r_max), points + 2)
    h = x[1] - x[0]
    r = np.exp(x[:-1])  # last node is the Dirichlet end
    u = 0.25 + _scaled_potential(pot, problem, form, r)
    # ghost value from P ~ r^kappa (1 + a1 r); a1 matches the linear part of u
    a1 = (u[0] - kappa * kappa) / r[0] / (2.0 * kappa + 1.0)
    ghost = math.exp(-kappa * h) * (1.0 + a1 * r[0] * math.exp(-h)) / (1.0 + a1 * r[0])
    diag = 2.0 / h**2 + u
    diag[0] = (2.0 - ghost) / h**2 + u[0]
    weight = 2.0 * m * r * r
    off2 = np.full(diag.size - 1, 1.0 / h**4)
    return r, h, diag, weight, off2


def _level_eigenvalues(pot, problem, form, grid, points, n_states):
    r, h, diag, weight, off2 = _pencil(pot, problem, form, grid.r_min, grid.r_max, points)
    hi = pot.asymptote
    count = min(_kernels.sturm_count(diag, weight, off2, hi), n_states)
    if count == 0:
        return np.empty(0)
    lo = float(np.min((diag - 2.0 / h**2) / weight)) - 1.0
    return _kernels.pencil_eigenvalues(diag, weight, off2, np.arange(count), lo, hi)


def solve(
    pot: PotentialSpec,
    problem: RadialProblem,
    form: str,
    grid: Optional[GridSpec] = None,
    n_states: int = 1,
    rel_target: float = 1e-6,
    max_extra_levels: int = 4,
) -> OracleResult:
    """Lowest ``n_states`` eigenvalues below V3 + V4, Richardson-extrapolated.

    The grid is doubled ``grid.refinement_levels - 1`` times, then up to
    ``max_extra_levels`` more times while any Richardson estimate exceeds
    ``rel_target * |E|``.  Each state is reported from the first grid pair
    that met the target.
    """
    _check_form(form)
    if n_states < 1:
        raise InvalidParams("n_states must be >= 1")
    grid = grid or default_grid(pot, problem, n_states)
    levels = []
    for j in range(grid.refinement_levels + max_extra_levels):
        levels.append(_level_eigenvalues(pot, problem, form, grid, grid.points * 2**j, n_states))
        found = min(len(e) for e in levels)
        if found == 0:
            raise NoBoundStates(f"no eigenvalue below the threshold V3 + V4 = {pot.asymptote:.6g}")
        if len(levels) < grid.refinement_levels:
            continue
        fine, prev = levels[-1][:found], levels[-2][:found]
        if np.all(np.abs(fine - prev) / 3.0 <= rel_target * np.abs(fine)):
            break
    # each state is extrapolated from the first grid pair that met the target:
    # further doublings only add round-off from the 1/h^2 scaled pencil
    table = np.array([e[:found] for e in levels])
    pick = np.full(found, len(levels) - 1)
    for i in range(found):
        for j in range(grid.refinement_levels - 1, len(levels)):
            if abs(table[j, i] - table[j - 1, i]) / 3.0 <= rel_target * abs(table[j, i]):
                pick[i] = j
                break
    cols = np.arange(found)
    fine, prev = table[pick, cols], table[pick - 1, cols]
    diff = fine - prev
    values = fine + diff / 3.0
    errors = np.maximum(np.abs(diff) / 3.0, 4.0 * np.finfo(float).eps * np.abs(values))
    errors = np.where(errors > 0, errors, np.finfo(float).tiny)
    bad = errors > MAX_RELATIVE_ERROR * np.abs(values)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise GridTooCoarse(f"state {i}: Richardson error {errors[i]:.3g} exceeds {MAX_RELATIVE_ERROR:g}*|E|")
    ratios = ()
    if np.all(pick >= 2):
        first = table[pick - 2, cols]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = tuple(float(v) for v in (first - prev) / (prev - fine))
    return OracleResult(tuple(float(v) for v in values), tuple(float(e) for e in errors), form, ratios)


def eigenvector(pot: PotentialSpec, problem: RadialProblem, form: str, grid: GridSpec, index: int, points: Optional[int] = None):
    """(r, R) for eigenstate ``index`` on one grid, by inverse iteration.

    R is scaled to unit maximum magnitude; its overall sign is arbitrary.
    """
    _check_form(form)
    points = points or grid.points
    r, h, diag, weight, off2 = _pencil(pot, problem, form, grid.r_min, grid.r_max, points)
    hi = pot.asymptote
    if _kernels.sturm_count(diag, weight, off2, hi) <= index:
        raise NotBound(f"grid holds no eigenvalue number {index} below the threshold")
    lo = float(np.min((diag - 2.0 / h**2) / weight)) - 1.0
    energy = float(_kernels.pencil_eigenvalues(diag, weight, off2, np.array([index]), lo, hi)[0])
    off = -1.0 / h**2
    band = np.zeros((3, diag.size))
    band[0, 1:] = off
    band[1] = diag - energy * weight
    band[2, :-1] = off
    vec = np.ones(diag.size)
    for _ in range(3):
        vec = solve_banded((1, 1), band, weight * vec)
        vec /= np.max(np.abs(vec))
    radial = np.sqrt(r) * vec
    return r, radial / np.max(np.abs(radial))


def node_counts(pot: PotentialSpec, problem: RadialProblem, form: str, grid: GridSpec, n_states: int) -> list[int]:
    """Sign changes of each oracle eigenvector, ignoring values below 1e-8 of the peak."""
    return [
        _kernels.sign_changes(eigenvector(pot, problem, form, grid, i)[1], 1e-8)
        for i in range(n_states)
    ]


def pekeris_error_report(pot: PotentialSpec, problem: RadialProblem, grid: Optional[GridSpec] = None, n_states: int = 1):
    """[(n, E_exact_oracle, E_closed_form, rel_diff)] paired by level index."""
    reduced = reduce(pot, problem)
    count = min(_level_count(reduced), n_states)
    if count == 0:
        raise NotBound("the closed form admits no level")
    result = solve(pot, problem, "exact", grid or default_grid(pot, problem, count), count)
    report = []
    for n, e_exact in enumerate(result.eigenvalues[:count]):
        e_closed = _energy(pot, problem, reduced.gamma, n)
        report.append((n, e_exact, e_closed, abs(e_exact - e_closed) / abs(e_exact)))
    return report
