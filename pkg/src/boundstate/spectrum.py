"""Closed-form bound-state energies and enumeration of the discrete spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoConvergence, NotBound
from .model import (
    PotentialSpec,
    QuantumNumbers,
    RadialProblem,
    decay_exponent,
    reduce,
)

__all__ = ["BoundState", "energy", "admissible", "enumerate_bound_states", "bound_state", "MAX_LEVELS"]

#: Hard cap on levels per ell; tiny alpha makes -(A+2B) astronomically large.
MAX_LEVELS = 10**6


@dataclass(frozen=True)
class BoundState:
    n: int
    ell: int
    energy: float
    c: float
    gamma: float

    @property
    def above_zero(self) -> bool:
        """Threshold flag: positive total energy (possible when V4 > 0)."""
        return self.energy > 0.0


def _admissible(reduced, n):
    g = reduced.gamma + n
    return g * g + reduced.a_coef + 2.0 * reduced.b_coef < 0.0


def admissible(pot: PotentialSpec, problem: RadialProblem, n: int) -> bool:
    return _admissible(reduce(pot, problem), n)


def _energy(pot, problem, gamma, n):
    # V4 - [a^2 g^2 + 2 M V2 a + M^2 (V2 + V3/a)^2 / g^2] / 2M, rearranged to
    # V3 + V4 - 2 a^2 c^2 / M: near threshold the bracket cancels against V4,
    # which squares the rounding error; this form only loses it linearly
    m, a = problem.mass, pot.alpha
    g = gamma + n
    c = -(g * g + m * pot.v2 / a + 2.0 * (m * pot.v3 / (2.0 * a**2))) / (2.0 * g)
    return pot.asymptote - 2.0 * a * a * c * c / m


def energy(pot: PotentialSpec, problem: RadialProblem, q: QuantumNumbers) -> float:
    """E_{n,ell} from the closed-form spectrum.

    ``q.ell`` must agree with ``problem.ell``; the radial problem already
    carries the orbital number.
    """
    if q.ell != problem.ell:
        raise ValueError(f"quantum number ell={q.ell} disagrees with problem ell={problem.ell}")
    reduced = reduce(pot, problem)
    if not _admissible(reduced, q.n):
        raise NotBound(f"level n={q.n}, ell={q.ell} is not bound")
    return _energy(pot, problem, reduced.gamma, q.n)


def bound_state(pot: PotentialSpec, problem: RadialProblem, n: int) -> BoundState:
    reduced = reduce(pot, problem)
    c = decay_exponent(reduced, n)
    return BoundState(n=n, ell=problem.ell, energy=_energy(pot, problem, reduced.gamma, n), c=c, gamma=reduced.gamma)


def _level_count(reduced):
    k = reduced.binding
    if k <= 0:
        return 0
    count = max(0, math.ceil(math.sqrt(k) - reduced.gamma))
    # repair floating edge cases of the sqrt estimate against the strict inequality
    while count > 0 and not _admissible(reduced, count - 1):
        count -= 1
    while _admissible(reduced, count):
        count += 1
        if count > MAX_LEVELS:
            break
    return count


def enumerate_bound_states(pot: PotentialSpec, problem: RadialProblem, ell_max: int) -> list[BoundState]:
    """All admissible (ell, n) levels with ell <= ell_max, sorted by (ell, n)."""
    if ell_max < 0:
        raise ValueError("ell_max must be >= 0")
    states = []
    for ell in range(ell_max + 1):
        prob = RadialProblem(mass=problem.mass, dim=problem.dim, ell=ell)
        reduced = reduce(pot, prob)
        count = _level_count(reduced)
        if count > MAX_LEVELS:
            raise NoConvergence(f"more than {MAX_LEVELS} levels at ell={ell}; refusing to enumerate", states)
        for n in range(count):
            states.append(
                BoundState(
                    n=n,
                    ell=ell,
                    energy=_energy(pot, prob, reduced.gamma, n),
                    c=decay_exponent(reduced, n),
                    gamma=reduced.gamma,
                )
            )
    return states
