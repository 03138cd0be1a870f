"""Problem definition and reduction to dimensionless parameters.

The mixed potential is

    V(r) = v1/r**2 + v2*exp(-alpha*r)/r + v3*coth(alpha*r) + v4

and the radial problem is fixed by the mass, the spatial dimension and the
orbital quantum number (hbar = 1).  ``reduce`` maps both onto the bundle
(gamma, A, B) that controls the exponential-variable form of the radial
equation; everything per-level is a function of the decay exponent ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FallToCenter, InvalidParams, NotBound

__all__ = [
    "PotentialSpec",
    "RadialProblem",
    "ReducedParams",
    "QuantumNumbers",
    "centrifugal_constant",
    "reduce",
    "decay_exponent",
    "energy_from_decay",
]


def _finite(name, value):
    if not math.isfinite(value):
        raise InvalidParams(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class PotentialSpec:
    v1: float = 0.0
    v2: float = 0.0
    v3: float = 0.0
    v4: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("v1", "v2", "v3", "v4", "alpha"):
            _finite(name, getattr(self, name))
        if self.alpha <= 0:
            raise InvalidParams(f"alpha must be > 0, got {self.alpha!r}")

    @property
    def asymptote(self) -> float:
        """Limit of V(r) as r -> infinity (coth -> 1)."""
        return self.v3 + self.v4


@dataclass(frozen=True)
class RadialProblem:
    mass: float = 1.0
    dim: int = 3
    ell: int = 0

    def __post_init__(self):
        _finite("mass", self.mass)
        if self.mass <= 0:
            raise InvalidParams(f"mass must be > 0, got {self.mass!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidParams(f"dim must be an integer >= 1, got {self.dim!r}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise InvalidParams(f"ell must be an integer >= 0, got {self.ell!r}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "ell", int(self.ell))

    @property
    def effective_dim(self) -> int:
        """D + 2*ell, the only combination the radial equation sees."""
        return self.dim + 2 * self.ell


@dataclass(frozen=True)
class QuantumNumbers:
    n: int = 0
    ell: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise InvalidParams(f"n must be an integer >= 0, got {self.n!r}")
        if int(self.ell) != self.ell or self.ell < 0:
            raise InvalidParams(f"ell must be an integer >= 0, got {self.ell!r}")


@dataclass(frozen=True)
class ReducedParams:
    """Dimensionless parameters of the exponential-variable radial equation.

    ``gamma`` solves gamma*(gamma - 1) = 2*M*v1 + N (positive root),
    ``a_coef`` = M*v2/alpha and ``b_coef`` = M*v3/(2*alpha**2).
    """

    n_d_ell: float
    gamma: float
    a_coef: float
    b_coef: float

    def beta(self, c):
        return 2.0 * c + 2.0 * self.gamma + 1.0

    def delta(self, c):
        return 2.0 * c + 1.0

    def eta(self, c):
        return self.gamma**2 + 2.0 * c * self.gamma + self.a_coef + 2.0 * self.b_coef

    @property
    def binding(self) -> float:
        """-(A + 2B); levels exist only while (gamma + n)**2 stays below it."""
        return -(self.a_coef + 2.0 * self.b_coef)


def centrifugal_constant(problem: RadialProblem) -> float:
    j = problem.effective_dim
    # the integer product is divisible by 4 or leaves a dyadic remainder: exact in binary
    return ((j - 1) * (j - 3)) / 4


def _gamma(mass, v1, j):
    disc = 8.0 * mass * v1 + (j - 2) ** 2
    if disc < 0:
        raise FallToCenter(
            f"8*M*V1 + (D+2l-2)^2 = {disc:.6g} < 0: inverse-square term too attractive"
        )
    return 0.5 * (1.0 + math.sqrt(disc))


def reduce(pot: PotentialSpec, problem: RadialProblem) -> ReducedParams:
    m = problem.mass
    return ReducedParams(
        n_d_ell=centrifugal_constant(problem),
        gamma=_gamma(m, pot.v1, problem.effective_dim),
        a_coef=m * pot.v2 / pot.alpha,
        b_coef=m * pot.v3 / (2.0 * pot.alpha**2),
    )


def decay_exponent(reduced: ReducedParams, n: int) -> float:
    """Decay exponent c_n of level n; raises NotBound unless c_n > 0."""
    g = reduced.gamma + n
    c = -(g * g + reduced.a_coef + 2.0 * reduced.b_coef) / (2.0 * g)
    if not c > 0:
        raise NotBound(f"level n={n} has decay exponent c={c:.6g} <= 0")
    return c


def energy_from_decay(c: float, reduced: ReducedParams, pot: PotentialSpec, problem: RadialProblem) -> float:
    """E = V4 - 2*alpha**2*(c**2 - B)/M."""
    return pot.v4 - 2.0 * pot.alpha**2 * (c * c - reduced.b_coef) / problem.mass
