"""Bound states of the D-dimensional radial Schroedinger equation with

    V(r) = V1/r^2 + V2 exp(-alpha r)/r + V3 coth(alpha r) + V4

under the Pekeris treatment of the 1/r and 1/r^2 terms.

Closed-form spectrum and eigenfunctions live in ``spectrum`` and
``wavefunction``; ``aim`` recovers the spectrum numerically by the asymptotic
iteration method and ``oracle`` by finite differences on the radial equation.
"""

from .errors import (
    BoundStateError,
    FallToCenter,
    GridTooCoarse,
    InvalidParams,
    NoBoundStates,
    NoConvergence,
    NotBound,
    ScaleError,
)
from .model import PotentialSpec, QuantumNumbers, RadialProblem, ReducedParams, decay_exponent, reduce
from .spectrum import BoundState, admissible, bound_state, energy, enumerate_bound_states

__version__ = "0.1.0"

__all__ = [
    "BoundStateError",
    "FallToCenter",
    "GridTooCoarse",
    "InvalidParams",
    "NoBoundStates",
    "NoConvergence",
    "NotBound",
    "ScaleError",
    "PotentialSpec",
    "QuantumNumbers",
    "RadialProblem",
    "ReducedParams",
    "decay_exponent",
    "reduce",
    "BoundState",
    "admissible",
    "bound_state",
    "energy",
    "enumerate_bound_states",
]
