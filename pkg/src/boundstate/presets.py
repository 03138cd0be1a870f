"""Named special cases of the mixed potential.

Each preset maps its own parameters onto a ``PotentialSpec`` and carries its
own energy formula, evaluated independently of ``spectrum`` so the two can be
cross-checked.

The exponential-type presets (quadratic exponential, Deng-Fan) are written
with a positive range parameter sigma:

    V(r) = phi0 (xi1 e^{2 sigma r} + xi2 e^{sigma r} + xi3) / (e^{sigma r} - 1)^2,

which the Pekeris-form mixed potential reproduces exactly with alpha = sigma/2,
V4 = 0 and

    V1 = (xi1 + xi2 + xi3) phi0 / sigma^2,
    V2 = -(xi1 + xi3) phi0 / sigma,
    V3 = xi1 phi0.

V(r) -> xi1 phi0 as r -> infinity, so that is the continuum threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import InvalidParams
from .model import PotentialSpec, QuantumNumbers, RadialProblem
from .spectrum import energy as closed_energy

__all__ = [
    "PRESETS",
    "DEFAULTS",
    "SENTINEL_ALPHA",
    "SENTINEL_CASES",
    "PresetCase",
    "to_mixed",
    "direct_energy",
    "consistency_check",
    "derived_decay",
    "preset_potential",
    "matching_form",
]

#: Stand-in for alpha -> 0 in the Coulomb, Mie and Kratzer-Fues limits.
SENTINEL_ALPHA = 1e-8

SENTINEL_CASES = frozenset({"coulomb", "mie", "kratzer_fues"})

DEFAULTS = MappingProxyType(
    {
        "yukawa": {"V2": -1.0, "alpha": 0.1},
        "coulomb": {"V2": -1.0, "alpha": SENTINEL_ALPHA},
        "mie": {"V1": 0.5, "V2": -2.0, "V4": 0.0, "alpha": SENTINEL_ALPHA},
        "kratzer_fues": {"V1": 0.5, "V2": -2.0, "alpha": SENTINEL_ALPHA},
        "manning_rosen": {"V1p": 0.01, "V3": -1.0, "alpha": 0.1},
        "eckart": {"V1p": 0.01, "V3": 1.0, "alpha": 0.1},
        "hulthen": {"V0": 1.0, "b": 0.2},
        "yukawa_hulthen": {"V0": 1.0, "b": 0.2, "V2": -0.5},
        "yukawa_inverse_square": {"V1": 0.5, "V2": -1.0, "alpha": 0.05},
        "quadratic_exponential": {"phi0": 1.0, "xi1": 1.0, "xi2": -3.0, "xi3": 2.5, "sigma": 0.5},
        "deng_fan": {"De": 20.0, "sigma": 1.0, "re": 1.0},
    }
)

PRESETS = tuple(DEFAULTS)

_POSITIVE = {"alpha", "b", "sigma", "De", "re"}


@dataclass(frozen=True)
class PresetCase:
    """A preset name plus its parameters; missing parameters take the defaults."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in DEFAULTS:
            raise InvalidParams(f"unknown preset {self.name!r}; choose from {', '.join(PRESETS)}")
        allowed = DEFAULTS[self.name]
        unknown = set(self.params) - set(allowed)
        if unknown:
            raise InvalidParams(f"preset {self.name} has no parameter(s) {', '.join(sorted(unknown))}")
        merged = {**allowed, **{k: float(v) for k, v in self.params.items()}}
        for key, value in merged.items():
            if not math.isfinite(value):
                raise InvalidParams(f"{key} must be finite")
            if key in _POSITIVE and value <= 0:
                raise InvalidParams(f"{key} must be > 0, got {value!r}")
        object.__setattr__(self, "params", MappingProxyType(merged))

    def __getitem__(self, key):
        return self.params[key]


def _qe_mixed(phi0, xi1, xi2, xi3, sigma):
    return PotentialSpec(
        v1=(xi1 + xi2 + xi3) * phi0 / sigma**2,
        v2=-(xi1 + xi3) * phi0 / sigma,
        v3=xi1 * phi0,
        v4=0.0,
        alpha=sigma / 2.0,
    )


def _deng_fan_xi(p):
    d0 = math.expm1(p["sigma"] * p["re"])
    return d0, (1.0, -2.0 * (1.0 + d0), (1.0 + d0) ** 2)


def to_mixed(case: PresetCase):
    """(PotentialSpec, notes) for the preset."""
    p, name = case.params, case.name
    if name == "yukawa":
        return PotentialSpec(v2=p["V2"], alpha=p["alpha"]), "V1 = V3 = V4 = 0"
    if name == "coulomb":
        return PotentialSpec(v2=p["V2"], alpha=p["alpha"]), f"yukawa at sentinel alpha = {p['alpha']:g}"
    if name == "mie":
        return (
            PotentialSpec(v1=p["V1"], v2=p["V2"], v4=p["V4"], alpha=p["alpha"]),
            f"V3 = 0, sentinel alpha = {p['alpha']:g}",
        )
    if name == "kratzer_fues":
        return PotentialSpec(v1=p["V1"], v2=p["V2"], alpha=p["alpha"]), f"mie with V4 = 0, sentinel alpha = {p['alpha']:g}"
    if name == "manning_rosen":
        a = p["alpha"]
        return PotentialSpec(v1=p["V1p"] / a**2, v3=p["V3"], alpha=a), "V2 = V4 = 0, V1 = V1p/alpha^2"
    if name == "eckart":
        a = p["alpha"]
        return PotentialSpec(v1=p["V1p"] / a**2, v3=-p["V3"], alpha=a), "manning_rosen with V3 -> -V3"
    if name in ("hulthen", "yukawa_hulthen"):
        v0, b = p["V0"], p["b"]
        v2 = p.get("V2", 0.0)
        return PotentialSpec(v2=v2, v3=-v0 / 2.0, v4=v0 / 2.0, alpha=b / 2.0), "V1 = 0, V3 = -V4 = -V0/2, alpha = b/2"
    if name == "yukawa_inverse_square":
        return PotentialSpec(v1=p["V1"], v2=p["V2"], alpha=p["alpha"]), "V3 = V4 = 0"
    if name == "quadratic_exponential":
        return _qe_mixed(p["phi0"], p["xi1"], p["xi2"], p["xi3"], p["sigma"]), "alpha = sigma/2, V4 = 0"
    # deng_fan
    d0, (x1, x2, x3) = _deng_fan_xi(p)
    return _qe_mixed(p["De"], x1, x2, x3, p["sigma"]), f"quadratic_exponential with phi0 = De, delta0 = {d0:.17g}"


def matching_form(case: PresetCase) -> str:
    """Which form of the mixed potential ('exact' or 'pekeris') equals the preset pointwise."""
    return "pekeris" if case.name in {"manning_rosen", "eckart", "quadratic_exponential", "deng_fan"} else "exact"


def preset_potential(case: PresetCase, r):
    """The preset's own V(r), written in its textbook variables."""
    p, name = case.params, case.name
    r = np.asarray(r, dtype=float)
    if name == "yukawa":
        return p["V2"] * np.exp(-p["alpha"] * r) / r
    if name == "coulomb":
        return p["V2"] / r
    if name in ("mie", "kratzer_fues"):
        return p["V1"] / r**2 + p["V2"] / r + p.get("V4", 0.0)
    if name in ("manning_rosen", "eckart"):
        s = np.exp(-2.0 * p["alpha"] * r)
        one_minus_s = -np.expm1(-2.0 * p["alpha"] * r)
        v3 = p["V3"] if name == "manning_rosen" else -p["V3"]
        return 4.0 * p["V1p"] * s / one_minus_s**2 + v3 * (1.0 + s) / one_minus_s
    if name in ("hulthen", "yukawa_hulthen"):
        b = p["b"]
        out = -p["V0"] * np.exp(-b * r) / -np.expm1(-b * r)
        return out + p.get("V2", 0.0) * np.exp(-b * r / 2.0) / r
    if name == "yukawa_inverse_square":
        return p["V1"] / r**2 + p["V2"] * np.exp(-p["alpha"] * r) / r
    if name == "quadratic_exponential":
        e = np.exp(p["sigma"] * r)
        return p["phi0"] * (p["xi1"] * e * e + p["xi2"] * e + p["xi3"]) / np.expm1(p["sigma"] * r) ** 2
    d0, _ = _deng_fan_xi(p)
    return p["De"] * (1.0 - d0 / np.expm1(p["sigma"] * r)) ** 2


def _gamma_free(problem):
    return problem.dim / 2.0 + problem.ell - 0.5


def _gamma_quadratic(mass, v1, problem):
    j = problem.effective_dim
    disc = 8.0 * mass * v1 + (j - 2) ** 2
    if disc < 0:
        raise InvalidParams("inverse-square term too attractive for a real gamma")
    return 0.5 * (1.0 + math.sqrt(disc))


def direct_energy(case: PresetCase, problem: RadialProblem, q: QuantumNumbers) -> float:
    """The preset's dedicated energy formula."""
    if q.ell != problem.ell:
        raise InvalidParams(f"quantum number ell={q.ell} disagrees with problem ell={problem.ell}")
    p, name, m, n = case.params, case.name, problem.mass, q.n
    if name == "yukawa":
        g = _gamma_free(problem) + n
        return -((p["alpha"] * g + m * p["V2"] / g) ** 2) / (2.0 * m)
    if name == "coulomb":
        g = _gamma_free(problem) + n
        return -m * p["V2"] ** 2 / (2.0 * g * g)
    if name in ("mie", "kratzer_fues"):
        g = _gamma_quadratic(m, p["V1"], problem) + n
        return p.get("V4", 0.0) - m * p["V2"] ** 2 / (2.0 * g * g)
    if name in ("manning_rosen", "eckart"):
        a = p["alpha"]
        g = _gamma_quadratic(m, p["V1p"] / a**2, problem) + n
        b_coef = m * p["V3"] / (2.0 * a * a)
        return -(a * a / (2.0 * m)) * (g * g + 4.0 * b_coef**2 / (g * g))
    if name == "hulthen":
        b = p["b"]
        g = _gamma_free(problem) + n
        return -((b * g / 2.0 - m * p["V0"] / (b * g)) ** 2) / (2.0 * m)
    if name == "yukawa_hulthen":
        b = p["b"]
        g = _gamma_free(problem) + n
        return -((b * g / 2.0 + m * (b * p["V2"] - p["V0"]) / (b * g)) ** 2) / (2.0 * m)
    if name == "yukawa_inverse_square":
        g = _gamma_quadratic(m, p["V1"], problem) + n
        return -((p["alpha"] * g + m * p["V2"] / g) ** 2) / (2.0 * m)
    if name == "quadratic_exponential":
        phi0, x1, x2, x3, sig = p["phi0"], p["xi1"], p["xi2"], p["xi3"], p["sigma"]
        g = _gamma_quadratic(m, phi0 * (x1 + x2 + x3) / sig**2, problem) + n
        return phi0 * x1 - ((sig * g / 2.0 + m * phi0 * (x1 - x3) / (sig * g)) ** 2) / (2.0 * m)
    de, sig = p["De"], p["sigma"]
    d0, _ = _deng_fan_xi(p)
    g = _gamma_quadratic(m, de * d0 * d0 / sig**2, problem) + n
    return de - ((sig * g / 2.0 - m * de * d0 * (2.0 + d0) / (sig * g)) ** 2) / (2.0 * m)


def consistency_check(case: PresetCase, problem: RadialProblem, q: QuantumNumbers, floor: float = 1e-300) -> float:
    """Relative gap between the preset formula and the general closed form."""
    pot, _ = to_mixed(case)
    direct = direct_energy(case, problem, q)
    general = closed_energy(pot, problem, q)
    return abs(direct - general) / max(abs(direct), floor)


def _threshold(case):
    p, name = case.params, case.name
    if name in ("mie", "kratzer_fues"):
        return p.get("V4", 0.0)
    if name == "manning_rosen":
        return p["V3"]
    if name == "eckart":
        return -p["V3"]
    if name == "quadratic_exponential":
        return p["xi1"] * p["phi0"]
    if name == "deng_fan":
        return p["De"]
    return 0.0


def derived_decay(case: PresetCase, problem: RadialProblem, q: QuantumNumbers) -> float:
    """The preset's c_i shorthand sqrt(2M (V_inf - E)), using its own energy formula.

    c_i divided by 2 alpha (or by sigma, b) is the decay exponent c.  Reported
    for reference only; nothing in the energy path uses it.
    """
    e = direct_energy(case, problem, q)
    gap = _threshold(case) - e
    if gap < 0:
        raise InvalidParams("level lies above the preset's continuum threshold")
    return math.sqrt(2.0 * problem.mass * gap)

