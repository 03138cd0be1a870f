"""Closed-form radial eigenfunctions.

In the variable s = exp(-2 alpha r) the level-n eigenfunction is

    R(s) = K * s**c * (1 - s)**gamma * 2F1(-n, 2(c + gamma) + n; 1 + 2c; s)

with the hypergeometric factor a degree-n polynomial.  The (-1)**n Pochhammer
prefactor that usually accompanies it is absorbed into K, which is computed
in log space.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _kernels
from .errors import GridTooCoarse, InvalidParams, ScaleError
from .model import PotentialSpec, RadialProblem
from .spectrum import BoundState

__all__ = [
    "RadialWavefunction",
    "hypergeometric_2f1_terminating",
    "series_coefficients",
    "normalization_constant",
    "build_wavefunction",
    "radial_eval",
    "full_radial_factor",
    "count_nodes",
    "node_grid",
    "norm_integral",
    "ode_residual",
    "decay_radius",
    "jacobi_square_integral",
    "jacobi_square_quadrature",
]


def _check_c_param(n, c_param):
    for j in range(n):
        if c_param + j == 0:
            raise InvalidParams(f"c_param={c_param!r} makes the Pochhammer (c)_{j + 1} vanish")


def series_coefficients(n: int, b_param: float, c_param: float) -> np.ndarray:
    """Power-series coefficients of 2F1(-n, b; c; s), lowest power first."""
    if n < 0 or int(n) != n:
        raise InvalidParams(f"n must be a non-negative integer, got {n!r}")
    _check_c_param(int(n), c_param)
    return _kernels.hyp2f1_coefficients(int(n), float(b_param), float(c_param))


def hypergeometric_2f1_terminating(n: int, b_param: float, c_param: float, s):
    """2F1(-n, b; c; s) summed by forward recurrence on the term ratios.

    Accepts a scalar or an array ``s``; returns the same shape.
    """
    if n < 0 or int(n) != n:
        raise InvalidParams(f"n must be a non-negative integer, got {n!r}")
    _check_c_param(int(n), c_param)
    arr = np.asarray(s, dtype=float)
    out = _kernels.hyp2f1_terminating(int(n), b_param, c_param, np.atleast_1d(arr))
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def _log_k2(n, c, gamma, alpha):
    # Gamma(n+2c+1)/Gamma(2c+1) is the Pochhammer (2c+1)_n and
    # Gamma(n+2c+2gamma)/(Gamma(2c) Gamma(n+2gamma)) = 1/B(2c, n+2gamma);
    # grouping this way avoids cancelling huge lgamma values when c is large
    poch = sum(math.log(2.0 * c + 1.0 + j) for j in range(n))
    return (
        math.log(2.0 * alpha)
        + math.log(n + c + gamma)
        - math.log(n + gamma)
        - math.lgamma(n + 1.0)
        + poch
        - float(special.betaln(2.0 * c, n + 2.0 * gamma))
    )


def normalization_constant(state: BoundState, alpha: float) -> float:
    """K such that the integral of R**2 over (0, inf) in r is one."""
    if not (state.c > 0 and state.gamma > 0 and alpha > 0):
        raise InvalidParams("normalization needs c > 0, gamma > 0 and alpha > 0")
    log_k = 0.5 * _log_k2(state.n, state.c, state.gamma, alpha)
    if log_k > 709.0:
        raise ScaleError(f"log K = {log_k:.6g} overflows double precision")
    return math.exp(log_k)


@dataclass(frozen=True)
class RadialWavefunction:
    state: BoundState
    coefficients: tuple
    k_norm: float
    alpha: float

    def __post_init__(self):
        if len(self.coefficients) != self.state.n + 1:
            raise InvalidParams("need exactly n + 1 series coefficients")
        if self.coefficients[0] != 1.0:
            raise InvalidParams("series must start at 1")
        if not (math.isfinite(self.k_norm) and self.k_norm > 0):
            raise InvalidParams("k_norm must be positive and finite")

    @property
    def b_param(self) -> float:
        return 2.0 * (self.state.c + self.state.gamma) + self.state.n

    @property
    def c_param(self) -> float:
        return 1.0 + 2.0 * self.state.c

    @functools.cached_property
    def _u_coefficients(self):
        # 2F1(-n, b; c; s) = (c-b)_n/(c)_n 2F1(-n, b; b-c-n+1; 1-s), and b-c-n+1 = 2 gamma
        st = self.state
        pref = 1.0
        for j in range(st.n):
            pref *= (1.0 - 2.0 * st.gamma - st.n + j) / (self.c_param + j)
        return pref * _kernels.hyp2f1_coefficients(st.n, self.b_param, 2.0 * st.gamma)

    def series_x(self, x):
        """The hypergeometric polynomial at s = exp(-x), x = 2 alpha r.

        Each point uses the power series in s or in 1 - s, whichever has the
        smaller sum of absolute terms; when c dwarfs gamma the s form cancels
        catastrophically near s = 1.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        s = np.exp(-x)
        u = -np.expm1(-x)
        cs = np.asarray(self.coefficients)
        cu = self._u_coefficients
        poly = np.polynomial.polynomial.polyval
        use_u = poly(u, np.abs(cu)) < poly(s, np.abs(cs))
        return np.where(use_u, poly(u, cu), poly(s, cs))

    def series(self, s):
        """The bare hypergeometric polynomial at s."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        with np.errstate(divide="ignore"):
            return self.series_x(-np.log(s))


def build_wavefunction(state: BoundState, alpha: float) -> RadialWavefunction:
    coeffs = series_coefficients(state.n, 2.0 * (state.c + state.gamma) + state.n, 1.0 + 2.0 * state.c)
    return RadialWavefunction(state, tuple(float(x) for x in coeffs), normalization_constant(state, alpha), float(alpha))


def _eval_r(wf, alpha, r):
    r = np.asarray(r, dtype=float)
    flat = np.atleast_1d(r)
    if np.any(flat <= 0):
        raise InvalidParams("r must be > 0")
    x = 2.0 * alpha * flat
    st = wf.state
    # log of K s^c (1-s)^gamma; expm1 keeps 1 - s accurate at small r
    log_env = math.log(wf.k_norm) - x * st.c + st.gamma * np.log(-np.expm1(-x))
    out = np.exp(log_env) * wf.series_x(x)
    return float(out[0]) if r.ndim == 0 else out.reshape(r.shape)


def radial_eval(wf: RadialWavefunction, pot: PotentialSpec, r):
    return _eval_r(wf, pot.alpha, r)


def full_radial_factor(wf: RadialWavefunction, problem: RadialProblem, r):
    """r**(-(D-1)/2) R(r): the radial part of the D-dimensional eigenfunction."""
    value = _eval_r(wf, wf.alpha, r)
    return value * np.asarray(r, dtype=float) ** (-(problem.dim - 1) / 2.0)


def _x_window(wf):
    """Range of x = 2 alpha r outside which R**2 carries < 1e-17 of the norm."""
    st = wf.state
    log_k2 = 2.0 * math.log(wf.k_norm)
    f_sup = max(float(np.sum(np.abs(wf.coefficients))), 1.0)
    f1 = abs(float(wf._u_coefficients[0]))
    lo_exp = 2.0 * st.gamma + 1.0
    x_lo = math.exp((math.log(1e-17 * lo_exp * 2.0 * wf.alpha) - log_k2 - 2.0 * math.log(max(f1, 1.0))) / lo_exp)
    x_hi = (log_k2 + 2.0 * math.log(f_sup) - math.log(4.0 * st.c * wf.alpha) + 17.0 * math.log(10.0)) / (2.0 * st.c)
    x_lo = min(x_lo, 1e-3 * st.gamma / st.c)
    return x_lo, max(x_hi, 4.0 * x_lo, 10.0 * math.log(10.0) / st.c)


def node_grid(wf: RadialWavefunction, points: int | None = None) -> np.ndarray:
    """Increasing, log-spaced r grid covering where R is not negligible.

    Uses at least 512(n+1) points.
    """
    points = max(points or 0, 512 * (wf.state.n + 1))
    x_lo, x_hi = _x_window(wf)
    return np.geomspace(x_lo, x_hi, points) / (2.0 * wf.alpha)


def count_nodes(wf: RadialWavefunction, grid) -> int:
    """Sign changes of R over ``grid``.

    The envelope K s^c (1-s)^gamma is positive, so the sign is read from the
    polynomial factor alone and far-tail underflow cannot hide a node.
    """
    r = np.asarray(grid, dtype=float)
    if r.ndim != 1 or r.size < 2 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise InvalidParams("grid must be a strictly increasing array of positive radii")
    values = wf.series_x(2.0 * wf.alpha * r)
    zero = values == 0.0
    if np.any(zero[1:] & zero[:-1]):
        raise GridTooCoarse("consecutive exact zeros on the node grid")
    return _kernels.sign_changes(values)


# ---------------------------------------------------------------------------
# verification helpers

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def _panel_quad(fn, edges):
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    return float(np.sum(half[:, None] * _GL_W[None, :] * fn(nodes)))


def _graded_edges(s_lo, s_hi, ratio):
    """Panels geometric toward both 0 and 1, meeting at 1/2."""
    left = 0.5 * ratio ** np.arange(0, math.ceil(math.log(s_lo / 0.5) / math.log(ratio)) + 1)
    right = 1.0 - 0.5 * ratio ** np.arange(0, math.ceil(math.log((1.0 - s_hi) / 0.5) / math.log(ratio)) + 1)
    return np.unique(np.concatenate([left, right, [0.5]]))


def _graded_integral(fn, s_lo, s_hi, tol, max_doublings=12):
    ratio = 0.5
    prev = _panel_quad(fn, _graded_edges(s_lo, s_hi, ratio))
    for _ in range(max_doublings):
        ratio = math.sqrt(ratio)
        cur = _panel_quad(fn, _graded_edges(s_lo, s_hi, ratio))
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return cur


def _log_panel_integral(fn, x_lo, x_hi, tol, max_doublings=14):
    panels = max(8, math.ceil(math.log(x_hi / x_lo) / math.log(2.0)))
    prev = _panel_quad(fn, np.geomspace(x_lo, x_hi, panels + 1))
    for _ in range(max_doublings):
        panels *= 2
        cur = _panel_quad(fn, np.geomspace(x_lo, x_hi, panels + 1))
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return cur


def norm_integral(wf: RadialWavefunction, tol: float = 1e-10) -> float:
    """Integral of R(r)**2 over (0, inf).

    Integrated in x = 2 alpha r on log-spaced Gauss-Legendre panels, doubled
    until two successive totals agree to ``tol``.  Working in x keeps 1 - s
    accurate when alpha*r is tiny.
    """
    st = wf.state
    log_k2 = 2.0 * math.log(wf.k_norm)

    def integrand(x):
        log_env = log_k2 - 2.0 * st.c * x + 2.0 * st.gamma * np.log(-np.expm1(-x))
        return np.exp(log_env) * wf.series_x(x.ravel()).reshape(x.shape) ** 2

    x_lo, x_hi = _x_window(wf)
    return _log_panel_integral(integrand, x_lo, x_hi, tol) / (2.0 * wf.alpha)


def jacobi_square_integral(a: float, b: float, n: int) -> float:
    """Closed form of int_0^1 s^(2a-1) (1-s)^(2(b+1)) [2F1(-n, 2(a+b+1)+n; 1+2a; s)]^2 ds."""
    log_val = (
        math.log(n + b + 1.0)
        + math.lgamma(n + 1.0)
        + math.lgamma(n + 2.0 * b + 2.0)
        + math.lgamma(2.0 * a)
        + math.lgamma(2.0 * a + 1.0)
        - math.log(n + a + b + 1.0)
        - math.lgamma(n + 2.0 * a + 1.0)
        - math.lgamma(n + 2.0 * (a + b + 1.0))
    )
    return math.exp(log_val)


def jacobi_square_quadrature(a: float, b: float, n: int, tol: float = 1e-12) -> float:
    """The same integral by graded Gauss-Legendre panels."""
    bp, cp = 2.0 * (a + b + 1.0) + n, 1.0 + 2.0 * a

    def integrand(s):
        poly = _kernels.hyp2f1_terminating(n, bp, cp, s.ravel()).reshape(s.shape)
        return np.exp((2.0 * a - 1.0) * np.log(s) + 2.0 * (b + 1.0) * np.log1p(-s)) * poly**2

    s_lo = math.exp(max(math.log(1e-17 * 2.0 * a) / (2.0 * a), -690.0))
    return _graded_integral(integrand, min(s_lo, 0.25), 1.0 - 1e-12, tol)


def ode_residual(wf: RadialWavefunction, pot: PotentialSpec, problem: RadialProblem, s) -> np.ndarray:
    """Relative residual of the s-form radial equation at points ``s`` in (0, 1).

    The equation is multiplied through by s**2,

        s^2 R'' + s R' - [eps^2 + gamma(gamma-1) s/(1-s)^2 + A s/(1-s)
                          + B (1+s)/(1-s)] R = 0,   eps^2 = M (V4 - E)/(2 alpha^2),

    and each point's residual is divided by the sum of the magnitudes of the
    three terms.  The common factor K s^c (1-s)^gamma is dropped throughout.
    """
    s = np.asarray(s, dtype=float)
    if np.any((s <= 0) | (s >= 1)):
        raise InvalidParams("residual points must lie in (0, 1)")
    st, m, a = wf.state, problem.mass, pot.alpha
    c, g = st.c, st.gamma
    coeffs = np.asarray(wf.coefficients)
    f = np.polynomial.polynomial.polyval(s, coeffs)
    fp = np.polynomial.polynomial.polyval(s, np.polynomial.polynomial.polyder(coeffs))
    fpp = np.polynomial.polynomial.polyval(s, np.polynomial.polynomial.polyder(coeffs, 2))
    gp = c / s - g / (1.0 - s)
    gpp = -c / s**2 - g / (1.0 - s) ** 2
    t2 = s * s * ((gpp + gp * gp) * f + 2.0 * gp * fp + fpp)
    t1 = s * (gp * f + fp)
    eps2 = m * (pot.v4 - st.energy) / (2.0 * a * a)
    a_coef = m * pot.v2 / a
    b_coef = m * pot.v3 / (2.0 * a * a)
    pot_term = (eps2 + g * (g - 1.0) * s / (1.0 - s) ** 2 + a_coef * s / (1.0 - s) + b_coef * (1.0 + s) / (1.0 - s)) * f
    scale = np.abs(t2) + np.abs(t1) + np.abs(pot_term)
    return np.abs(t2 + t1 - pot_term) / np.where(scale > 0, scale, 1.0)


def decay_radius(wf: RadialWavefunction) -> float:
    """Radius beyond which s**c < 1e-10, hence |R| < 1e-10 K max|2F1|."""
    return 10.0 * math.log(10.0) / (2.0 * wf.alpha * wf.state.c)
