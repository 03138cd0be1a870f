"""Acceptance run: ten end-to-end checks at their stated tolerances.

Each check prints one PASS/FAIL line.  Run standalone with
``python tests/test_acceptance.py`` or through pytest.
"""

import functools
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import sweeps  # noqa: E402
from boundstate import aim, oracle, presets, wavefunction  # noqa: E402
from boundstate.model import QuantumNumbers, RadialProblem, decay_exponent, energy_from_decay, reduce  # noqa: E402
from boundstate.rational import RationalFn  # noqa: E402
from boundstate.spectrum import _energy, _level_count, bound_state, energy  # noqa: E402

SEED = 20240601


@functools.lru_cache(maxsize=None)
def sweep():
    """The 20 random admissible sets (four levels each) shared by checks 1, 2, 9 and 10."""
    return sweeps.mixed_sets(SEED, 20, levels=4)


@functools.lru_cache(maxsize=None)
def state_sample():
    """10 random admissible states shared by checks 5, 6 and 7."""
    out = []
    for pot, problem, n in sweeps.random_states(SEED + 1, 10):
        out.append((pot, problem, n, wavefunction.build_wavefunction(bound_state(pot, problem, n), pot.alpha)))
    return out


def aim_vs_closed_form():
    worst_c = worst_e = 0.0
    for pot, problem in sweep():
        reduced = reduce(pot, problem)
        roots = aim.solve_spectrum(reduced, aim.AimConfig(), 4)
        for n, c in enumerate(roots):
            c_ref = decay_exponent(reduced, n)
            worst_c = max(worst_c, abs(c - c_ref) / c_ref)
            e_ref = energy(pot, problem, QuantumNumbers(n, problem.ell))
            worst_e = max(worst_e, abs(energy_from_decay(c, reduced, pot, problem) - e_ref) / abs(e_ref))
    ok = worst_c < 1e-9 and worst_e < 1e-9
    return ok, f"max rel. error: c {worst_c:.2e}, E {worst_e:.2e} (tol 1e-09)"


def oracle_vs_closed_form():
    worst_ratio = worst_err = 0.0
    for pot, problem in sweep():
        reduced = reduce(pot, problem)
        res = oracle.solve(pot, problem, "pekeris", None, 3)
        if len(res.eigenvalues) < 3:
            return False, f"oracle found only {len(res.eigenvalues)} levels"
        for n, (e, err) in enumerate(zip(res.eigenvalues, res.grid_error_estimate)):
            worst_ratio = max(worst_ratio, abs(e - _energy(pot, problem, reduced.gamma, n)) / err)
            worst_err = max(worst_err, err / abs(e))
    ok = worst_ratio <= 1.0 and worst_err < 1e-5
    return ok, f"max |dE|/err {worst_ratio:.3f} (tol 1), max err/|E| {worst_err:.2e} (tol 1e-05)"


HULTHEN_ALPHAS = (0.2, 0.1, 0.05, 0.025)


def pekeris_trend():
    problem = RadialProblem(mass=1.0, dim=3, ell=1)
    diffs = []
    for a in HULTHEN_ALPHAS:
        pot, _ = presets.to_mixed(presets.PresetCase("hulthen", {"V0": 1.0, "b": 2.0 * a}))
        diffs.append(oracle.pekeris_error_report(pot, problem, None, 1)[0][3])
    decreasing = all(b < a for a, b in zip(diffs, diffs[1:]))
    ok = decreasing and diffs[-1] < 1e-3
    return ok, "rel. diff at alpha " + ", ".join(f"{a:g}: {d:.2e}" for a, d in zip(HULTHEN_ALPHAS, diffs))


def coulomb_limit():
    case = presets.PresetCase("coulomb", {"V2": -1.0})
    pot, _ = presets.to_mixed(case)
    worst = 0.0
    for n, ell in ((0, 0), (1, 0), (0, 1)):
        e = energy(pot, RadialProblem(mass=1.0, dim=3, ell=ell), QuantumNumbers(n, ell))
        worst = max(worst, abs(e + 0.5 / (n + ell + 1) ** 2))
    return worst < 1e-6, f"max |E - E_hydrogen| {worst:.2e} (tol 1e-06)"


def normalization():
    worst = max(abs(wavefunction.norm_integral(wf) - 1.0) for *_, wf in state_sample())
    return worst < 1e-8, f"max |norm - 1| {worst:.2e} (tol 1e-08)"


def node_theorem():
    bad = []
    for pot, problem, n, wf in state_sample():
        closed = wavefunction.count_nodes(wf, wavefunction.node_grid(wf))
        grid = oracle.default_grid(pot, problem, n + 1)
        numeric = oracle.node_counts(pot, problem, "pekeris", grid, n + 1)[n]
        if closed != n or numeric != n:
            bad.append((n, closed, numeric))
    ns = [s[2] for s in state_sample()]
    return not bad, f"n = {ns}; mismatches (n, closed, oracle): {bad}"


def ode_residual():
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for pot, problem, _, wf in state_sample():
        s = rng.uniform(0.01, 0.99, 100)
        worst = max(worst, float(np.max(np.abs(wavefunction.ode_residual(wf, pot, problem, s)))))
    return worst < 1e-8, f"max normalised residual {worst:.2e} (tol 1e-08)"


def preset_identities():
    worst = {}
    ok = True
    for i, name in enumerate(presets.PRESETS):
        tol = 1e-6 if name in presets.SENTINEL_CASES else 1e-12
        dev = max(presets.consistency_check(c, p, q) for c, p, q in sweeps.preset_draws(name, SEED + 10 + i, 50))
        worst[name] = dev
        ok = ok and dev < tol
    finite = max(v for k, v in worst.items() if k not in presets.SENTINEL_CASES)
    sentinel = max(v for k, v in worst.items() if k in presets.SENTINEL_CASES)
    return ok, f"max rel. gap: finite alpha {finite:.2e} (tol 1e-12), sentinel {sentinel:.2e} (tol 1e-06)"


def _exact_aim_checks():
    import sympy as sp

    beta, delta, eta = sp.symbols("beta delta eta")
    s = sp.Symbol("s")
    lam0, s0 = aim.seed_from(beta, delta, eta)
    lam1, s1 = aim.iterate(lam0, s0, lam0, s0)
    expected = sp.Poly(s**2 * (beta**2 + beta - eta) + s * (eta - 2 * delta - 2 * beta * delta) + delta**2 + delta, s)
    got = sp.Poly(sum(cf * s**j for j, cf in enumerate(lam1.numer)), s)
    symbolic = (lam1.p, lam1.q) == (2, 2) and sp.expand(got.as_expr() - expected.as_expr()) == 0
    raw = aim.delta_k(lam1, s1, lam0, s0)
    d1 = RationalFn(tuple(sp.expand(x) for x in raw.numer), raw.p, raw.q).cancel()
    delta_ok = (d1.p, d1.q) == (2, 2) and len(d1.numer) == 1 and sp.expand(d1.numer[0] - eta * (eta + beta)) == 0
    integer_ok = True
    for b, d, e in ((5, 3, 3), (7, 2, -3), (4, 9, 11), (-3, 1, 5)):
        l0, z0 = aim.seed_from(b, d, e)
        l1, z1 = aim.iterate(l0, z0, l0, z0)
        integer_ok &= l1.numer == (d * d + d, e - 2 * d - 2 * b * d, b * b + b - e)
        integer_ok &= aim.delta_k(l1, z1, l0, z0).cancel().numer == (e * (e + b),)
    return symbolic and integer_ok, delta_ok


def aim_structure():
    lam_ok, delta_ok = _exact_aim_checks()
    rng = np.random.default_rng(SEED + 3)
    s_dev = poly_dev = 0.0
    for pot, problem in sweep():
        reduced = reduce(pot, problem)
        for n in range(4):
            c = decay_exponent(reduced, n)
            steps = aim.ladder(*aim.seed(reduced, c), n + 1)
            s_dev = max(s_dev, aim.s_independence_check(reduced, c, n + 1, rng.uniform(0.05, 0.95, 9)))
            k = max(n, 1)
            poly_dev = max(poly_dev, aim.delta_deviation(*steps[k], *steps[k - 1]))
    ok = lam_ok and delta_ok and s_dev < 1e-8 and poly_dev < 1e-8
    return ok, (
        f"lambda_1 exact: {lam_ok}, Delta_1 = eta(eta+beta): {delta_ok}, "
        f"s-independence {s_dev:.2e}, polynomial theorem {poly_dev:.2e} (tol 1e-08)"
    )


def interdimensional():
    bitwise = total = 0
    worst = 0.0
    for pot, problem in sweep():
        pairs = [(problem.ell + 1, problem.ell)]
        if problem.ell >= 1:
            pairs.append((problem.ell, problem.ell - 1))
        for ell_a, ell_b in pairs:
            a = RadialProblem(problem.mass, problem.dim, ell_a)
            b = RadialProblem(problem.mass, problem.dim + 2, ell_b)
            levels = _level_count(reduce(pot, a))
            if levels != _level_count(reduce(pot, b)):
                return False, f"level counts differ for {a} and {b}"
            for n in range(levels):
                ea = energy(pot, a, QuantumNumbers(n, ell_a))
                eb = energy(pot, b, QuantumNumbers(n, ell_b))
                total += 1
                bitwise += ea == eb
                worst = max(worst, abs(ea - eb) / abs(ea))
    return worst < 1e-14, f"{bitwise}/{total} level pairs bitwise equal, max rel. gap {worst:.1e}"


CHECKS = (
    ("aim roots vs closed form", aim_vs_closed_form),
    ("oracle (Pekeris form) vs closed form", oracle_vs_closed_form),
    ("Pekeris fidelity trend", pekeris_trend),
    ("Coulomb limit", coulomb_limit),
    ("normalization quadrature", normalization),
    ("node theorem", node_theorem),
    ("ODE residual", ode_residual),
    ("preset identities", preset_identities),
    ("AIM structure", aim_structure),
    ("interdimensional degeneracy", interdimensional),
)


def run(index):
    label, fn = CHECKS[index]
    start = time.perf_counter()
    ok, detail = fn()
    line = f"[{index + 1:2d}] {'PASS' if ok else 'FAIL'}  {label}: {detail}  ({time.perf_counter() - start:.1f} s)"
    return ok, line


@pytest.mark.parametrize("index", range(len(CHECKS)), ids=[label.replace(" ", "_") for label, _ in CHECKS])
def test_acceptance(index, capsys):
    ok, line = run(index)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run(i) for i in range(len(CHECKS))]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
