"""Hot numeric kernels.

Every kernel exists twice: an explicit-loop version that numba compiles with
``njit`` and a vectorised pure-numpy version.  The loop versions are also
valid (slow) Python, which is what the parity tests lean on.

Set ``BOUNDSTATE_DISABLE_NUMBA=1`` before import to force the numpy path.
"""

import os

import numpy as np
from scipy.linalg import eigh_tridiagonal

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("BOUNDSTATE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = numba is not None and not _DISABLED


def _jit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)


# ---------------------------------------------------------------------------
# terminating 2F1(-n, b; c; s)


def _hyp2f1_loops(n, b, c, s):
    out = np.empty(s.shape[0])
    for i in range(s.shape[0]):
        term = 1.0
        total = 1.0
        for j in range(n):
            term *= (j - n) * (b + j) / ((c + j) * (j + 1.0)) * s[i]
            total += term
        out[i] = total
    return out


def hyp2f1_coefficients(n, b, c):
    """Series coefficients (-n)_j (b)_j / ((c)_j j!) for j = 0..n."""
    coef = np.empty(n + 1)
    coef[0] = 1.0
    for j in range(n):
        coef[j + 1] = coef[j] * (j - n) * (b + j) / ((c + j) * (j + 1.0))
    return coef


def _hyp2f1_numpy(n, b, c, s):
    coef = hyp2f1_coefficients(n, b, c)
    out = np.full(s.shape, coef[n])
    for j in range(n - 1, -1, -1):
        out = out * s + coef[j]
    return out


# ---------------------------------------------------------------------------
# sign changes


def _sign_changes_loops(values, floor):
    count = 0
    last = 0.0
    for v in values:
        if abs(v) <= floor:
            continue
        if last != 0.0 and (v > 0.0) != (last > 0.0):
            count += 1
        last = v
    return count


def _sign_changes_numpy(values, floor):
    kept = values[np.abs(values) > floor]
    if kept.size < 2:
        return 0
    return int(np.count_nonzero(np.signbit(kept[1:]) != np.signbit(kept[:-1])))


# ---------------------------------------------------------------------------
# Sturm counts and bisection for the pencil  T - E*W,
# T symmetric tridiagonal (diag ``a``, squared off-diagonal ``e2``), W = diag(w) > 0


def _sturm_count_loops(a, w, e2, energy):
    count = 0
    q = a[0] - energy * w[0]
    if q < 0.0:
        count += 1
    for i in range(1, a.shape[0]):
        if q == 0.0:
            q = 1e-300
        q = (a[i] - energy * w[i]) - e2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def _pencil_eigenvalues_loops(a, w, e2, indices, lo, hi, rtol):
    out = np.empty(indices.shape[0])
    for m in range(indices.shape[0]):
        k = indices[m]
        left, right = lo, hi
        while right - left > rtol * max(abs(left), abs(right), 1e-300):
            mid = 0.5 * (left + right)
            if mid == left or mid == right:
                break
            if _sturm_count_jit(a, w, e2, mid) > k:
                right = mid
            else:
                left = mid
        out[m] = 0.5 * (left + right)
    return out


# Without numba the sequential recurrence is too slow in Python, so the
# fallback hands the congruent symmetric matrix W^-1/2 T W^-1/2 (same Sturm
# counts) to LAPACK's bisection.  The explicit tiny tolerance matters: the
# default one is absolute, eps times a norm dominated by the r -> 0 end.


def _symmetric_form(a, w, e2):
    sw = np.sqrt(w)
    return a / w, np.sqrt(e2) / (sw[:-1] * sw[1:])


def _gershgorin_floor(d, e):
    pad = np.zeros(d.shape[0])
    pad[:-1] += np.abs(e)
    pad[1:] += np.abs(e)
    return float(np.min(d - pad)) - 1.0


def _sturm_count_numpy(a, w, e2, energy):
    d, e = _symmetric_form(a, w, e2)
    floor = _gershgorin_floor(d, e)
    if energy <= floor:
        return 0
    # a tolerance wider than the window stops LAPACK right after counting
    found = eigh_tridiagonal(
        d, e, eigvals_only=True, select="v", select_range=(floor, energy),
        lapack_driver="stebz", tol=2.0 * (energy - floor),
    )
    return int(found.shape[0])


def _pencil_eigenvalues_numpy(a, w, e2, indices, lo, hi, rtol):
    d, e = _symmetric_form(a, w, e2)
    indices = np.asarray(indices)
    if indices.size == 0:
        return np.empty(0)
    vals = eigh_tridiagonal(
        d, e, eigvals_only=True, select="i", select_range=(int(indices.min()), int(indices.max())),
        lapack_driver="stebz", tol=np.finfo(float).tiny,
    )
    return np.clip(vals[indices - indices.min()], lo, hi)


# ---------------------------------------------------------------------------
# AIM ladder:  lambda_k = L_k / d**(k+1),  s_k = S_k / d**(k+1),  d = s(1-s)
#   L_k = L' d - k d' L + S d + (beta s - delta) L
#   S_k = S' d - k d' S + eta L
# Numerators are held as Taylor coefficients in t = s - s0, so the value at s0
# is coefficient 0; the monomial basis loses ~0.75 digits per step to cancellation.
# Each step rescales the (L, S) pair by a positive factor.


def _aim_table_loops(cs, gamma, a_coef, b_coef, s0, k_max):
    size = k_max + 3
    d0 = s0 * (1.0 - s0)
    d1 = 1.0 - 2.0 * s0
    out = np.empty((cs.shape[0], k_max))
    rel = np.empty((cs.shape[0], k_max))
    for ic in range(cs.shape[0]):
        c = cs[ic]
        beta = 2.0 * c + 2.0 * gamma + 1.0
        lam_at = beta * s0 - (2.0 * c + 1.0)
        eta = gamma * gamma + 2.0 * c * gamma + a_coef + 2.0 * b_coef
        L = np.zeros(size)
        S = np.zeros(size)
        L[0] = lam_at
        L[1] = beta
        S[0] = eta
        for k in range(1, k_max + 1):
            Ln = np.zeros(size)
            Sn = np.zeros(size)
            for i in range(k + 2):
                # derivative coefficients j of L', S' are (j+1)*L[j+1]
                lp0 = (i + 1) * L[i + 1]
                sp0 = (i + 1) * S[i + 1]
                lp1 = i * L[i] if i >= 1 else 0.0
                sp1 = i * S[i] if i >= 1 else 0.0
                lp2 = (i - 1) * L[i - 1] if i >= 2 else 0.0
                sp2 = (i - 1) * S[i - 1] if i >= 2 else 0.0
                l1 = L[i - 1] if i >= 1 else 0.0
                s1 = S[i - 1] if i >= 1 else 0.0
                s2 = S[i - 2] if i >= 2 else 0.0
                Ln[i] = (
                    d0 * lp0 + d1 * lp1 - lp2
                    - k * (d1 * L[i] - 2.0 * l1)
                    + d0 * S[i] + d1 * s1 - s2
                    + lam_at * L[i] + beta * l1
                )
                Sn[i] = d0 * sp0 + d1 * sp1 - sp2 - k * (d1 * S[i] - 2.0 * s1) + eta * L[i]
            norm_new = 0.0
            norm_old = 0.0
            snorm = 0.0
            for i in range(k + 2):
                norm_new = max(norm_new, abs(Ln[i]))
                norm_old = max(norm_old, abs(L[i]))
                snorm = max(snorm, abs(Sn[i]))
            scale = norm_new * norm_old
            a = Ln[0] * S[0]
            b = L[0] * Sn[0]
            out[ic, k - 1] = (a - b) / scale if scale > 0.0 else 0.0
            mag = abs(a) + abs(b)
            rel[ic, k - 1] = abs(a - b) / mag if mag > 0.0 else 0.0
            f = max(norm_new, snorm)
            if f > 0.0:
                for i in range(size):
                    Ln[i] /= f
                    Sn[i] /= f
            L = Ln
            S = Sn
    return out, rel


def _shift(p, by):
    out = np.zeros_like(p)
    out[:, by:] = p[:, : p.shape[1] - by]
    return out


def _aim_table_numpy(cs, gamma, a_coef, b_coef, s0, k_max):
    cs = np.asarray(cs, dtype=float)
    nc, size = cs.shape[0], k_max + 3
    d0, d1 = s0 * (1.0 - s0), 1.0 - 2.0 * s0
    beta = (2.0 * cs + 2.0 * gamma + 1.0)[:, None]
    lam_at = beta * s0 - (2.0 * cs + 1.0)[:, None]
    eta = (gamma * gamma + 2.0 * cs * gamma + a_coef + 2.0 * b_coef)[:, None]
    L = np.zeros((nc, size))
    S = np.zeros((nc, size))
    L[:, :1], L[:, 1:2], S[:, :1] = lam_at, beta, eta
    up = np.arange(1, size, dtype=float)

    def deriv(p):
        out = np.zeros_like(p)
        out[:, :-1] = p[:, 1:] * up
        return out

    def times_d(p):
        return d0 * p + d1 * _shift(p, 1) - _shift(p, 2)

    out = np.empty((nc, k_max))
    rel = np.empty((nc, k_max))
    for k in range(1, k_max + 1):
        Ln = times_d(deriv(L)) - k * (d1 * L - 2.0 * _shift(L, 1)) + times_d(S) + lam_at * L + beta * _shift(L, 1)
        Sn = times_d(deriv(S)) - k * (d1 * S - 2.0 * _shift(S, 1)) + eta * L
        norm_new = np.abs(Ln).max(axis=1)
        scale = norm_new * np.abs(L).max(axis=1)
        a, b = Ln[:, 0] * S[:, 0], L[:, 0] * Sn[:, 0]
        mag = np.abs(a) + np.abs(b)
        with np.errstate(invalid="ignore", divide="ignore"):
            out[:, k - 1] = np.where(scale > 0.0, (a - b) / scale, 0.0)
            rel[:, k - 1] = np.where(mag > 0.0, np.abs(a - b) / mag, 0.0)
        f = np.maximum(norm_new, np.abs(Sn).max(axis=1))
        f = np.where(f > 0.0, f, 1.0)[:, None]
        L, S = Ln / f, Sn / f
    return out, rel


# ---------------------------------------------------------------------------
# dispatch

hyp2f1_loops = _hyp2f1_loops
sign_changes_loops = _sign_changes_loops
aim_table_loops = _aim_table_loops

if numba is not None:
    _hyp2f1_jit = _jit(_hyp2f1_loops)
    _sign_changes_jit = _jit(_sign_changes_loops)
    _sturm_count_jit = _jit(_sturm_count_loops)
    _pencil_eigenvalues_jit = _jit(_pencil_eigenvalues_loops)
    _aim_table_jit = _jit(_aim_table_loops)
else:  # pragma: no cover
    _sturm_count_jit = _sturm_count_loops


def hyp2f1_terminating(n, b, c, s):
    s = np.ascontiguousarray(s, dtype=float)
    if USE_NUMBA:
        return _hyp2f1_jit(int(n), float(b), float(c), s.ravel()).reshape(s.shape)
    return _hyp2f1_numpy(int(n), float(b), float(c), s)


def sign_changes(values, floor=0.0):
    values = np.ascontiguousarray(values, dtype=float)
    if USE_NUMBA:
        return int(_sign_changes_jit(values, float(floor)))
    return _sign_changes_numpy(values, floor)


def sturm_count(a, w, e2, energy):
    if USE_NUMBA:
        return int(_sturm_count_jit(a, w, e2, float(energy)))
    return _sturm_count_numpy(a, w, e2, float(energy))


def pencil_eigenvalues(a, w, e2, indices, lo, hi, rtol=1e-15):
    """Eigenvalues number ``indices`` (0-based, ascending) of T - E*W inside (lo, hi)."""
    a, w, e2 = (np.ascontiguousarray(x, dtype=float) for x in (a, w, e2))
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if USE_NUMBA:
        return _pencil_eigenvalues_jit(a, w, e2, indices, float(lo), float(hi), float(rtol))
    return _pencil_eigenvalues_numpy(a, w, e2, indices, lo, hi, rtol)


def aim_delta_table(cs, gamma, a_coef, b_coef, s0, k_max):
    """Normalised Delta_k(s0) for every trial c (rows) and k = 1..k_max (columns).

    Returns ``(delta, rel)``.  ``delta`` is Delta_k's numerator at s0 divided
    by the product of the max-coefficient norms of L_k and L_{k-1}; that
    positive factor leaves the sign, and therefore the root locations in c,
    untouched.  ``rel`` is |a - b| / (|a| + |b|) for the two products whose
    difference forms Delta_k: entries near the rounding floor carry no sign
    information, and since s_k/lambda_k converges with k they get there fast
    when c is large.
    """
    cs = np.ascontiguousarray(np.atleast_1d(cs), dtype=float)
    if USE_NUMBA:
        return _aim_table_jit(cs, float(gamma), float(a_coef), float(b_coef), float(s0), int(k_max))
    return _aim_table_numpy(cs, gamma, a_coef, b_coef, s0, k_max)
