"""Hot numeric kernels with a numba-jitted default and a pure-numpy fallback.

The jitted path is the default.  Set the environment variable
``CLSIBOUND_PURE_NUMPY=1`` before import to select the plain-numpy path
(useful for debugging and as a baseline for ``benchmarks/bench_kernels.py``).

Everything here is written once, in nopython-compatible style, and either
left as-is (numpy path) or wrapped with ``numba.njit`` (default path).
"""

from __future__ import annotations

import math
import os

import numpy as np

_ENV_FLAG = "CLSIBOUND_PURE_NUMPY"

# Scalar kernel codes shared with spectral.ScalarKernel.
KERNEL_LOG_QUOTIENT = 0
KERNEL_POWER_QUOTIENT = 1
KERNEL_TILT = 2

# |x - y| < DIAG_REL_TOL * max(x, y) switches to the analytic derivative
# value; the off-diagonal branches use log1p/expm1 so they stay accurate
# right up to the switch.
DIAG_REL_TOL = 1e-9

# Optimizer state parametrization rho(H) = n exp(H)/tr exp(H): spectral cap
# on H keeps spectra inside [e^-20, e^20].
H_CAP = 20.0

# Points with relative entropy below this floor belong to the excluded
# neighbourhood of the fixed-point manifold: the ratio I/D is 0/0 there and
# its infimum is approached from outside.  1e-10 keeps the floating-point
# error of the ratio below ~1e-9 (the tightest acceptance window).
ENTROPY_FLOOR = 1e-10

# A conditional-expectation output whose spectrum is this far from positive
# (relative to its largest eigenvalue) signals a broken expectation.
_EXPECTATION_FLOOR = 1e-14


def _bregman_log(r):
    # r ln r - r + 1 >= 0, accurate near r = 1 (no large-term cancellation)
    x = r - 1.0
    return r * math.log1p(x) - x


def _bregman_power(x, y, p):
    # x^p - y^p - p (x - y) y^(p-1) >= 0 for p in (1, 2)
    u = x / y - 1.0
    return (y ** p) * (math.expm1(p * math.log1p(u)) - p * u)


def _kernel_matrix(x, y, kind, p):
    nx = x.shape[0]
    ny = y.shape[0]
    out = np.empty((nx, ny))
    for i in range(nx):
        xi = x[i]
        for j in range(ny):
            yj = y[j]
            d = xi - yj
            if abs(d) < DIAG_REL_TOL * max(xi, yj):
                if kind == KERNEL_LOG_QUOTIENT:
                    out[i, j] = 1.0 / xi
                elif kind == KERNEL_POWER_QUOTIENT:
                    out[i, j] = (p - 1.0) * xi ** (p - 2.0)
                else:
                    out[i, j] = xi
            else:
                if kind == KERNEL_LOG_QUOTIENT:
                    out[i, j] = math.log1p(d / yj) / d
                elif kind == KERNEL_POWER_QUOTIENT:
                    out[i, j] = (yj ** (p - 1.0)) * math.expm1(
                        (p - 1.0) * math.log1p(d / yj)) / d
                else:
                    out[i, j] = d / math.log1p(d / yj)
    return out


def _hermitian_from_params(theta, n):
    # theta layout: n diagonal entries, then (re, im) per pair i < j
    h = np.zeros((n, n), dtype=np.complex128)
    k = 0
    for i in range(n):
        h[i, i] = complex(theta[k], 0.0)
        k += 1
    for i in range(n):
        for j in range(i + 1, n):
            h[i, j] = complex(theta[k], theta[k + 1])
            h[j, i] = complex(theta[k], -theta[k + 1])
            k += 2
    return h


def _column_vec(a, n):
    v = np.empty(n * n, dtype=np.complex128)
    t = 0
    for j in range(n):
        for i in range(n):
            v[t] = a[i, j]
            t += 1
    return v


def _column_unvec(v, n):
    a = np.empty((n, n), dtype=np.complex128)
    t = 0
    for j in range(n):
        for i in range(n):
            a[i, j] = v[t]
            t += 1
    return a


def _dagger(a):
    n = a.shape[0]
    out = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            out[i, j] = np.conj(a[j, i])
    return out


def _state_and_expectation(theta, eproj, n):
    """Shared head of the ratio objectives.

    Returns (ok, p, U, mu, V, overlap, vec_rho): eigenvalues/eigenvectors of
    rho and of sigma = E(rho) (trace-renormalized), the overlap matrix
    |<u_i|v_j>|^2, and vec(rho).  ok = False flags an excluded point.
    """
    h = _hermitian_from_params(theta, n)
    w, u = np.linalg.eigh(h)
    wmax = 0.0
    for i in range(n):
        wmax = max(wmax, abs(w[i]))
    zero1 = np.zeros(1)
    zero2 = np.zeros((1, 1), dtype=np.complex128)
    zerov = np.zeros(1, dtype=np.complex128)
    zeroo = np.zeros((1, 1))
    if wmax > H_CAP:
        return False, zero1, zero2, zero1, zero2, zeroo, zerov
    z = np.exp(w)
    total = z.sum()
    p = (n / total) * z
    ud = _dagger(u)
    rho = (u * p) @ ud
    v = _column_vec(rho, n)
    sv = eproj @ v
    raw = _column_unvec(sv, n)
    tr = 0.0
    for i in range(n):
        tr += raw[i, i].real
    if tr <= 0.0:
        return False, zero1, zero2, zero1, zero2, zeroo, zerov
    c = n / tr
    sig = np.empty((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            sig[i, j] = 0.5 * (raw[i, j] + np.conj(raw[j, i])) * c
    mu, vmat = np.linalg.eigh(sig)
    if mu[0] <= _EXPECTATION_FLOOR * mu[n - 1] or mu[0] <= 0.0:
        return False, zero1, zero2, zero1, zero2, zeroo, zerov
    ov = ud @ vmat
    overlap = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            s = ov[i, j]
            overlap[i, j] = s.real * s.real + s.imag * s.imag
    return True, p, u, mu, vmat, overlap, v


def _mlsi_terms(theta, superop, eproj, n):
    """Objective for the MLSI ratio I(rho)/D(rho || E rho).

    Returns (ratio, fisher, entropy); ratio is +inf on excluded points
    (spectral cap breach, broken expectation, entropy under the floor).
    """
    ok, p, u, mu, vmat, overlap, v = _state_and_expectation(theta, eproj, n)
    if not ok:
        return (np.inf, 0.0, 0.0)
    d = 0.0
    for i in range(n):
        for j in range(n):
            d += overlap[i, j] * mu[j] * _bregman_log(p[i] / mu[j])
    d /= n
    if d < ENTROPY_FLOOR:
        return (np.inf, 0.0, d)
    lw = np.log(p)
    lw = lw - lw.mean()  # constant shift is traceless against A(rho)
    lnrho = (u * lw) @ _dagger(u)
    av = superop @ v
    a = _column_unvec(av, n)
    fisher = 0.0
    for i in range(n):
        for j in range(n):
            fisher += (a[i, j] * lnrho[j, i]).real
    fisher /= n
    return (fisher / d, fisher, d)


def _cpsi_terms(theta, superop, eproj, n, p_exp):
    """Objective for the p-ratio I^p(rho)/d^p(rho || E rho), p in (1,2)."""
    ok, p, u, mu, vmat, overlap, v = _state_and_expectation(theta, eproj, n)
    if not ok:
        return (np.inf, 0.0, 0.0)
    d = 0.0
    for i in range(n):
        for j in range(n):
            d += overlap[i, j] * _bregman_power(p[i], mu[j], p_exp)
    d /= n
    if d < ENTROPY_FLOOR:
        return (np.inf, 0.0, d)
    rp = p ** (p_exp - 1.0)
    rp = rp - rp.mean()
    rmat = (u * rp) @ _dagger(u)
    av = superop @ v
    a = _column_unvec(av, n)
    fisher = 0.0
    for i in range(n):
        for j in range(n):
            fisher += (a[i, j] * rmat[j, i]).real
    fisher = p_exp * fisher / n
    return (fisher / d, fisher, d)


def _classical_terms(theta, mu, edge_u, edge_v, edge_w):
    """Objective for the classical graph ratio over positive vertex functions
    f = exp(theta); the ratio is scale invariant so no normalization is
    applied."""
    nv = theta.shape[0]
    tmax = 0.0
    for i in range(nv):
        tmax = max(tmax, abs(theta[i]))
    if tmax > H_CAP:
        return (np.inf, 0.0, 0.0)
    f = np.exp(theta)
    xi = 0.0
    for x in range(nv):
        xi += mu[x] * f[x]
    d = 0.0
    for x in range(nv):
        d += mu[x] * xi * _bregman_log(f[x] / xi)
    if d < ENTROPY_FLOOR:
        return (np.inf, 0.0, d)
    fisher = 0.0
    for e in range(edge_u.shape[0]):
        a = edge_u[e]
        b = edge_v[e]
        fisher += edge_w[e] * (mu[a] + mu[b]) * (f[b] - f[a]) * (theta[b] - theta[a])
    return (fisher / d, fisher, d)


def _want_numba() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() not in {"1", "true", "yes"}


HAVE_NUMBA = False
if _want_numba():
    try:
        from numba import njit  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False

if HAVE_NUMBA:
    BACKEND = "numba"
    _jit = njit(cache=True)
    # Rebind helpers first so the outer kernels resolve them as compiled
    # callees.
    _bregman_log = _jit(_bregman_log)
    _bregman_power = _jit(_bregman_power)
    _hermitian_from_params = _jit(_hermitian_from_params)
    _column_vec = _jit(_column_vec)
    _column_unvec = _jit(_column_unvec)
    _dagger = _jit(_dagger)
    _state_and_expectation = _jit(_state_and_expectation)
    kernel_matrix = _jit(_kernel_matrix)
    mlsi_terms = _jit(_mlsi_terms)
    cpsi_terms = _jit(_cpsi_terms)
    classical_terms = _jit(_classical_terms)
else:
    BACKEND = "numpy"
    kernel_matrix = _kernel_matrix
    mlsi_terms = _mlsi_terms
    cpsi_terms = _cpsi_terms
    classical_terms = _classical_terms


def hermitian_from_params(theta, n: int) -> np.ndarray:
    """Decode an optimizer parameter vector into a Hermitian matrix."""
    return _hermitian_from_params(np.ascontiguousarray(theta, dtype=np.float64), n)


def params_from_hermitian(h: np.ndarray) -> np.ndarray:
    """Inverse of :func:`hermitian_from_params` (imaginary diagonal dropped)."""
    n = h.shape[0]
    theta = np.empty(n * n)
    theta[:n] = np.real(np.diag(h))
    k = n
    for i in range(n):
        for j in range(i + 1, n):
            theta[k] = h[i, j].real
            theta[k + 1] = h[i, j].imag
            k += 2
    return theta
