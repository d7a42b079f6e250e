"""Hot numeric kernels: Fourier inversion integrand and Monte Carlo payoffs.

A payoff here is always a finite exponential sum ``f(x) = sum_j C_j exp(v_j x)``
restricted to ``(kappa1, kappa2)`` (Fourier side) or taken as a positive part
(Monte Carlo side). Process parameters arrive as the flat vector produced by
``AffineProcessSpec.kernel_params``:
``[kind, sigma, drift, lam, alpha_plus, alpha_minus, beta_plus, beta_minus, theta]``
with ``kind`` 0 for Brownian and 1 for the jump OU family.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ._accel import USE_NUMBA, compile_kernel

# relative width below which (exp(s*d) - 1)/s switches to its Taylor series
SERIES_CUTOFF = 1e-8


# ---------------------------------------------------------------------------
# numpy versions


def _cexpm1_np(w):
    a = w.real
    b = w.imag
    half = np.sin(0.5 * b)
    return (np.expm1(a) * np.cos(b) - 2.0 * half * half) + 1j * np.exp(a) * np.sin(b)


def _exponent_split_np(z, t, x0, p):
    """Split ``phi_t(z) + psi_t(z) x0`` into its linear and non-linear parts."""
    kind, sigma, drift, lam, ap, am, bp, bm, theta = p
    if kind == 0.0:
        return z * (x0 + drift * t), 0.5 * sigma * sigma * z * z * t
    decay = math.exp(-lam * t)
    omd = -math.expm1(-lam * t)
    lin = z * (decay * x0 + theta * omd)
    nonlin = np.zeros_like(z)
    if sigma > 0.0:
        nonlin = nonlin + sigma * sigma * z * z * (-math.expm1(-2.0 * lam * t)) / (4.0 * lam)
    if bp > 0.0:
        nonlin = nonlin + bp * np.log1p(z * omd / (ap - z))
    if bm > 0.0:
        nonlin = nonlin + bm * np.log1p(-z * omd / (am + z))
    return lin, nonlin


def _box_transform_np(z, coef, v, k1, k2):
    width = k2 - k1
    acc = np.zeros_like(z)
    for c, vj in zip(coef, v):
        if c == 0.0 or vj == 0.0:
            continue
        s = vj - z
        sd = s * width
        small = np.abs(sd) < SERIES_CUTOFF
        safe_s = np.where(small, 1.0, s)
        quot = np.where(small, width * (1.0 + 0.5 * sd + sd * sd / 6.0), _cexpm1_np(sd) / safe_s)
        acc = acc + c * vj * np.exp(s * k1) * quot
    return acc / z


def _log1p_minus_id_np(w):
    # log(1 + w) - w without cancellation
    small = np.abs(w) < 1e-3
    u = 1.0 + w
    safe_u = np.where(u == 1.0, 2.0, u)
    big = np.where(u == 1.0, w, np.log(safe_u) * w / (safe_u - 1.0)) - w
    ser = w * w * (-0.5 + w * (1.0 / 3.0 + w * (-0.25 + 0.2 * w)))
    return np.where(small, ser, big)


def _expm1_minus_id_np(g):
    small = np.abs(g) < 1e-3
    ser = g * g * (0.5 + g * (1.0 / 6.0 + g * (1.0 / 24.0 + g / 120.0)))
    return np.where(small, ser, _cexpm1_np(g) - g)


def _jump_remainder_np(z, t, p):
    """Normalised mgf of the pure-jump OU law after removing its atom and first-order densities.

    With ``q = e^{lam t} - 1`` and ``w+- = alpha+- q / (alpha+- -+ z)`` the law's
    mgf is ``atom_p e^{z loc} exp(g)``, ``g = sum beta log1p(w)``; this returns
    ``exp(g) - 1 - sum beta w``.
    """
    _, _, _, lam, ap, am, bp, bm, _ = p
    q = math.expm1(lam * t)
    wp = ap * q / (ap - z)
    wm = am * q / (am + z)
    lp = _log1p_minus_id_np(wp)
    lm = _log1p_minus_id_np(wm)
    g = bp * (lp + wp) + bm * (lm + wm)
    return _expm1_minus_id_np(g) + bp * lp + bm * lm


def integrand_numpy(omega, R, t, x0, p, atom_p, atom_loc, coef, v, k1, k2):
    """``Re(mgf(R + i w) * fhat(w - i R))`` on an array of ``w``.

    When ``atom_p > 0`` the law is a pure-jump OU law: its point mass
    ``atom_p`` at ``atom_loc`` and the first-order jump densities are removed
    from the moment generating function (they are added back analytically, see
    ``fourier.singular_part``), which makes the remainder decay like ``w^-2``.
    """
    z = R + 1j * np.asarray(omega, dtype=np.float64)
    lin, nonlin = _exponent_split_np(z, t, x0, p)
    if atom_p > 0.0:
        mgf = atom_p * np.exp(z * atom_loc) * _jump_remainder_np(z, t, p)
    else:
        mgf = np.exp(lin + nonlin)
    return (mgf * _box_transform_np(z, coef, v, k1, k2)).real


def positive_part_numpy(x, coef, v):
    """``max(sum_j C_j exp(v_j x), 0)`` elementwise."""
    x = np.asarray(x, dtype=np.float64)
    acc = np.zeros_like(x)
    for c, vj in zip(coef, v):
        acc += c * np.exp(vj * x)
    return np.maximum(acc, 0.0)


def sum_by_path_numpy(counts, values):
    """Sum consecutive runs of ``values`` whose lengths are ``counts``."""
    owner = np.repeat(np.arange(counts.size), counts)
    return np.bincount(owner, weights=values, minlength=counts.size)


# ---------------------------------------------------------------------------
# scalar-loop versions, compiled by numba


def _cexpm1_scalar(w):
    a = w.real
    b = w.imag
    half = math.sin(0.5 * b)
    return complex(math.expm1(a) * math.cos(b) - 2.0 * half * half, math.exp(a) * math.sin(b))


_cexpm1_jit = compile_kernel(_cexpm1_scalar)


def _log1p_minus_id_scalar(w):
    if abs(w) < 1e-3:
        return w * w * (-0.5 + w * (1.0 / 3.0 + w * (-0.25 + 0.2 * w)))
    u = 1.0 + w
    return cmath.log(u) * w / (u - 1.0) - w


def _expm1_minus_id_scalar(g):
    if abs(g) < 1e-3:
        return g * g * (0.5 + g * (1.0 / 6.0 + g * (1.0 / 24.0 + g / 120.0)))
    return cmath.exp(g) - 1.0 - g


_log1p_minus_id_jit = compile_kernel(_log1p_minus_id_scalar)
_expm1_minus_id_jit = compile_kernel(_expm1_minus_id_scalar)


def _integrand_loop(omega, R, t, x0, p, atom_p, atom_loc, coef, v, k1, k2):
    kind = p[0]
    sigma = p[1]
    drift = p[2]
    lam = p[3]
    ap = p[4]
    am = p[5]
    bp = p[6]
    bm = p[7]
    theta = p[8]
    decay = math.exp(-lam * t)
    omd = -math.expm1(-lam * t)
    cont = 0.0
    if kind != 0.0 and sigma > 0.0:
        cont = sigma * sigma * (-math.expm1(-2.0 * lam * t)) / (4.0 * lam)
    q = math.expm1(lam * t)
    width = k2 - k1
    n = omega.size
    out = np.empty(n)
    for i in range(n):
        z = complex(R, omega[i])
        if kind == 0.0:
            lin = z * (x0 + drift * t)
            nonlin = 0.5 * sigma * sigma * z * z * t
        else:
            lin = z * (decay * x0 + theta * omd)
            nonlin = cont * z * z
            if bp > 0.0:
                nonlin += bp * cmath.log(1.0 + z * omd / (ap - z))
            if bm > 0.0:
                nonlin += bm * cmath.log(1.0 - z * omd / (am + z))
        if atom_p > 0.0:
            wp = ap * q / (ap - z)
            wm = am * q / (am + z)
            lp = _log1p_minus_id_jit(wp)
            lm = _log1p_minus_id_jit(wm)
            g = bp * (lp + wp) + bm * (lm + wm)
            rem = _expm1_minus_id_jit(g) + bp * lp + bm * lm
            mgf = atom_p * cmath.exp(z * atom_loc) * rem
        else:
            mgf = cmath.exp(lin + nonlin)
        acc = 0j
        for j in range(coef.size):
            c = coef[j]
            vj = v[j]
            if c == 0.0 or vj == 0.0:
                continue
            s = vj - z
            sd = s * width
            if abs(sd) < SERIES_CUTOFF:
                quot = width * (1.0 + 0.5 * sd + sd * sd / 6.0)
            else:
                quot = _cexpm1_jit(sd) / s
            acc += c * vj * cmath.exp(s * k1) * quot
        out[i] = (mgf * (acc / z)).real
    return out


def _positive_part_loop(x, coef, v):
    n = x.size
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for j in range(coef.size):
            acc += coef[j] * math.exp(v[j] * x[i])
        out[i] = acc if acc > 0.0 else 0.0
    return out


def _sum_by_path_loop(counts, values):
    out = np.zeros(counts.size)
    pos = 0
    for i in range(counts.size):
        acc = 0.0
        for _ in range(counts[i]):
            acc += values[pos]
            pos += 1
        out[i] = acc
    return out


integrand_jit = compile_kernel(_integrand_loop)
positive_part_jit = compile_kernel(_positive_part_loop)
sum_by_path_jit = compile_kernel(_sum_by_path_loop)


# ---------------------------------------------------------------------------
# dispatch


def inversion_integrand(omega, R, t, x0, p, atom_p, atom_loc, coef, v, k1, k2):
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    if USE_NUMBA:
        return integrand_jit(omega, float(R), float(t), float(x0), p, float(atom_p),
                             float(atom_loc), coef, v, float(k1), float(k2))
    return integrand_numpy(omega, R, t, x0, p, atom_p, atom_loc, coef, v, k1, k2)


def positive_part(x, coef, v):
    x = np.ascontiguousarray(x, dtype=np.float64)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    if USE_NUMBA:
        return positive_part_jit(x, coef, v)
    return positive_part_numpy(x, coef, v)


def sum_by_path(counts, values):
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if USE_NUMBA:
        return sum_by_path_jit(counts, values)
    return sum_by_path_numpy(counts, values)
