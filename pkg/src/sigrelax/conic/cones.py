"""Exponential-cone primitives: membership tests, barrier derivatives.

The (primal) exponential cone is

    Kexp = cl{ (u, v, w) : v > 0, w > 0, v*log(w/v) >= u },

i.e. w >= v*exp(u/v) for v > 0, with the closure ray {u <= 0, v = 0, w >= 0}.
Its dual under the standard inner product is

    Kexp* = cl{ (p, q, r) : p < 0, r > 0, q >= p - p*log(-p/r) },

with the closure ray {p = 0, q >= 0, r >= 0}.  A scalar relative-entropy
inequality nu*log(nu/lam) <= t is exactly (-t, nu, lam) in Kexp.
"""

from __future__ import annotations

import numpy as np

#: Point s* on the exponential cone's central ray with grad F(s*) = -s*;
#: used to initialize interior-point iterates (then s0 = z0 = s*).
EXP_INIT = np.array(
    [-0.8278383990656786, 0.8051020015847954, 1.290927709856958]
)


def exp_primal_violation(u: float, v: float, w: float) -> float:
    """Amount by which (u, v, w) fails the primal exp-cone inequalities.

    Zero (or negative) means the point is a member; the measure is exact on
    the closure rays.
    """
    if v > 0.0 and w > 0.0:
        return max(u - v * np.log(w / v), 0.0)
    viol = max(-v, -w, 0.0)
    if v <= 0.0:
        viol = max(viol, u)
    return viol


def exp_dual_violation(p: float, q: float, r: float) -> float:
    """Violation measure for membership of (p, q, r) in the dual cone."""
    if p < 0.0 and r > 0.0:
        return max(p - p * np.log(-p / r) - q, 0.0)
    viol = max(p, -r, 0.0)
    if p >= 0.0:
        viol = max(viol, -q)
    return viol


def exp_primal_interior(t: np.ndarray, margin: float = 0.0) -> bool:
    """Strict primal membership for an array of triples, shape (k, 3)."""
    u, v, w = t[:, 0], t[:, 1], t[:, 2]
    if np.any(v <= margin) or np.any(w <= margin):
        return False
    return bool(np.all(v * np.log(w / v) - u > margin))


def exp_dual_interior(t: np.ndarray, margin: float = 0.0) -> bool:
    """Strict dual membership for an array of triples, shape (k, 3)."""
    p, q, r = t[:, 0], t[:, 1], t[:, 2]
    if np.any(p >= -margin) or np.any(r <= margin):
        return False
    return bool(np.all(q - p + p * np.log(-p / r) > margin))


def exp_grad_hess(t: np.ndarray):
    """Gradient and Hessian of the exp-cone barrier, batched over triples.

    The barrier is F(u,v,w) = -log(v*log(w/v) - u) - log(v) - log(w) with
    parameter 3.  ``t`` has shape (k, 3) and must be strictly interior.
    Returns (grad (k,3), hess (k,3,3)).
    """
    u, v, w = t[:, 0], t[:, 1], t[:, 2]
    lvw = np.log(w / v)
    rho = v * lvw - u
    g = np.empty_like(t)
    g[:, 0] = 1.0 / rho
    g[:, 1] = -(lvw - 1.0) / rho - 1.0 / v
    g[:, 2] = -v / (rho * w) - 1.0 / w

    # grad rho = (-1, lvw - 1, v/w)
    k = t.shape[0]
    dr = np.empty((k, 3))
    dr[:, 0] = -1.0
    dr[:, 1] = lvw - 1.0
    dr[:, 2] = v / w

    H = dr[:, :, None] * dr[:, None, :] / rho[:, None, None] ** 2
    H[:, 1, 1] += 1.0 / (rho * v) + 1.0 / v**2
    H[:, 1, 2] += -1.0 / (rho * w)
    H[:, 2, 1] += -1.0 / (rho * w)
    H[:, 2, 2] += v / (rho * w**2) + 1.0 / w**2
    return g, H


def exp_dual_shadow(Z: np.ndarray) -> np.ndarray:
    """For strictly interior dual triples z, the point s = -grad F*(z),
    i.e. the unique s in int Kexp with grad F(s) = -z.  Batched, shape (k,3).

    Writing s = (u, v, w) and gbar = log(w/v), the stationarity system
    reduces to v = 1/(q + p*(gbar-1)), w = (1 - p*v)/r, u = v*gbar + 1/p,
    leaving one scalar equation phi(gbar) = log(w/v) - gbar = 0, solved by
    bisection (phi decreases from +inf to a negative limit on the
    admissible interval).
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    p, q, r = Z[:, 0], Z[:, 1], Z[:, 2]

    def phi(g):
        denom = q + p * (g - 1.0)
        v = 1.0 / denom
        w = (1.0 - p * v) / r
        return np.log(w) - np.log(v) - g

    gmax = 1.0 - q / p
    span = 1.0 + np.abs(gmax)
    hi = gmax - 1e-12 * span
    # walk hi toward gmax while phi(hi) is still positive (rare)
    for _ in range(60):
        bad = phi(hi) > 0.0
        if not bad.any():
            break
        hi = np.where(bad, gmax - (gmax - hi) * 1e-3, hi)
    lo = gmax - span
    step = span.copy()
    for _ in range(80):
        bad = phi(lo) < 0.0
        if not bad.any():
            break
        step = np.where(bad, step * 2.0, step)
        lo = np.where(bad, lo - step, lo)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        pos = phi(mid) > 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    g = 0.5 * (lo + hi)
    v = 1.0 / (q + p * (g - 1.0))
    w = (1.0 - p * v) / r
    u = v * g + 1.0 / p
    return np.stack([u, v, w], axis=1)


def relative_entropy(nu, lam) -> float:
    """D(nu, lam) = sum nu_j log(nu_j / lam_j) with the 0-limit conventions.

    Returns +inf when some nu_j > 0 has lam_j = 0; coordinates with
    nu_j = 0 contribute 0 regardless of lam_j.
    """
    nu = np.asarray(nu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if np.any(nu < 0) or np.any(lam < 0):
        return np.inf
    total = 0.0
    for nj, lj in zip(nu, lam):
        if nj == 0.0:
            continue
        if lj == 0.0:
            return np.inf
        total += nj * np.log(nj / lj)
    return total
