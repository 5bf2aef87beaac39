"""Primal-dual interior-point method on the homogeneous self-dual embedding.

The embedding couples the primal/dual pair through (x, y, z, s, tau, kappa):

    A'y + G'z + c*tau            = 0
    A x          - b*tau         = 0
    G x + s      - h*tau         = 0        (h = 0 in this package)
    c'x + b'y + h'z + kappa      = 0
    s in Kbar, z in Kbar*, tau >= 0, kappa >= 0,

so optimality (tau > 0), primal infeasibility and dual infeasibility
(tau -> 0, kappa > 0) are all recovered from one sequence of iterates and
infeasible problems terminate with an explicit improving ray instead of a
timeout.  Search directions come from a Mehrotra-type predictor-corrector:
Nesterov-Todd scaling diag(s/z) on nonnegative blocks, the barrier-Hessian
linearization  dz + mu*H(s)*ds = -(z + sigma*mu*grad F(s))  on exponential
blocks, and a 0.98 fraction-to-boundary rule with a centrality safeguard.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .cones import (
    EXP_INIT,
    exp_dual_interior,
    exp_dual_shadow,
    exp_grad_hess,
    exp_primal_interior,
)
from .presolve import SolverData, convert
from .program import ConicProgram, ConicSolution, SolverOptions, Status

_FRACTION_TO_BOUNDARY = 0.98
_DENSE_CUTOFF = 320


class _KKT:
    """Factorization of the quasi-definite 3x3 block system

        [ rI   A'      G'    ]
        [ A   -rI      0     ]
        [ G    0   -(V + rI) ]

    with iterative refinement against the unregularized matrix.
    """

    def __init__(self, A, G, reg: float, refine: int):
        self.A = A
        self.G = G
        self.p, self.n = A.shape
        self.m = G.shape[0]
        self.dim = self.n + self.p + self.m
        self.reg = reg
        self.refine = refine
        self.dense = self.dim <= _DENSE_CUTOFF
        self._At = sp.csr_matrix(A.T)
        self._Gt = sp.csr_matrix(G.T)

    def factor(self, V_diag: np.ndarray, V_blocks: np.ndarray, m_l: int):
        """V_diag: nonneg part (m_l,); V_blocks: exp part (n_exp, 3, 3)."""
        n, p, m = self.n, self.p, self.m
        r = self.reg
        n_exp = V_blocks.shape[0]
        rows = [np.arange(m_l)]
        cols = [np.arange(m_l)]
        vals = [V_diag]
        if n_exp:
            base = m_l + 3 * np.arange(n_exp)
            idx = np.arange(3)
            rows.append(
                (base[:, None, None] + idx[None, :, None] + 0 * idx[None, None, :]).ravel()
            )
            cols.append(
                (base[:, None, None] + 0 * idx[None, :, None] + idx[None, None, :]).ravel()
            )
            vals.append(V_blocks.ravel())
        Vm = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(m, m),
        )
        K = sp.bmat(
            [
                [sp.eye(n) * r, self._At, self._Gt],
                [self.A, -sp.eye(p) * r, None],
                [self.G, None, -(Vm + sp.eye(m) * r)],
            ],
            format="csc",
        )
        self._K = K
        self._Vm = Vm
        if self.dense:
            self._lu = scipy.linalg.lu_factor(K.toarray())
        else:
            self._lu = spla.splu(K, permc_spec="COLAMD")
        # signature of the regularization shift, for refinement
        self._Jsign = np.concatenate(
            [np.ones(n), -np.ones(p), -np.ones(m)]
        )

    def _solve_factored(self, rhs: np.ndarray) -> np.ndarray:
        if self.dense:
            return scipy.linalg.lu_solve(self._lu, rhs)
        return self._lu.solve(rhs)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        u = self._solve_factored(rhs)
        for _ in range(self.refine):
            # residual w.r.t. the unregularized matrix
            resid = rhs - (self._K @ u - self.reg * self._Jsign * u)
            u = u + self._solve_factored(resid)
        return u


@dataclass
class _Iterate:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    s: np.ndarray
    tau: float
    kappa: float


def _initial_iterate(data: SolverData) -> _Iterate:
    n = data.c.shape[0]
    p = data.b.shape[0]
    m_l, n_exp = data.m_l, data.n_exp
    m = m_l + 3 * n_exp
    s = np.empty(m)
    z = np.empty(m)
    s[:m_l] = 1.0
    z[:m_l] = 1.0
    for k in range(n_exp):
        sl = slice(m_l + 3 * k, m_l + 3 * k + 3)
        s[sl] = EXP_INIT
        z[sl] = EXP_INIT
    return _Iterate(
        x=np.zeros(n), y=np.zeros(p), z=z, s=s, tau=1.0, kappa=1.0
    )


def _exp_slices(m_l: int, n_exp: int):
    return [slice(m_l + 3 * k, m_l + 3 * k + 3) for k in range(n_exp)]


def _cones_ok(s, z, m_l, n_exp) -> bool:
    if np.any(s[:m_l] <= 0.0) or np.any(z[:m_l] <= 0.0):
        return False
    if n_exp:
        se = s[m_l:].reshape(n_exp, 3)
        ze = z[m_l:].reshape(n_exp, 3)
        if not exp_primal_interior(se):
            return False
        if not exp_dual_interior(ze):
            return False
    return True


def _mu_of(s, z, tau, kappa, nu_bar) -> float:
    return (s @ z + tau * kappa) / (nu_bar + 1.0)


def _exp_scaling(se, ze, g_e, H_e) -> np.ndarray:
    """Primal-dual scaling blocks W with W s = z and W s~ = z~, where
    s~ = -grad F*(z) and z~ = -grad F(s) are the shadow iterates.

    W restricts to the secant map on span{s, s~} (through the 2x2 Gram
    system) and to the local barrier Hessian on the orthogonal complement;
    blocks that are numerically on the central path (where the Gram matrix
    degenerates) fall back to  (s'z/3) * hess F(s), which already satisfies
    both secant equations there.
    """
    k = se.shape[0]
    zt = -g_e
    st = exp_dual_shadow(ze)
    W = np.empty((k, 3, 3))
    for i in range(k):
        s, z, s2, z2 = se[i], ze[i], st[i], zt[i]
        theta = (s @ z) / 3.0
        Hloc = theta * H_e[i]
        m01 = 0.5 * ((z @ s2) + (z2 @ s))
        m00 = s @ z
        m11 = s2 @ z2
        det = m00 * m11 - m01 * m01
        if not np.isfinite(det) or det <= 1e-10 * max(m00 * m11, 1e-300):
            W[i] = Hloc
            continue
        t = np.cross(s, s2)
        nt = np.linalg.norm(t)
        if nt <= 1e-10 * (np.linalg.norm(s) * np.linalg.norm(s2) + 1e-300):
            W[i] = Hloc
            continue
        t = t / nt
        rho = t @ (Hloc @ t)
        Z2 = np.stack([z, z2], axis=1)
        Minv = np.array([[m11, -m01], [-m01, m00]]) / det
        Wi = Z2 @ Minv @ Z2.T + rho * np.outer(t, t)
        W[i] = Wi if np.all(np.isfinite(Wi)) else Hloc
    return W


def _invert_scaling(M: np.ndarray) -> np.ndarray | None:
    """Batched 3x3 inverse with a diagonal-jitter retry for near-singular
    blocks (these appear when an exponential cone becomes nearly active)."""
    try:
        out = np.linalg.inv(M)
        if np.all(np.isfinite(out)):
            return out
    except np.linalg.LinAlgError:
        pass
    M = M.copy()
    diag_max = np.maximum(
        np.abs(M[:, [0, 1, 2], [0, 1, 2]]).max(axis=1), 1e-300
    )
    for k in range(M.shape[0]):
        M[k] += np.eye(3) * (1e-13 * diag_max[k])
    try:
        out = np.linalg.inv(M)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(out)):
        return None
    return out


def solve(prog: ConicProgram, opts: SolverOptions | None = None) -> ConicSolution:
    """Solve a ConicProgram; never raises on poorly scaled data."""
    opts = opts or SolverOptions()
    data = convert(prog, equilibrate_iters=opts.equilibrate_iters)
    if data.trivial is not None:
        return data.trivial
    try:
        with np.errstate(all="ignore"):
            sol = _solve_hsd(data, opts)
    except (FloatingPointError, np.linalg.LinAlgError, RuntimeError) as exc:
        sol = ConicSolution(
            status=Status.NUMERICAL_FAILURE, message=f"linear algebra failure: {exc}"
        )
    return _expand_solution(prog, data, sol)


def _solve_hsd(data: SolverData, opts: SolverOptions) -> ConicSolution:
    A, G, b, c = data.A, data.G, data.b, data.c
    p, n = A.shape
    m_l, n_exp = data.m_l, data.n_exp
    m = m_l + 3 * n_exp
    nu_bar = m_l + 3 * n_exp
    exp_sl = _exp_slices(m_l, n_exp)

    it = _initial_iterate(data)
    kkt = _KKT(A, G, opts.reg, opts.refine_steps)
    w_vec = np.concatenate([c, -b, np.zeros(m)])
    d_vec = np.concatenate([c, b, np.zeros(m)])

    best: ConicSolution | None = None
    best_score = np.inf
    consecutive_fails = 0

    for iteration in range(opts.max_iters):
        x, y, z, s, tau, kappa = it.x, it.y, it.z, it.s, it.tau, it.kappa
        mu = _mu_of(s, z, tau, kappa, nu_bar)

        rx = A.T @ y + G.T @ z + c * tau
        ry = A @ x - b * tau
        rz = G @ x + s
        rt = c @ x + b @ y + kappa

        sol = _check_termination(data, it, iteration, opts)
        if sol is not None:
            return sol
        if mu < 1e-14:
            return _bail(best, "complementarity floor reached", iteration)
        score = _progress_score(data, it)
        if score < best_score:
            best_score = score
            best = _candidate_solution(data, it, iteration)

        # scaling blocks
        sl_, zl_ = s[:m_l], z[:m_l]
        V_diag = sl_ / zl_
        if n_exp:
            se = s[m_l:].reshape(n_exp, 3)
            ze_cur = z[m_l:].reshape(n_exp, 3)
            g_e, H_e = exp_grad_hess(se)
            if opts.exp_scaling == "pd":
                W_blocks = _exp_scaling(se, ze_cur, g_e, H_e)
            else:
                W_blocks = mu * H_e
            V_blocks = _invert_scaling(W_blocks)
            if V_blocks is None:
                return _bail(best, "degenerate exponential-cone scaling", iteration)
        else:
            g_e = np.zeros((0, 3))
            V_blocks = np.zeros((0, 3, 3))
        if not (np.all(np.isfinite(V_diag)) and np.all(np.isfinite(V_blocks))):
            return _bail(best, "non-finite scaling matrix", iteration)
        try:
            kkt.factor(V_diag, V_blocks, m_l)
            u1 = kkt.solve(w_vec)
        except (RuntimeError, ValueError, np.linalg.LinAlgError):
            return _bail(best, "KKT factorization failed", iteration)
        if not np.all(np.isfinite(u1)):
            return _bail(best, "non-finite KKT solution", iteration)

        def direction(sigma, corr_l, corr_t):
            eta = np.empty(m)
            eta[:m_l] = sl_ + (corr_l - sigma * mu) / zl_
            if n_exp:
                psi = z[m_l:].reshape(n_exp, 3) + sigma * mu * g_e
                eta[m_l:] = np.einsum("kij,kj->ki", V_blocks, psi).ravel()
            v_kappa = kappa / tau
            eta_kappa = kappa + (corr_t - sigma * mu) / tau
            rhs = np.concatenate(
                [-(1 - sigma) * rx, -(1 - sigma) * ry, -(1 - sigma) * rz + eta]
            )
            u2 = kkt.solve(rhs)
            rhat_t = -(1 - sigma) * rt + eta_kappa
            denom = d_vec @ u1 + v_kappa
            if not np.isfinite(denom) or abs(denom) < 1e-14:
                return None
            dtau = (d_vec @ u2 - rhat_t) / denom
            sol3 = u2 - dtau * u1
            dx = sol3[:n]
            dy = sol3[n : n + p]
            dz = sol3[n + p :]
            ds = np.empty(m)
            ds[:m_l] = -V_diag * dz[:m_l] - eta[:m_l]
            if n_exp:
                ds[m_l:] = (
                    -np.einsum(
                        "kij,kj->ki", V_blocks, dz[m_l:].reshape(n_exp, 3)
                    ).ravel()
                    - eta[m_l:]
                )
            dkappa = -v_kappa * dtau - eta_kappa
            return dx, dy, dz, ds, dtau, dkappa

        def max_linear_step(dz, ds, dtau, dkappa):
            alpha = 1.0 / _FRACTION_TO_BOUNDARY
            for val, dv in ((tau, dtau), (kappa, dkappa)):
                if dv < 0:
                    alpha = min(alpha, -val / dv)
            for vals, dvs in ((sl_, ds[:m_l]), (zl_, dz[:m_l])):
                neg = dvs < 0
                if neg.any():
                    alpha = min(alpha, float(np.min(-vals[neg] / dvs[neg])))
            return alpha

        reject = {"taukappa": 0, "cone": 0, "mu": 0, "prox": 0}

        def trial(alpha, d, require_centrality=True):
            dx, dy, dz, ds, dtau, dkappa = d
            s_t = s + alpha * ds
            z_t = z + alpha * dz
            tau_t = tau + alpha * dtau
            kappa_t = kappa + alpha * dkappa
            if tau_t <= 0 or kappa_t <= 0:
                reject["taukappa"] += 1
                return None
            if not _cones_ok(s_t, z_t, m_l, n_exp):
                reject["cone"] += 1
                return None
            mu_t = _mu_of(s_t, z_t, tau_t, kappa_t, nu_bar)
            if mu_t <= 0:
                reject["mu"] += 1
                return None
            # Proximity safeguards are only meaningful away from the
            # solution; near degenerate optima strict complementarity can
            # fail and per-block floors would choke the steps.
            if require_centrality and mu_t > 1e-6:
                if tau_t * kappa_t < 1e-6 * mu_t:
                    return None
                if n_exp:
                    se_t = s_t[m_l:].reshape(n_exp, 3)
                    ze_t = z_t[m_l:].reshape(n_exp, 3)
                    g_t, H_t = exp_grad_hess(se_t)
                    psi_t = ze_t + mu_t * g_t
                    try:
                        hinv_psi = np.linalg.solve(H_t, psi_t[:, :, None])[:, :, 0]
                    except np.linalg.LinAlgError:
                        return None
                    prox = np.einsum("ki,ki->k", psi_t, hinv_psi)
                    if not np.all(np.isfinite(prox)):
                        return None
                    if np.any(prox < 0) or np.any(
                        np.sqrt(np.maximum(prox, 0.0)) > 10.0 * mu_t
                    ):
                        return None
            return mu_t

        d_aff = direction(0.0, 0.0, 0.0)
        if d_aff is None:
            return _bail(best, "singular reduced system", iteration)

        alpha_aff = min(1.0, _FRACTION_TO_BOUNDARY * max_linear_step(
            d_aff[2], d_aff[3], d_aff[4], d_aff[5]
        ))
        while alpha_aff > 1e-10:
            if trial(alpha_aff, d_aff, require_centrality=False) is not None:
                break
            alpha_aff *= 0.8
        mu_aff = _mu_of(
            s + alpha_aff * d_aff[3],
            z + alpha_aff * d_aff[2],
            tau + alpha_aff * d_aff[4],
            kappa + alpha_aff * d_aff[5],
            nu_bar,
        )
        sigma = float(np.clip((max(mu_aff, 0.0) / mu) ** 3, 1e-8, 0.99999))

        corr_l = d_aff[3][:m_l] * d_aff[2][:m_l]
        corr_t = d_aff[4] * d_aff[5]
        d_comb = direction(sigma, corr_l, corr_t)
        if d_comb is None:
            return _bail(best, "singular reduced system", iteration)

        alpha = min(1.0, _FRACTION_TO_BOUNDARY * max_linear_step(
            d_comb[2], d_comb[3], d_comb[4], d_comb[5]
        ))
        accepted = None
        while alpha > opts.min_step:
            if trial(alpha, d_comb) is not None:
                accepted = (alpha, d_comb)
                break
            alpha *= 0.8
        if accepted is None:
            # fall back to a pure centering step
            d_cent = direction(1.0, 0.0, 0.0)
            if d_cent is not None:
                alpha = min(1.0, _FRACTION_TO_BOUNDARY * max_linear_step(
                    d_cent[2], d_cent[3], d_cent[4], d_cent[5]
                ))
                while alpha > opts.min_step:
                    if trial(alpha, d_cent) is not None:
                        accepted = (alpha, d_cent)
                        break
                    alpha *= 0.8
        if accepted is None:
            consecutive_fails += 1
            if consecutive_fails >= 2:
                return _bail(best, "no acceptable step length", iteration)
            continue
        consecutive_fails = 0

        alpha, d = accepted
        dx, dy, dz, ds, dtau, dkappa = d
        it = _Iterate(
            x=x + alpha * dx,
            y=y + alpha * dy,
            z=z + alpha * dz,
            s=s + alpha * ds,
            tau=tau + alpha * dtau,
            kappa=kappa + alpha * dkappa,
        )
        if opts.verbose:
            mu_new = _mu_of(it.s, it.z, it.tau, it.kappa, nu_bar)
            print(
                f"iter {iteration:3d}  mu={mu_new:9.2e}  alpha={alpha:6.4f}  "
                f"sigma={sigma:6.4f}  tau={it.tau:9.2e}  kappa={it.kappa:9.2e}"
            )

    sol = _check_termination(data, it, opts.max_iters, opts)
    if sol is not None:
        return sol
    return _bail(best, "iteration limit reached", opts.max_iters, Status.MAX_ITERATIONS)


def _unscale(data: SolverData, it: _Iterate):
    """Map scaled HSD iterate to tau-normalized unscaled primal/dual point."""
    tau = it.tau
    x_u = data.sigma_b * (data.dc * it.x) / tau
    s_u = data.sigma_b * (it.s / data.drg) / tau
    y_u = data.sigma_c * (data.dra * it.y) / tau
    z_u = data.sigma_c * (data.drg * it.z) / tau
    return x_u, y_u, z_u, s_u


def _unscale_rays(data: SolverData, it: _Iterate):
    x_r = data.sigma_b * (data.dc * it.x)
    y_r = data.sigma_c * (data.dra * it.y)
    z_r = data.sigma_c * (data.drg * it.z)
    s_r = data.sigma_b * (it.s / data.drg)
    return x_r, y_r, z_r, s_r


def _residuals_unscaled(data: SolverData, x_u, y_u, z_u, s_u):
    b0, c0 = data.b0, data.c0
    pres_eq = np.max(np.abs(data.A0 @ x_u - b0), initial=0.0) / (
        1.0 + np.max(np.abs(b0), initial=0.0)
    )
    pres_cone = np.max(np.abs(data.G0 @ x_u + s_u), initial=0.0)
    pres = max(pres_eq, pres_cone)
    dres = np.max(np.abs(data.A0.T @ y_u + data.G0.T @ z_u + c0), initial=0.0) / (
        1.0 + np.max(np.abs(c0), initial=0.0)
    )
    pobj = float(c0 @ x_u)
    dobj = float(-(b0 @ y_u))
    gap = float(s_u @ z_u)
    return pres, dres, pobj, dobj, gap


def _cone_violation_primal(data: SolverData, x_u) -> float:
    """Violation of cone membership by the cone coordinates of x itself."""
    m_l, n_exp = data.m_l, data.n_exp
    v = -(data.G0 @ x_u)  # cone-ordered copy of the coned coordinates
    viol = float(np.max(-v[:m_l], initial=0.0))
    if n_exp:
        from .cones import exp_primal_violation

        for k in range(n_exp):
            t = v[m_l + 3 * k : m_l + 3 * k + 3]
            viol = max(viol, exp_primal_violation(t[0], t[1], t[2]))
    return viol


def _progress_score(data: SolverData, it: _Iterate) -> float:
    if it.tau <= 0:
        return np.inf
    x_u, y_u, z_u, s_u = _unscale(data, it)
    pres, dres, pobj, dobj, gap = _residuals_unscaled(data, x_u, y_u, z_u, s_u)
    relgap = gap / (1.0 + max(abs(pobj), abs(dobj)))
    return max(pres, dres, relgap)


def _spread_cone_dual(data: SolverData, z_cone: np.ndarray) -> np.ndarray:
    """Map a cone-row-ordered dual vector onto full variable coordinates."""
    s_full = np.zeros(data.num_vars_full)
    if data.cone_var_index.size:
        s_full[data.cone_var_index] = z_cone
    return s_full


def _candidate_solution(data: SolverData, it: _Iterate, iteration: int):
    x_u, y_u, z_u, s_u = _unscale(data, it)
    pres, dres, pobj, dobj, gap = _residuals_unscaled(data, x_u, y_u, z_u, s_u)
    return ConicSolution(
        status=Status.MAX_ITERATIONS,
        z=x_u,
        y=-y_u,
        s=_spread_cone_dual(data, z_u),
        obj_primal=pobj,
        obj_dual=dobj,
        gap=gap,
        rel_gap=gap / (1.0 + max(abs(pobj), abs(dobj))),
        primal_residual=pres,
        dual_residual=dres,
        iterations=iteration,
    )


def _check_termination(
    data: SolverData, it: _Iterate, iteration: int, opts: SolverOptions
) -> ConicSolution | None:
    ft, gt = opts.feas_tol, opts.gap_tol

    if it.tau > 1e-12:
        x_u, y_u, z_u, s_u = _unscale(data, it)
        pres, dres, pobj, dobj, gap = _residuals_unscaled(
            data, x_u, y_u, z_u, s_u
        )
        relgap = gap / (1.0 + max(abs(pobj), abs(dobj)))
        objgap = abs(pobj - dobj) / (1.0 + max(abs(pobj), abs(dobj)))
        cone_viol = _cone_violation_primal(data, x_u)
        if (
            pres <= ft
            and dres <= ft
            and cone_viol <= ft
            and min(relgap, objgap) <= gt
        ):
            return ConicSolution(
                status=Status.OPTIMAL,
                z=x_u,
                y=-y_u,
                s=_spread_cone_dual(data, z_u),
                obj_primal=pobj,
                obj_dual=dobj,
                gap=gap,
                rel_gap=relgap,
                primal_residual=pres,
                dual_residual=dres,
                iterations=iteration,
            )

    # Farkas certificates are valid whenever their residuals vanish.
    x_r, y_r, z_r, s_r = _unscale_rays(data, it)
    b0, c0 = data.b0, data.c0
    bnorm = max(1.0, float(np.max(np.abs(b0), initial=0.0)))
    cnorm = max(1.0, float(np.max(np.abs(c0), initial=0.0)))

    q = float(-(b0 @ y_r))
    if q > 0:
        res = np.max(np.abs(data.A0.T @ y_r + data.G0.T @ z_r), initial=0.0)
        if res * bnorm <= opts.infeas_tol * q:
            return ConicSolution(
                status=Status.PRIMAL_INFEASIBLE,
                y=-y_r / q,
                s=_spread_cone_dual(data, z_r / q),
                iterations=iteration,
                message="primal infeasibility certificate found",
            )

    dcost = float(-(c0 @ x_r))
    if dcost > 0:
        res = max(
            np.max(np.abs(data.A0 @ x_r), initial=0.0),
            np.max(np.abs(data.G0 @ x_r + s_r), initial=0.0),
        )
        if res * cnorm <= opts.infeas_tol * dcost:
            return ConicSolution(
                status=Status.DUAL_INFEASIBLE,
                z=x_r / dcost,
                iterations=iteration,
                message="dual infeasibility certificate (unbounded ray) found",
            )
    return None


def _bail(
    best: ConicSolution | None,
    message: str,
    iteration: int,
    status: Status = Status.NUMERICAL_FAILURE,
) -> ConicSolution:
    if best is not None:
        best.status = status
        best.message = message
        best.iterations = iteration
        return best
    return ConicSolution(status=status, message=message, iterations=iteration)


def _expand_solution(
    prog: ConicProgram, data: SolverData, sol: ConicSolution
) -> ConicSolution:
    """Re-insert variables and rows removed by presolve."""
    if sol.z is not None and sol.z.shape[0] != prog.num_vars:
        z_full = np.zeros(prog.num_vars)
        z_full[data.kept_cols] = sol.z
        sol.z = z_full
    if sol.y is not None and sol.y.shape[0] != prog.num_rows:
        y_full = np.zeros(prog.num_rows)
        y_full[data.kept_rows] = sol.y
        sol.y = y_full
    if sol.status == Status.OPTIMAL:
        sol.obj_primal += prog.objective_offset
        sol.obj_dual += prog.objective_offset
    return sol
