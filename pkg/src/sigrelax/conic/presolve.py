"""Conversion of a ConicProgram to internal solver form, plus presolve.

Internal form (free variable x, slacks carry the cones):

    minimize    c' x
    subject to  A x = b,
                G x + s = 0,   s in Kbar = Nonneg^{m_l} x Exp^{n_exp},

obtained by letting x = z and materializing one slack per coned coordinate
(G is minus a selection matrix).  Presolve removes identically-zero rows and
columns (detecting the trivial infeasibility/unboundedness they encode) and
applies Ruiz row/column equilibration; scale factors for an exponential
triple's three rows are kept equal, which preserves the cone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .program import EXP, FREE, NONNEG, ConicProgram, ConicSolution, Status


@dataclass
class SolverData:
    """Scaled internal problem plus everything needed to undo the scaling."""

    # scaled data
    A: sp.csr_matrix
    G: sp.csr_matrix
    b: np.ndarray
    c: np.ndarray
    m_l: int
    n_exp: int
    # unscaled (post row/column removal) data for residual checks
    A0: sp.csr_matrix
    G0: sp.csr_matrix
    b0: np.ndarray
    c0: np.ndarray
    # scaling factors
    dra: np.ndarray
    drg: np.ndarray
    dc: np.ndarray
    sigma_b: float
    sigma_c: float
    # bookkeeping for reassembly
    num_vars_full: int
    num_rows_full: int
    kept_cols: np.ndarray
    kept_rows: np.ndarray
    cone_var_index: np.ndarray  # for each G row, the original z coordinate
    trivial: ConicSolution | None = None


def _cone_rows(prog: ConicProgram, kept_cols_pos: dict[int, int]):
    """G-row layout: all nonneg coordinates first, then exp triples."""
    kinds = prog.variable_kinds()
    nonneg_vars = [j for j in range(prog.num_vars) if kinds[j] == NONNEG]
    triples = prog.exp_triples()
    order = nonneg_vars + [v for t in triples for v in t]
    rows, cols, vals = [], [], []
    for r, var in enumerate(order):
        rows.append(r)
        cols.append(kept_cols_pos[var])
        vals.append(-1.0)
    m = len(order)
    G = sp.csr_matrix(
        (vals, (rows, cols)), shape=(m, len(kept_cols_pos)), dtype=float
    )
    return G, len(nonneg_vars), len(triples), np.array(order, dtype=int)


def convert(prog: ConicProgram, equilibrate_iters: int = 10) -> SolverData:
    A_full = sp.csc_matrix(prog.A)
    kinds = prog.variable_kinds()

    # Empty equality rows: inconsistent ones certify primal infeasibility.
    row_nnz = np.diff(sp.csr_matrix(prog.A).indptr)
    bad = (row_nnz == 0) & (prog.b != 0.0)
    if bad.any():
        i = int(np.argmax(bad))
        y = np.zeros(prog.num_rows)
        y[i] = 1.0 if prog.b[i] > 0 else -1.0
        sol = ConicSolution(
            status=Status.PRIMAL_INFEASIBLE,
            y=y / abs(prog.b[i]),
            s=np.zeros(prog.num_vars),
            message="inconsistent empty equality row",
        )
        return SolverData(
            A=None, G=None, b=None, c=None, m_l=0, n_exp=0,
            A0=None, G0=None, b0=None, c0=None,
            dra=None, drg=None, dc=None, sigma_b=1.0, sigma_c=1.0,
            num_vars_full=prog.num_vars, num_rows_full=prog.num_rows,
            kept_cols=np.array([], dtype=int), kept_rows=np.array([], dtype=int),
            cone_var_index=np.array([], dtype=int), trivial=sol,
        )
    kept_rows = np.flatnonzero(row_nnz > 0)

    # Empty columns can only belong to free variables (coned coordinates
    # always meet their own G row); a free empty column with a cost is an
    # unbounded direction, otherwise the variable is fixed to zero.
    col_nnz = np.diff(A_full.indptr)
    drop_cols = []
    for j in range(prog.num_vars):
        if kinds[j] == FREE and col_nnz[j] == 0:
            if prog.c[j] != 0.0:
                ray = np.zeros(prog.num_vars)
                ray[j] = -np.sign(prog.c[j]) / abs(prog.c[j])
                sol = ConicSolution(
                    status=Status.DUAL_INFEASIBLE,
                    z=ray,
                    message="free variable with cost appears in no constraint",
                )
                return SolverData(
                    A=None, G=None, b=None, c=None, m_l=0, n_exp=0,
                    A0=None, G0=None, b0=None, c0=None,
                    dra=None, drg=None, dc=None, sigma_b=1.0, sigma_c=1.0,
                    num_vars_full=prog.num_vars, num_rows_full=prog.num_rows,
                    kept_cols=np.array([], dtype=int),
                    kept_rows=np.array([], dtype=int),
                    cone_var_index=np.array([], dtype=int), trivial=sol,
                )
            drop_cols.append(j)
    kept_cols = np.array(
        [j for j in range(prog.num_vars) if j not in set(drop_cols)], dtype=int
    )
    kept_cols_pos = {int(j): k for k, j in enumerate(kept_cols)}

    A0 = sp.csr_matrix(A_full[:, kept_cols][kept_rows, :])
    b0 = prog.b[kept_rows].copy()
    c0 = prog.c[kept_cols].copy()
    G0, m_l, n_exp, cone_var_index = _cone_rows(prog, kept_cols_pos)

    dra, drg, dc = _ruiz(A0, G0, m_l, n_exp, iters=equilibrate_iters)
    A = sp.csr_matrix(sp.diags(dra) @ A0 @ sp.diags(dc))
    G = sp.csr_matrix(sp.diags(drg) @ G0 @ sp.diags(dc))
    b = dra * b0
    c = dc * c0
    sigma_b = max(1.0, float(np.max(np.abs(b), initial=0.0)))
    sigma_c = max(1.0, float(np.max(np.abs(c), initial=0.0)))
    b = b / sigma_b
    c = c / sigma_c

    return SolverData(
        A=A, G=G, b=b, c=c, m_l=m_l, n_exp=n_exp,
        A0=A0, G0=G0, b0=b0, c0=c0,
        dra=dra, drg=drg, dc=dc, sigma_b=sigma_b, sigma_c=sigma_c,
        num_vars_full=prog.num_vars, num_rows_full=prog.num_rows,
        kept_cols=kept_cols, kept_rows=kept_rows,
        cone_var_index=cone_var_index,
    )


def _ruiz(A0, G0, m_l: int, n_exp: int, iters: int = 10):
    """Row/column equilibration; exp-triple rows share one scale factor."""
    p, n = A0.shape
    m = G0.shape[0]
    dra = np.ones(p)
    drg = np.ones(m)
    dc = np.ones(n)
    A = A0.copy()
    G = G0.copy()
    for _ in range(iters):
        M = sp.vstack([A, G], format="csr")
        Mabs = abs(M)
        rnorm = Mabs.max(axis=1).toarray().ravel()
        rnorm[rnorm == 0] = 1.0
        # one scale per exp triple
        for k in range(n_exp):
            sl = slice(p + m_l + 3 * k, p + m_l + 3 * k + 3)
            rnorm[sl] = np.exp(np.mean(np.log(rnorm[sl])))
        rs = 1.0 / np.sqrt(rnorm)
        cnorm = abs(sp.csc_matrix(M)).max(axis=0).toarray().ravel()
        cnorm[cnorm == 0] = 1.0
        cs = 1.0 / np.sqrt(cnorm)
        dra *= rs[:p]
        drg *= rs[p:]
        dc *= cs
        A = sp.csr_matrix(sp.diags(rs[:p]) @ A @ sp.diags(cs))
        G = sp.csr_matrix(sp.diags(rs[p:]) @ G @ sp.diags(cs))
    return dra, drg, dc
