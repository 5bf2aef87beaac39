"""Nonnegativity certificates from the AM/GM inequality.

A signomial with at most one negative coefficient, say

    g(x) = beta * exp(a0 . x) + sum_j c_j exp(a_j . x),     c >= 0,

is globally nonnegative exactly when some nu >= 0 balances the exponents,
sum_j a_j nu_j = (1'nu) a0, and satisfies D(nu, e*c) <= beta.  Summing such
certified pieces over a fixed exponent support gives the tractable
sufficient nonnegativity test implemented by :func:`sage_certify`; its dual
cone membership test (:func:`dual_membership`) reduces to small LPs once
the candidate vector is fixed.

Certificate searches are phrased as margin optimization: maximize a uniform
headroom m subject to D(nu_j, e*c_j) <= d_j - m for every piece, so a
near-boundary input reports a signed distance instead of a bare verdict.
Negative verdicts are only declared together with an improving ray of the
dual cone, obtained from the equality multipliers (or the Farkas ray) of
the homogeneous embedding.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from .conic import (
    ConicSolution,
    ProgramBuilder,
    SolverOptions,
    Status,
    relative_entropy,
    solve,
)
from .signomial import (
    DEDUP_RTOL,
    ExponentSet,
    Signomial,
    _extremal_directions,
    evaluate,
)

E = float(np.e)


class Verdict(Enum):
    SAGE = "sage"
    NOT_SAGE = "not_sage"
    INDETERMINATE = "indeterminate"


class AgeVerdict(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class AgeCertificate:
    """Witness nu for one AM/GM-exponential piece.

    ``nu`` runs over the positive-part exponents; ``designated`` is the
    index of the (possibly negative) designated term within the enclosing
    support, or None for a standalone certificate; ``slack`` is
    beta - D(nu, e*c) >= 0 at the witness.
    """

    nu: np.ndarray
    designated: int | None
    slack: float


@dataclass(frozen=True)
class AgeResult:
    verdict: AgeVerdict
    certificate: AgeCertificate | None
    margin: float
    solution: ConicSolution | None = None


@dataclass(frozen=True)
class SageCertificate:
    """Coefficient splits c^(j) (rows of ``coeff_splits``) summing to the
    certified vector, with balance witnesses nu^(j) (rows of ``nus``;
    entry j holds -sum of the others)."""

    exponents: np.ndarray
    split_indices: tuple[int, ...]
    coeff_splits: np.ndarray
    nus: np.ndarray
    margin: float

    def total(self) -> np.ndarray:
        if self.coeff_splits.size == 0:
            return np.zeros(self.exponents.shape[0])
        return self.coeff_splits.sum(axis=0)

    def scaled(self, t: float) -> "SageCertificate":
        """Certificate for t*c, t > 0 (cone property: scale every piece)."""
        if t <= 0:
            raise ValueError("scale factor must be positive")
        return SageCertificate(
            self.exponents,
            self.split_indices,
            t * self.coeff_splits,
            t * self.nus,
            t * self.margin,
        )


def add_certificates(a: SageCertificate, b: SageCertificate) -> SageCertificate:
    """Certificate for the sum of two certified vectors on one support.

    Pieces with the same designated index add directly (the AM/GM cone is
    closed under addition of pieces sharing a designated exponent is not
    true in general, so pieces are kept separate by concatenating splits;
    summing split lists preserves validity because each piece remains an
    AM/GM-exponential)."""
    if a.exponents.shape != b.exponents.shape or not np.allclose(
        a.exponents, b.exponents
    ):
        raise ValueError("certificates must share the exponent support")
    return SageCertificate(
        a.exponents,
        a.split_indices + b.split_indices,
        np.vstack([a.coeff_splits, b.coeff_splits])
        if a.coeff_splits.size or b.coeff_splits.size
        else a.coeff_splits,
        np.vstack([a.nus, b.nus]) if a.nus.size or b.nus.size else a.nus,
        min(a.margin, b.margin),
    )


@dataclass(frozen=True)
class DualConeWitness:
    v: np.ndarray
    taus: np.ndarray  # (ell, n)


@dataclass(frozen=True)
class DualResult:
    verdict: str  # "inside" | "outside" | "indeterminate"
    witness: DualConeWitness | None
    margin: float


@dataclass(frozen=True)
class SageResult:
    verdict: Verdict
    certificate: SageCertificate | None
    margin: float
    separator: np.ndarray | None = None
    solution: ConicSolution | None = None


def _hull_member(point: np.ndarray, others: np.ndarray) -> bool:
    """LP feasibility of point = convex combination of the given rows."""
    k, n = others.shape
    if k == 0:
        return False
    A_eq = np.vstack([others.T, np.ones((1, k))])
    b_eq = np.concatenate([point, [1.0]])
    res = linprog(
        np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs"
    )
    return res.status == 0


def age_fast_path(designated, exponents) -> bool | None:
    """Hull screen for the one-negative-term cone.

    Returns True when the designated exponent lies outside the convex hull
    of the others; membership then holds exactly when beta >= 0 (and the
    positive part is nonnegative).  Returns None when the hull test defers
    to the solver.
    """
    designated = np.asarray(designated, dtype=float)
    exponents = np.atleast_2d(np.asarray(exponents, dtype=float))
    return True if not _hull_member(designated, exponents) else None


def age_certify(
    c,
    beta: float,
    exponents,
    designated,
    options: SolverOptions | None = None,
) -> AgeResult:
    """Decide membership of (c, beta) in the one-negative-term cone.

    The underlying solve is  min_nu D(nu, e*c)  over the balance cone; the
    margin reported is beta minus that minimum, so feasibility holds iff the
    margin is nonnegative.  An infeasible verdict is backed by the solver's
    dual bound (weak duality), indeterminate otherwise.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    exponents = np.atleast_2d(np.asarray(exponents, dtype=float))
    designated = np.asarray(designated, dtype=float)
    if np.any(c < -1e-12):
        raise ValueError("positive-part coefficients must be nonnegative")
    if exponents.shape[0] != c.shape[0]:
        raise ValueError("coefficient count must match exponent rows")
    tol = 1e-9 * (1.0 + abs(beta) + float(np.max(np.abs(c), initial=0.0)))

    if age_fast_path(designated, exponents):
        if beta >= -tol:
            cert = AgeCertificate(np.zeros(c.shape[0]), None, beta)
            return AgeResult(AgeVerdict.FEASIBLE, cert, beta)
        return AgeResult(AgeVerdict.INFEASIBLE, None, beta)

    # Coefficients pinned to zero force the matching nu coordinate to zero
    # (closure convention); drop them from the solve.
    active = np.flatnonzero(c > 0.0)
    builder = ProgramBuilder()
    us, vs = [], []
    for j in active:
        u, v, w = builder.new_exp()
        us.append(u)
        vs.append(v)
        builder.add_eq({w: 1.0}, E * c[j])
    for i in range(exponents.shape[1]):
        row = {
            vs[k]: exponents[j, i] - designated[i]
            for k, j in enumerate(active)
            if exponents[j, i] != designated[i]
        }
        builder.add_eq(row, 0.0)
    builder.add_objective({u: -1.0 for u in us})
    sol = solve(builder.build(), options)
    if sol.status != Status.OPTIMAL:
        return AgeResult(AgeVerdict.INDETERMINATE, None, np.nan, sol)
    margin_hi = beta - sol.obj_dual  # certified upper bound on the margin
    margin_lo = beta - sol.obj_primal
    if margin_lo >= -tol:
        nu = np.zeros(c.shape[0])
        nu[active] = np.maximum(sol.z[vs], 0.0)
        cert = AgeCertificate(nu, None, margin_lo)
        return AgeResult(AgeVerdict.FEASIBLE, cert, margin_lo, sol)
    if margin_hi < -tol:
        return AgeResult(AgeVerdict.INFEASIBLE, None, margin_hi, sol)
    return AgeResult(AgeVerdict.INDETERMINATE, None, margin_lo, sol)


@dataclass
class SageSystemRefs:
    """Handles into one SAGE-membership block inside a larger program."""

    exponents: np.ndarray
    split_indices: tuple[int, ...]
    split_rows: list[int]  # row index per support coordinate
    w_refs: dict[tuple[int, int], int]  # (j, i) -> lifted coefficient e*c^(j)_i
    nu_refs: dict[tuple[int, int], int]
    d_refs: dict[int, int]  # designated coefficient per split
    r_refs: list[int]  # posynomial remainder per coordinate


def append_sage_membership(
    builder: ProgramBuilder,
    exponents: np.ndarray,
    coeff_terms: list[tuple[float, dict[int, float]]],
    margin: int | None = None,
) -> SageSystemRefs:
    """Emit the constraint "the vector with coordinates c_i = const_i +
    sum coef*var lies in the SAGE coefficient cone over ``exponents``".

    Splits are generated only for exponents lying in the convex hull of the
    others; extremal coordinates can only absorb nonnegative remainder mass.
    If ``margin`` is a variable index, every piece's entropy inequality is
    tightened to D <= d_j - margin.
    """
    exponents = np.atleast_2d(np.asarray(exponents, dtype=float))
    ell = exponents.shape[0]
    if len(coeff_terms) != ell:
        raise ValueError("one coefficient expression per support exponent")
    extremal = set(_extremal_directions(exponents).keys())
    S = tuple(j for j in range(ell) if j not in extremal)

    w_refs: dict[tuple[int, int], int] = {}
    nu_refs: dict[tuple[int, int], int] = {}
    d_refs: dict[int, int] = {}
    for j in S:
        (d_refs[j],) = builder.new_free(1)
        link = {d_refs[j]: 1.0}
        for i in range(ell):
            if i == j:
                continue
            u, v, w = builder.new_exp()
            w_refs[(j, i)] = w
            nu_refs[(j, i)] = v
            link[u] = 1.0
        # balance: sum_i (a_i - a_j) nu^(j)_i = 0
        for dim in range(exponents.shape[1]):
            row = {}
            for i in range(ell):
                if i == j:
                    continue
                coef = exponents[i, dim] - exponents[j, dim]
                if coef != 0.0:
                    row[nu_refs[(j, i)]] = coef
            builder.add_eq(row, 0.0)
        if margin is not None:
            link[margin] = -1.0
        (rho,) = builder.new_nonneg(1)
        link[rho] = -1.0
        builder.add_eq(link, 0.0)

    # Remainder slacks are mathematically redundant once a split exists
    # (nonnegative mass can be folded into any piece) but keeping them gives
    # the iterates interior room; they also pin the sign of the row duals.
    r_refs = builder.new_nonneg(ell)
    split_rows: list[int] = []
    for i in range(ell):
        const_i, expr = coeff_terms[i]
        row: dict[int, float] = {r_refs[i]: 1.0}
        if i in d_refs:
            row[d_refs[i]] = 1.0
        for j in S:
            if j != i:
                row[w_refs[(j, i)]] = row.get(w_refs[(j, i)], 0.0) + 1.0 / E
        for var, coef in expr.items():
            row[var] = row.get(var, 0.0) - coef
        split_rows.append(builder.add_eq(row, const_i))
    return SageSystemRefs(
        exponents, S, split_rows, w_refs, nu_refs, d_refs, list(r_refs)
    )


def read_certificate(
    refs: SageSystemRefs, sol: ConicSolution, margin: float
) -> SageCertificate:
    """Assemble a SageCertificate from a solved membership block.

    The nonnegative remainder is folded into the first split (adding a
    nonnegative vector to an AM/GM-exponential keeps it one); a support
    whose exponents are all extremal has no splits, so the remainder
    becomes one-term posynomial pieces instead.
    """
    ell = refs.exponents.shape[0]
    r = np.maximum(np.array([sol.z[v] for v in refs.r_refs]), 0.0)
    if not refs.split_indices:
        idx = tuple(range(ell))
        splits = np.diag(r)
        nus = np.zeros((ell, ell))
        return SageCertificate(refs.exponents, idx, splits, nus, margin)
    splits = []
    nus = []
    for j in refs.split_indices:
        cj = np.zeros(ell)
        nuj = np.zeros(ell)
        cj[j] = sol.z[refs.d_refs[j]]
        for i in range(ell):
            if i == j:
                continue
            cj[i] = max(sol.z[refs.w_refs[(j, i)]] / E, 0.0)
            nuj[i] = max(sol.z[refs.nu_refs[(j, i)]], 0.0)
        nuj[j] = -nuj.sum()
        splits.append(cj)
        nus.append(nuj)
    splits = np.array(splits)
    splits[0] += r
    return SageCertificate(
        refs.exponents, refs.split_indices, splits, np.array(nus), margin
    )


def _pad_coeffs(f: Signomial, support: np.ndarray) -> np.ndarray:
    """Coefficients of f re-indexed on the support rows (zeros elsewhere)."""
    scale = 1.0 + max(
        float(np.max(np.abs(support), initial=0.0)),
        float(np.max(np.abs(f.exponents), initial=0.0)),
    )
    tol = DEDUP_RTOL * scale
    c = np.zeros(support.shape[0])
    for row, coef in zip(f.exponents, f.coeffs):
        d = np.max(np.abs(support - row[None, :]), axis=1)
        k = int(np.argmin(d))
        if d[k] > tol:
            raise ValueError("signomial exponent missing from the support")
        c[k] += coef
    return c


def sage_certify(
    f: Signomial,
    support: ExponentSet | np.ndarray | None = None,
    options: SolverOptions | None = None,
) -> SageResult:
    """Decide SAGE membership of f over the given exponent support.

    SAGE verdicts come with a certificate whose margin is the uniform
    entropy headroom; NOT-SAGE verdicts come with a separating vector of
    the dual cone (an improving ray of the membership program).
    """
    if support is None:
        support_arr = np.asarray(f.exponents, dtype=float)
    elif isinstance(support, ExponentSet):
        support_arr = np.asarray(support.elements, dtype=float)
    else:
        support_arr = np.atleast_2d(np.asarray(support, dtype=float))
    c = _pad_coeffs(f, support_arr)
    return sage_certify_coeffs(c, support_arr, options)


def sage_certify_coeffs(
    c: np.ndarray,
    support: np.ndarray,
    options: SolverOptions | None = None,
) -> SageResult:
    """SAGE membership of an explicit coefficient vector over a support."""
    c = np.asarray(c, dtype=float)
    support = np.atleast_2d(np.asarray(support, dtype=float))
    ell = support.shape[0]
    ctol = 1e-8 * (1.0 + float(np.max(np.abs(c), initial=0.0)))

    extremal = set(_extremal_directions(support).keys())
    S = tuple(j for j in range(ell) if j not in extremal)
    if not S:
        # every exponent extremal: SAGE means the vector is a posynomial
        worst = float(np.min(c))
        if worst >= -ctol:
            cert = SageCertificate(
                support,
                tuple(range(ell)),
                np.diag(np.maximum(c, 0.0)),
                np.zeros((ell, ell)),
                worst,
            )
            return SageResult(Verdict.SAGE, cert, worst)
        sep = _curve_separator(c, support)
        return SageResult(Verdict.NOT_SAGE, None, worst, sep)

    builder = ProgramBuilder()
    (m,) = builder.new_free(1)
    refs = append_sage_membership(
        builder, support, [(float(ci), {}) for ci in c], margin=m
    )
    builder.add_objective({m: -1.0})
    sol = solve(builder.build(), options)

    if sol.status == Status.OPTIMAL:
        margin_lo = -sol.obj_primal  # headroom achieved by the returned point
        margin_hi = -sol.obj_dual  # certified upper bound on the headroom
        if margin_lo > ctol:
            cert = read_certificate(refs, sol, margin_lo)
            return SageResult(Verdict.SAGE, cert, margin_lo, None, sol)
        if margin_hi < -ctol:
            v = _split_row_dual(refs, sol)
            if v is not None and float(v @ c) < 0:
                return SageResult(Verdict.NOT_SAGE, None, margin_hi, v, sol)
            return SageResult(Verdict.INDETERMINATE, None, margin_hi, None, sol)
        return SageResult(Verdict.INDETERMINATE, None, margin_lo, None, sol)
    if sol.status == Status.PRIMAL_INFEASIBLE:
        v = _split_row_dual(refs, sol)
        if v is not None and float(v @ c) < 0:
            return SageResult(Verdict.NOT_SAGE, None, -np.inf, v, sol)
        return SageResult(Verdict.INDETERMINATE, None, -np.inf, None, sol)
    if sol.status == Status.DUAL_INFEASIBLE:
        # headroom unbounded above: strictly interior; re-solve for a witness
        builder2 = ProgramBuilder()
        refs2 = append_sage_membership(
            builder2, support, [(float(ci), {}) for ci in c], margin=None
        )
        sol2 = solve(builder2.build(), options)
        if sol2.status == Status.OPTIMAL:
            cert = read_certificate(refs2, sol2, np.inf)
            return SageResult(Verdict.SAGE, cert, np.inf, None, sol2)
        return SageResult(Verdict.INDETERMINATE, None, np.nan, None, sol)
    return SageResult(Verdict.INDETERMINATE, None, np.nan, None, sol)


def _split_row_dual(refs: SageSystemRefs, sol: ConicSolution) -> np.ndarray | None:
    """Separating dual-cone vector from the splitting-row multipliers."""
    if sol.y is None:
        return None
    v = -np.array([sol.y[r] for r in refs.split_rows])
    if not np.all(np.isfinite(v)):
        return None
    return np.maximum(v, 0.0) if np.min(v) > -1e-7 * (1 + np.max(np.abs(v))) else v


def _curve_separator(c: np.ndarray, support: np.ndarray) -> np.ndarray | None:
    """Exponential-curve point v with c.v < 0 (valid dual-cone member)."""
    directions = _extremal_directions(support)
    for j, u in directions.items():
        if c[j] >= 0:
            continue
        for t in np.linspace(1.0, 60.0, 40):
            v = np.exp(support @ (t * u))
            v /= np.max(v)
            if float(c @ v) < 0:
                return v
    return None


def verify_certificate(cert: SageCertificate, f: Signomial, tol: float = 1e-6) -> bool:
    """Recompute every certificate inequality with the direct entropy formula."""
    support = cert.exponents
    try:
        c = _pad_coeffs(f, support)
    except ValueError:
        return False
    return verify_certificate_coeffs(cert, c, tol)


def verify_certificate_coeffs(
    cert: SageCertificate, c: np.ndarray, tol: float = 1e-6
) -> bool:
    support = cert.exponents
    ell = support.shape[0]
    if cert.coeff_splits.shape != (len(cert.split_indices), ell):
        return False
    total = cert.total()
    scale = 1.0 + float(np.max(np.abs(c), initial=0.0))
    if np.max(np.abs(total - c), initial=0.0) > tol * scale:
        return False
    for row, (j, cj) in enumerate(zip(cert.split_indices, cert.coeff_splits)):
        nu = cert.nus[row]
        off = [i for i in range(ell) if i != j]
        cj_off = cj[off]
        nu_off = nu[off]
        if np.min(cj_off, initial=0.0) < -tol * scale:
            return False
        if np.min(nu_off, initial=0.0) < -tol:
            return False
        # balance: sum_i a_i nu_i = (1'nu_off) a_j, i.e. full-vector balance
        bal = support[off].T @ nu_off - nu_off.sum() * support[j]
        nu_scale = 1.0 + float(np.abs(nu_off).sum())
        if np.max(np.abs(bal), initial=0.0) > tol * nu_scale * (
            1.0 + float(np.max(np.abs(support)))
        ):
            return False
        nu_c = np.clip(nu_off, 0.0, None)
        lam = E * np.clip(cj_off, 0.0, None)
        dead = lam <= 0.0
        if np.any(nu_c[dead] > tol):
            return False
        nu_c = np.where(dead, 0.0, nu_c)
        if relative_entropy(nu_c, lam) > cj[j] + tol * scale:
            return False
    return True


def verify_age(
    cert: AgeCertificate, c, beta: float, exponents, designated, tol: float = 1e-6
) -> bool:
    """Check the one-piece certificate invariants directly."""
    c = np.asarray(c, dtype=float)
    exponents = np.atleast_2d(np.asarray(exponents, dtype=float))
    designated = np.asarray(designated, dtype=float)
    nu = np.asarray(cert.nu, dtype=float)
    if np.min(nu, initial=0.0) < -tol:
        return False
    nu_c = np.clip(nu, 0.0, None)
    scale = 1.0 + float(np.max(np.abs(c), initial=0.0)) + abs(beta)
    bal = exponents.T @ nu_c - nu_c.sum() * designated
    if np.max(np.abs(bal), initial=0.0) > tol * (1.0 + nu_c.sum()) * (
        1.0 + float(np.max(np.abs(exponents)))
    ):
        return False
    lam = E * np.clip(c, 0.0, None)
    dead = lam <= 0.0
    if np.any(nu_c[dead] > tol):
        return False
    nu_c = np.where(dead, 0.0, nu_c)
    return relative_entropy(nu_c, lam) <= beta + tol * scale


def dual_membership(
    v,
    exponents,
    options: SolverOptions | None = None,
    zero_tol: float = 1e-12,
) -> DualResult:
    """Membership of v in the dual SAGE cone.

    With v fixed, the defining inequalities v_i log(v_i/v_j) <= (a_i-a_j)'t_i
    are linear in the t_i, so the test is one LP minimizing the worst
    violation; a vanishing optimum produces the witness vectors.
    Coordinates v_i > 0 paired with v_j = 0 force the verdict "outside"
    (the left side is +inf and no inequality is vacuous for distinct
    exponents).
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    exponents = np.atleast_2d(np.asarray(exponents, dtype=float))
    ell, n = exponents.shape
    if v.shape[0] != ell:
        raise ValueError("v must have one coordinate per exponent")
    vmax = float(np.max(v, initial=0.0))
    if np.min(v, initial=0.0) < -1e-9 * (1.0 + vmax):
        raise ValueError("v must be nonnegative")
    v = np.clip(v, 0.0, None)
    pos = v > zero_tol * max(vmax, 1.0)
    if vmax <= 0.0:
        return DualResult("inside", DualConeWitness(v, np.zeros((ell, n))), 0.0)
    if pos.any() and (~pos).any():
        # some ratio v_i / v_j is infinite
        return DualResult("outside", None, -np.inf)

    rhs = np.zeros((ell, ell))
    for i in range(ell):
        for j in range(ell):
            if i != j and v[i] > 0:
                rhs[i, j] = v[i] * np.log(v[i] / v[j])
    builder = ProgramBuilder()
    taus = [builder.new_free(n) for _ in range(ell)]
    (viol,) = builder.new_nonneg(1)
    for i in range(ell):
        for j in range(ell):
            if i == j:
                continue
            (slack,) = builder.new_nonneg(1)
            row = {viol: 1.0, slack: -1.0}
            for dim in range(n):
                coef = exponents[i, dim] - exponents[j, dim]
                if coef != 0.0:
                    row[taus[i][dim]] = row.get(taus[i][dim], 0.0) + coef
            builder.add_eq(row, rhs[i, j])
    builder.add_objective({viol: 1.0})
    sol = solve(builder.build(), options)
    if sol.status != Status.OPTIMAL:
        return DualResult("indeterminate", None, np.nan)
    margin = -sol.obj_primal
    tol = 1e-8 * (1.0 + float(np.max(np.abs(rhs))))
    if sol.obj_primal <= tol:
        tau_arr = np.array([[sol.z[t] for t in row] for row in taus])
        return DualResult("inside", DualConeWitness(v, tau_arr), margin)
    return DualResult("outside", None, margin)
