"""Lower-bound relaxations for signomial programs.

Unconstrained level p maximizes gamma subject to

    (sum_j exp(a_j . x))^p * (f(x) - gamma)   being SAGE over E_{p+1},

and the constrained level (p, q) maximizes gamma subject to

    f - gamma - sum_{h in R_q(C)} s_h * h     being SAGE over E_{p+q},

with every multiplier s_h itself SAGE over E_p and R_q(C) the set of
products of up to q constraint signomials.  Both compile to one conic
program in which gamma and the multiplier coefficients enter the lifted
coefficients linearly; the equality multipliers on the coefficient rows
are kept, since they form the dual moment vector consumed by the
extraction step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations_with_replacement

import numpy as np

from .conic import ConicSolution, ProgramBuilder, SolverOptions, Status, solve
from .sage import (
    SageCertificate,
    append_sage_membership,
    read_certificate,
    verify_certificate_coeffs,
)
from .signomial import (
    CapacityError,
    ExponentSet,
    Signomial,
    TERM_LIMIT,
    exponent_set,
    merge_terms,
    multiplier_expand,
    multiply,
    screen_unbounded,
)

#: Optimal values this negative are reported as "the relaxation certifies
#: nothing" rather than as a genuine finite bound.
NO_BOUND_FLOOR = -1e8


class RelaxStatus(Enum):
    OPTIMAL = "optimal"
    NO_BOUND = "no_bound"
    UNBOUNDED_BELOW = "unbounded_below"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SignomialProgram:
    """Objective and inequality constraints g_i(x) >= 0 on a shared support.

    The support is the deduplicated union of all exponents, with the zero
    exponent appended when missing (gamma needs a constant-term slot).
    """

    objective: Signomial
    constraints: tuple[Signomial, ...] = ()
    support: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.objective.n
        for g in self.constraints:
            if g.n != n:
                raise ValueError("objective and constraints must share dimension")
        rows = [self.objective.exponents]
        rows += [g.exponents for g in self.constraints]
        rows.append(np.zeros((1, n)))
        stacked = np.vstack(rows)
        support, _ = merge_terms(stacked, np.zeros(stacked.shape[0]))
        support.flags.writeable = False
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def n(self) -> int:
        return self.objective.n


@dataclass
class RelaxationResult:
    """Outcome of one relaxation level.

    ``moment_dual`` is the raw (unnormalized) dual vector on the lifted
    coefficient rows; ``realized_coeffs`` are the lifted coefficients of the
    certified signomial at gamma, and ``gamma_coeffs`` the per-coefficient
    sensitivity to gamma, so the certified vector at any gamma' is
    realized_coeffs + (gamma - gamma') * gamma_coeffs.
    """

    p: int
    q: int | None
    status: RelaxStatus
    gamma: float
    objective: Signomial
    constraints: tuple[Signomial, ...]
    support: np.ndarray
    lifted: ExponentSet | None = None
    support_lifted_idx: np.ndarray | None = None
    const_lifted_idx: int | None = None
    certificate: SageCertificate | None = None
    multipliers: list[tuple[Signomial, np.ndarray, np.ndarray]] = field(
        default_factory=list
    )
    moment_dual: np.ndarray | None = None
    realized_coeffs: np.ndarray | None = None
    gamma_coeffs: np.ndarray | None = None
    solution: ConicSolution | None = None

    def certificate_at(self, gamma: float) -> SageCertificate | None:
        """Certificate for the gamma-shifted signomial, gamma <= attained.

        Lowering gamma only adds nonnegative coefficient mass, which is
        folded into the first split.
        """
        if self.certificate is None or self.realized_coeffs is None:
            return None
        delta = (self.gamma - gamma) * self.gamma_coeffs
        if np.min(delta, initial=0.0) < 0:
            return None
        cert = self.certificate
        splits = cert.coeff_splits.copy()
        if splits.size == 0:
            return None
        splits[0] = splits[0] + delta
        return SageCertificate(
            cert.exponents, cert.split_indices, splits, cert.nus.copy(), cert.margin
        )

    def coeffs_at(self, gamma: float) -> np.ndarray | None:
        if self.realized_coeffs is None:
            return None
        return self.realized_coeffs + (self.gamma - gamma) * self.gamma_coeffs


def _pad_onto(f: Signomial, elements: np.ndarray) -> np.ndarray:
    from .sage import _pad_coeffs

    return _pad_coeffs(f, elements)


def unconstrained_bound(
    f: Signomial, p: int = 0, options: SolverOptions | None = None,
    term_limit: int = TERM_LIMIT,
) -> RelaxationResult:
    """Level-p lower bound for inf f over R^n."""
    if p < 0:
        raise ValueError("level p must be nonnegative")
    screen = screen_unbounded(f)
    if screen.unbounded:
        return RelaxationResult(
            p, None, RelaxStatus.UNBOUNDED_BELOW, -np.inf, f, (), f.exponents
        )
    sp_ = SignomialProgram(f)
    support = sp_.support
    lifted = exponent_set(support, p + 1, term_limit=term_limit)
    lifted_f = multiplier_expand(f, p, base=support, term_limit=term_limit)
    mult = multiplier_expand(
        Signomial.constant(f.n, 1.0), p, base=support, term_limit=term_limit
    )
    a = _pad_onto(lifted_f, lifted.elements)
    b_mult = _pad_onto(mult, lifted.elements)

    builder = ProgramBuilder()
    (gamma,) = builder.new_free(1)
    terms = [
        (float(a[i]), {gamma: -float(b_mult[i])} if b_mult[i] != 0.0 else {})
        for i in range(lifted.size)
    ]
    refs = append_sage_membership(builder, lifted.elements, terms)
    builder.add_objective({gamma: -1.0})
    sol = solve(builder.build(), options)

    res = RelaxationResult(
        p, None, RelaxStatus.INDETERMINATE, np.nan, f, (), support,
        lifted=lifted,
        support_lifted_idx=np.array(
            [lifted.index_of(row) for row in support], dtype=int
        ),
        const_lifted_idx=lifted.index_of(np.zeros(f.n)),
        gamma_coeffs=b_mult,
        solution=sol,
    )
    if sol.status == Status.OPTIMAL:
        gstar = -sol.obj_primal
        if gstar < NO_BOUND_FLOOR:
            res.status = RelaxStatus.NO_BOUND
            return res
        res.status = RelaxStatus.OPTIMAL
        res.gamma = gstar
        res.realized_coeffs = a - gstar * b_mult
        res.certificate = read_certificate(refs, sol, np.nan)
        res.moment_dual = -np.array([sol.y[r] for r in refs.split_rows])
    elif sol.status == Status.PRIMAL_INFEASIBLE:
        res.status = RelaxStatus.NO_BOUND
    return res


def products(
    constraints, q: int, term_limit: int = TERM_LIMIT
) -> list[Signomial]:
    """All products of up to q constraint signomials, the constant 1
    included; commutative duplicates and repeated signomials are removed."""
    constraints = list(constraints)
    if q < 0:
        raise ValueError("q must be nonnegative")
    n = constraints[0].n if constraints else 1
    if any(g.n != n for g in constraints):
        raise ValueError("constraints must share the argument dimension")
    out: list[Signomial] = []
    seen: set[tuple] = set()
    for size in range(q + 1):
        for combo in combinations_with_replacement(range(len(constraints)), size):
            prod = Signomial.constant(n, 1.0)
            for i in combo:
                prod = multiply(prod, constraints[i], term_limit=term_limit)
            key = prod.canonical_key()
            if key not in seen:
                seen.add(key)
                out.append(prod)
    return out


def constrained_bound(
    sp_: SignomialProgram,
    p: int = 0,
    q: int = 1,
    options: SolverOptions | None = None,
    term_limit: int = TERM_LIMIT,
) -> RelaxationResult:
    """Level-(p, q) lower bound for inf f over {x : g_i(x) >= 0}."""
    if q < 1:
        raise ValueError("constrained levels need q >= 1 (q = 0 is the "
                         "unconstrained relaxation)")
    if p < 0:
        raise ValueError("level p must be nonnegative")
    f = sp_.objective
    support = sp_.support
    lifted = exponent_set(support, p + q, term_limit=term_limit)
    mult_set = exponent_set(support, p, term_limit=term_limit)
    prods = products(list(sp_.constraints), q, term_limit=term_limit)

    a = _pad_onto(f, lifted.elements)
    const_idx = lifted.index_of(np.zeros(f.n))
    b_mult = np.zeros(lifted.size)
    b_mult[const_idx] = 1.0

    builder = ProgramBuilder()
    (gamma,) = builder.new_free(1)
    # coefficient expressions of f - gamma - sum_h s_h h on the lifted support
    exprs: list[dict[int, float]] = [
        {gamma: -1.0} if i == const_idx else {} for i in range(lifted.size)
    ]
    mult_refs = []
    for h in prods:
        coeff_vars = builder.new_free(mult_set.size)
        append_sage_membership(
            builder,
            mult_set.elements,
            [(0.0, {v: 1.0}) for v in coeff_vars],
        )
        mult_refs.append(coeff_vars)
        for k in range(mult_set.size):
            for beta, d in zip(h.exponents, h.coeffs):
                if d == 0.0:
                    continue
                i = lifted.index_of(mult_set.elements[k] + beta)
                expr = exprs[i]
                expr[coeff_vars[k]] = expr.get(coeff_vars[k], 0.0) - float(d)

    terms = [(float(a[i]), exprs[i]) for i in range(lifted.size)]
    refs = append_sage_membership(builder, lifted.elements, terms)
    builder.add_objective({gamma: -1.0})
    sol = solve(builder.build(), options)

    res = RelaxationResult(
        p, q, RelaxStatus.INDETERMINATE, np.nan, f, sp_.constraints, support,
        lifted=lifted,
        support_lifted_idx=np.array(
            [lifted.index_of(row) for row in support], dtype=int
        ),
        const_lifted_idx=const_idx,
        gamma_coeffs=b_mult,
        solution=sol,
    )
    if sol.status == Status.OPTIMAL:
        gstar = -sol.obj_primal
        if gstar < NO_BOUND_FLOOR:
            res.status = RelaxStatus.NO_BOUND
            return res
        res.status = RelaxStatus.OPTIMAL
        res.gamma = gstar
        res.certificate = read_certificate(refs, sol, np.nan)
        res.moment_dual = -np.array([sol.y[r] for r in refs.split_rows])
        realized = a - gstar * b_mult
        for h, coeff_vars in zip(prods, mult_refs):
            s_coeffs = np.array([sol.z[v] for v in coeff_vars])
            res.multipliers.append((h, s_coeffs, mult_set.elements))
            for k in range(mult_set.size):
                if s_coeffs[k] == 0.0:
                    continue
                for beta, d in zip(h.exponents, h.coeffs):
                    if d == 0.0:
                        continue
                    i = lifted.index_of(mult_set.elements[k] + beta)
                    realized[i] -= s_coeffs[k] * float(d)
        res.realized_coeffs = realized
    elif sol.status == Status.PRIMAL_INFEASIBLE:
        res.status = RelaxStatus.NO_BOUND
    return res


def add_box_constraints(
    sp_: SignomialProgram, U: float, L: float
) -> SignomialProgram:
    """Append U >= exp(a_j . x) >= L for every support exponent.

    These are the redundant inequalities that witness compactness of the
    feasible set; 2*ell constraints are added in support order.
    """
    if not (0 < L <= U):
        raise ValueError("need 0 < L <= U")
    n = sp_.n
    new = list(sp_.constraints)
    for alpha in sp_.support:
        if np.max(np.abs(alpha)) == 0.0:
            new.append(Signomial.constant(n, U - 1.0))
            new.append(Signomial.constant(n, 1.0 - L))
            continue
        zero = np.zeros((1, n))
        new.append(
            Signomial(np.vstack([zero, alpha[None, :]]), np.array([U, -1.0]))
        )
        new.append(
            Signomial(np.vstack([alpha[None, :], zero]), np.array([1.0, -L]))
        )
    return SignomialProgram(sp_.objective, tuple(new))


def exponent_structure_report(f: Signomial) -> dict:
    """Structural screen used by the limit-convergence analysis: does some
    reordering give n linearly independent lead exponents, a zero exponent,
    and a tail inside their hull but outside the lead hull?  Informational
    only; bounds are computed regardless."""
    from .sage import _hull_member

    exps = f.exponents
    ell, n = exps.shape
    zero_rows = [j for j in range(ell) if np.max(np.abs(exps[j])) == 0.0]
    nonzero = [j for j in range(ell) if j not in zero_rows]
    # greedy selection of a linearly independent head
    head: list[int] = []
    for j in nonzero:
        cand = exps[head + [j]]
        if np.linalg.matrix_rank(cand) == len(head) + 1:
            head.append(j)
        if len(head) == n:
            break
    independent = len(head) == n
    zero_present = bool(zero_rows)
    tail = [j for j in nonzero if j not in head]
    tail_ok = True
    for j in tail:
        in_big = _hull_member(exps[j], np.vstack([exps[head], np.zeros((1, n))]))
        in_small = _hull_member(exps[j], exps[head])
        if not in_big or in_small:
            tail_ok = False
            break
    return {
        "independent_head": independent,
        "zero_exponent_present": zero_present,
        "tail_in_hull": tail_ok if independent else False,
        "all_hold": independent and zero_present and (tail_ok if independent else False),
    }
