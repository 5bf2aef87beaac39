"""Standard-form conic programs and a small modeling layer.

A :class:`ConicProgram` is

    minimize    c' z
    subject to  A z = b,
                z in K,

where K is a product of Free, Nonneg and 3-dimensional Exp blocks laid out
over consecutive coordinates of z.  The dual convention used throughout the
package: y solves  max b'y  s.t.  c - A'y in K*, so for an LP row the
reported multiplier is the classical shadow price.

:class:`ProgramBuilder` assembles programs variable-by-variable; the
relative-entropy helper encodes each scalar inequality nu*log(nu/lam) <= t
as one Exp block (-t, nu, lam) and links the bound sum(t) <= beta through a
nonnegative slack.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .cones import exp_primal_violation

FREE = "free"
NONNEG = "nonneg"
EXP = "exp"


@dataclass(frozen=True)
class ConeBlock:
    kind: str
    size: int


@dataclass(frozen=True)
class ConicProgram:
    """Immutable conic program data; shareable read-only across threads."""

    c: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    blocks: tuple[ConeBlock, ...]
    objective_offset: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        b = np.asarray(self.b, dtype=float)
        A = sp.csr_matrix(self.A, dtype=float)
        total = sum(bl.size for bl in self.blocks)
        if total != c.shape[0]:
            raise ValueError("cone block sizes must sum to the variable count")
        if A.shape != (b.shape[0], c.shape[0]):
            raise ValueError("A must be (len(b), len(c))")
        for bl in self.blocks:
            if bl.kind not in (FREE, NONNEG, EXP):
                raise ValueError(f"unknown block kind {bl.kind!r}")
            if bl.kind == EXP and bl.size != 3:
                raise ValueError("Exp blocks are exactly 3-dimensional")
        c.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A", A)

    @property
    def num_vars(self) -> int:
        return self.c.shape[0]

    @property
    def num_rows(self) -> int:
        return self.b.shape[0]

    def variable_kinds(self) -> np.ndarray:
        """Per-coordinate kind array ('free' / 'nonneg' / 'exp')."""
        kinds = np.empty(self.num_vars, dtype=object)
        pos = 0
        for bl in self.blocks:
            kinds[pos : pos + bl.size] = bl.kind
            pos += bl.size
        return kinds

    def exp_triples(self) -> list[tuple[int, int, int]]:
        out = []
        pos = 0
        for bl in self.blocks:
            if bl.kind == EXP:
                out.append((pos, pos + 1, pos + 2))
            pos += bl.size
        return out

    def cone_violation(self, z: np.ndarray) -> float:
        """Largest violation of the cone constraints by the point z."""
        kinds = self.variable_kinds()
        viol = 0.0
        nn = kinds == NONNEG
        if nn.any():
            viol = max(viol, float(np.max(-z[nn], initial=0.0)))
        for (i, j, k) in self.exp_triples():
            viol = max(viol, exp_primal_violation(z[i], z[j], z[k]))
        return viol


class Status(Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE = "dual_infeasible"
    MAX_ITERATIONS = "max_iterations"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class ConicSolution:
    """Solver output.

    For status OPTIMAL, ``z`` is primal, ``y`` the equality multipliers and
    ``s`` the cone duals (zero on free coordinates); the stated residual and
    gap bounds hold.  For PRIMAL_INFEASIBLE, ``y``/``s`` hold a Farkas ray
    normalized to b'y = 1 with -A'y (= s) in K*.  For DUAL_INFEASIBLE, ``z``
    holds an unbounded improving ray (A z = 0, z in K, c'z = -1).
    """

    status: Status
    z: np.ndarray | None = None
    y: np.ndarray | None = None
    s: np.ndarray | None = None
    obj_primal: float = np.nan
    obj_dual: float = np.nan
    gap: float = np.nan
    rel_gap: float = np.nan
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    iterations: int = 0
    message: str = ""


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iters: int = 200
    verbose: bool = False
    # internals
    reg: float = 1e-9
    refine_steps: int = 2
    min_step: float = 1e-7
    infeas_tol: float = 1e-8
    equilibrate_iters: int = 10
    exp_scaling: str = "pd"  # "pd" (primal-dual secant) or "primal"


class BuildError(ValueError):
    """Malformed model: slot/dimension mismatch during program assembly."""


class ProgramBuilder:
    """Accumulates variables, equality rows and an objective; not thread-safe.

    Variables are referenced by integer index in creation order.  Exp-block
    coordinates are ordinary variables and may enter any equality row.
    """

    def __init__(self):
        self._kinds: list[str] = []
        self._rows: list[dict[int, float]] = []
        self._rhs: list[float] = []
        self._obj: dict[int, float] = {}

    @property
    def num_vars(self) -> int:
        return len(self._kinds)

    @property
    def num_rows(self) -> int:
        return len(self._rows)

    def _new(self, kind: str, count: int) -> list[int]:
        start = len(self._kinds)
        self._kinds.extend([kind] * count)
        return list(range(start, start + count))

    def new_free(self, count: int = 1) -> list[int]:
        return self._new(FREE, count)

    def new_nonneg(self, count: int = 1) -> list[int]:
        return self._new(NONNEG, count)

    def new_exp(self) -> tuple[int, int, int]:
        """Fresh (u, v, w) triple constrained to the exponential cone."""
        u, v, w = self._new(EXP, 3)
        return u, v, w

    def _check(self, var: int):
        if not (0 <= var < len(self._kinds)):
            raise BuildError(f"unknown variable index {var}")

    def add_eq(self, coeffs: dict[int, float], rhs: float = 0.0) -> int:
        """Append the row  sum coeffs[j] * z_j = rhs;  returns the row index."""
        clean: dict[int, float] = {}
        for var, coef in coeffs.items():
            self._check(var)
            if coef != 0.0:
                clean[var] = clean.get(var, 0.0) + float(coef)
        self._rows.append(clean)
        self._rhs.append(float(rhs))
        return len(self._rows) - 1

    def add_objective(self, coeffs: dict[int, float]):
        for var, coef in coeffs.items():
            self._check(var)
            self._obj[var] = self._obj.get(var, 0.0) + float(coef)

    def add_relative_entropy(self, nus, lams, bound) -> dict:
        """Encode  D(nu, lam) <= beta  jointly convex in nu and lam.

        ``nus`` and ``lams`` are equal-length lists whose entries are either
        existing variable indices (linked by an equality row), floats
        (pinned to a constant), or None (a fresh coordinate created inside
        the Exp block; its index is reported back).  ``bound`` is a variable
        index or a float.  Returns a dict with the created coordinates:
        ``u`` (u_j = -t_j), ``nu``, ``lam`` and the linking ``slack``.
        """
        if len(nus) != len(lams):
            raise BuildError("nu and lambda slot lists must have equal length")
        u_refs: list[int] = []
        nu_refs: list[int] = []
        lam_refs: list[int] = []
        for nu_slot, lam_slot in zip(nus, lams):
            u, v, w = self.new_exp()
            u_refs.append(u)
            nu_refs.append(v)
            lam_refs.append(w)
            if nu_slot is None:
                pass
            elif isinstance(nu_slot, (int, np.integer)):
                self.add_eq({v: 1.0, int(nu_slot): -1.0}, 0.0)
            else:
                self.add_eq({v: 1.0}, float(nu_slot))
            if lam_slot is None:
                pass
            elif isinstance(lam_slot, (int, np.integer)):
                self.add_eq({w: 1.0, int(lam_slot): -1.0}, 0.0)
            else:
                self.add_eq({w: 1.0}, float(lam_slot))
        (slack,) = self.new_nonneg(1)
        row = {u: 1.0 for u in u_refs}
        row[slack] = -1.0
        if isinstance(bound, (int, np.integer)):
            row[int(bound)] = 1.0
            self.add_eq(row, 0.0)
        else:
            self.add_eq(row, -float(bound))
        return {"u": u_refs, "nu": nu_refs, "lam": lam_refs, "slack": slack}

    def build(self, objective_offset: float = 0.0) -> ConicProgram:
        n = len(self._kinds)
        c = np.zeros(n)
        for var, coef in self._obj.items():
            c[var] = coef
        rows, cols, vals = [], [], []
        for i, row in enumerate(self._rows):
            for var, coef in row.items():
                rows.append(i)
                cols.append(var)
                vals.append(coef)
        A = sp.csr_matrix(
            (vals, (rows, cols)), shape=(len(self._rows), n), dtype=float
        )
        blocks: list[ConeBlock] = []
        i = 0
        while i < n:
            kind = self._kinds[i]
            if kind == EXP:
                blocks.append(ConeBlock(EXP, 3))
                i += 3
            else:
                j = i
                while j < n and self._kinds[j] == kind:
                    j += 1
                blocks.append(ConeBlock(kind, j - i))
                i = j
        return ConicProgram(
            c, A, np.array(self._rhs), tuple(blocks), float(objective_offset)
        )
