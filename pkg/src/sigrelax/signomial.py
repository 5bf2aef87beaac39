"""Signomial data model, arithmetic and exponent-set combinatorics.

A signomial is a finite weighted sum of exponentials of linear forms,

    f(x) = sum_j c_j * exp(a_j . x),        a_j in R^n,  c_j in R.

Exponent vectors are stored as floating point data, so exponents that
coincide only up to rounding (as happens when forming products) are merged
under a relative tolerance.  All values are immutable after construction and
every operation is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

#: Relative tolerance used to identify two exponent vectors: a and b are
#: merged when ||a - b||_inf <= DEDUP_RTOL * (1 + max(||a||_inf, ||b||_inf)).
DEDUP_RTOL = 1e-9

#: Default cap on the number of terms that any single operation may produce.
TERM_LIMIT = 20_000


class CapacityError(RuntimeError):
    """An operation would produce more terms than the configured limit."""


class _ExponentMerger:
    """Incremental tolerance-based identification of exponent vectors.

    Vectors are bucketed on a uniform grid of cell size equal to the merge
    tolerance; a candidate is compared against stored vectors in its own and
    all adjacent cells, so near-boundary pairs are never missed.
    """

    def __init__(self, n: int, scale: float):
        self.n = n
        self.tol = DEDUP_RTOL * (1.0 + scale)
        self.cell = max(self.tol, 1e-300)
        self._buckets: dict[tuple, list[int]] = {}
        self.vectors: list[np.ndarray] = []
        # Neighbour offsets for the cell lookup, fixed per dimension.
        self._offsets = list(np.ndindex(*(3,) * n)) if n <= 8 else None

    def _key(self, v: np.ndarray) -> tuple:
        return tuple(np.floor(v / self.cell).astype(np.int64))

    def find(self, v: np.ndarray) -> int | None:
        """Index of a stored vector identified with ``v``, or None."""
        if self._offsets is None:
            for i, u in enumerate(self.vectors):
                if np.max(np.abs(u - v)) <= self.tol:
                    return i
            return None
        base = self._key(v)
        for off in self._offsets:
            key = tuple(b + o - 1 for b, o in zip(base, off))
            for i in self._buckets.get(key, ()):
                if np.max(np.abs(self.vectors[i] - v)) <= self.tol:
                    return i
        return None

    def insert(self, v: np.ndarray) -> tuple[int, bool]:
        """Return (index, is_new) for ``v``, inserting it when unseen."""
        found = self.find(v)
        if found is not None:
            return found, False
        idx = len(self.vectors)
        self.vectors.append(v)
        if self._offsets is not None:
            self._buckets.setdefault(self._key(v), []).append(idx)
        return idx, True


def merge_terms(exponents: np.ndarray, coeffs: np.ndarray):
    """Deduplicate exponent rows (first-wins order), summing coefficients.

    Returns ``(unique_exponents, summed_coeffs)``.
    """
    exponents = np.atleast_2d(np.asarray(exponents, dtype=float))
    coeffs = np.asarray(coeffs, dtype=float)
    scale = float(np.max(np.abs(exponents))) if exponents.size else 0.0
    merger = _ExponentMerger(exponents.shape[1], scale)
    out_coeffs: list[float] = []
    for row, c in zip(exponents, coeffs):
        idx, new = merger.insert(row)
        if new:
            out_coeffs.append(float(c))
        else:
            out_coeffs[idx] += float(c)
    return np.array(merger.vectors), np.array(out_coeffs)


@dataclass(frozen=True)
class Signomial:
    """Immutable signomial: exponent matrix (ell x n) plus coefficient vector.

    Coefficients may be any reals, including zero; a zero coefficient keeps
    its exponent slot (useful for padding a missing constant term).  Exponent
    rows must be pairwise distinct under the dedup tolerance.
    """

    exponents: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        exps = np.atleast_2d(np.asarray(self.exponents, dtype=float))
        cs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if exps.ndim != 2:
            raise ValueError("exponents must be a 2-d array")
        if cs.ndim != 1 or cs.shape[0] != exps.shape[0]:
            raise ValueError("coefficient count must match exponent rows")
        if exps.shape[0] < 1:
            raise ValueError("a signomial needs at least one term")
        scale = float(np.max(np.abs(exps))) if exps.size else 0.0
        merger = _ExponentMerger(exps.shape[1], scale)
        for row in exps:
            _, new = merger.insert(row)
            if not new:
                raise ValueError("exponent vectors must be pairwise distinct")
        exps.flags.writeable = False
        cs.flags.writeable = False
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "coeffs", cs)

    @property
    def n(self) -> int:
        """Dimension of the argument x."""
        return self.exponents.shape[1]

    @property
    def ell(self) -> int:
        """Number of stored terms (zero coefficients included)."""
        return self.exponents.shape[0]

    @staticmethod
    def constant(n: int, value: float) -> "Signomial":
        return Signomial(np.zeros((1, n)), np.array([float(value)]))

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def without_zeros(self, tol: float = 0.0) -> "Signomial":
        """Copy with terms whose |coefficient| <= tol removed (keeps >= 1 term)."""
        keep = np.abs(self.coeffs) > tol
        if not keep.any():
            return Signomial.constant(self.n, 0.0)
        return Signomial(self.exponents[keep], self.coeffs[keep])

    def canonical_key(self, digits: int = 9) -> tuple:
        """Order-independent hashable key; identifies equal term multisets."""
        rows = sorted(
            (tuple(round(a, digits) for a in e), round(c, digits))
            for e, c in zip(self.exponents, self.coeffs)
        )
        return tuple(rows)


@dataclass(frozen=True)
class ExponentSet:
    """All integer conic combinations of base exponents with weight sum <= p.

    ``elements[k]`` equals ``sum_j lam_j * base[j]`` for every multi-index
    ``lam`` in ``multi_indices[k]``; elements are listed in order of first
    appearance when multi-indices are enumerated lexicographically.
    """

    base: np.ndarray
    order: int
    elements: np.ndarray
    multi_indices: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    def index_of(self, vector) -> int:
        """Index of the element identified with ``vector`` (tolerance match)."""
        vector = np.asarray(vector, dtype=float)
        scale = float(np.max(np.abs(self.elements))) if self.elements.size else 0.0
        tol = DEDUP_RTOL * (1.0 + max(scale, float(np.max(np.abs(vector))) if vector.size else 0.0))
        diffs = np.max(np.abs(self.elements - vector[None, :]), axis=1)
        k = int(np.argmin(diffs))
        if diffs[k] > tol:
            raise KeyError("vector is not an element of this exponent set")
        return k


def _lex_multi_indices(ell: int, p: int):
    """Yield all lam in Z_+^ell with sum(lam) <= p, lexicographically."""

    def rec(prefix: tuple[int, ...], budget: int):
        if len(prefix) == ell:
            yield prefix
            return
        for v in range(budget + 1):
            yield from rec(prefix + (v,), budget - v)

    yield from rec((), p)


def exponent_set(base, p: int, term_limit: int = TERM_LIMIT) -> ExponentSet:
    """Enumerate E_p of the given base exponents with tolerance dedup.

    Element order is deterministic: lexicographic in the generating
    multi-index, first occurrence wins on merge.
    """
    base = np.atleast_2d(np.asarray(base, dtype=float))
    if p < 0:
        raise ValueError("order p must be nonnegative")
    if base.shape[0] < 1:
        raise ValueError("base must be nonempty")
    ell = base.shape[0]
    if math.comb(ell + p, p) > term_limit:
        raise CapacityError(
            f"exponent set may contain up to {math.comb(ell + p, p)} elements, "
            f"limit is {term_limit}"
        )
    scale = float(np.max(np.abs(base))) * max(p, 1) if base.size else 0.0
    merger = _ExponentMerger(base.shape[1], scale)
    gens: list[list[tuple[int, ...]]] = []
    for lam in _lex_multi_indices(ell, p):
        vec = np.zeros(base.shape[1])
        for j, lj in enumerate(lam):
            if lj:
                vec = vec + lj * base[j]
        idx, new = merger.insert(vec)
        if new:
            gens.append([lam])
        else:
            gens[idx].append(lam)
    elements = np.array(merger.vectors)
    elements.flags.writeable = False
    return ExponentSet(base, p, elements, tuple(tuple(g) for g in gens))


def evaluate(f: Signomial, x) -> float:
    """Evaluate f at x with compensated (exact) summation of the terms."""
    x = np.asarray(x, dtype=float)
    if x.shape != (f.n,):
        raise ValueError(f"point has dimension {x.shape}, expected ({f.n},)")
    terms = f.coeffs * np.exp(f.exponents @ x)
    return math.fsum(terms)


def evaluate_many(f: Signomial, X: np.ndarray) -> np.ndarray:
    """Vectorized evaluation over rows of X (fast path, plain summation)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != f.n:
        raise ValueError("X must be (m, n)")
    return np.exp(X @ f.exponents.T) @ f.coeffs


def multiply(f: Signomial, g: Signomial, term_limit: int = TERM_LIMIT) -> Signomial:
    """Product signomial; coincident product exponents merge under tolerance."""
    if f.n != g.n:
        raise ValueError("signomials must share the argument dimension")
    if f.ell * g.ell > term_limit:
        raise CapacityError(
            f"product would form {f.ell * g.ell} raw terms, limit is {term_limit}"
        )
    exps = (f.exponents[:, None, :] + g.exponents[None, :, :]).reshape(-1, f.n)
    cs = np.outer(f.coeffs, g.coeffs).reshape(-1)
    merged_e, merged_c = merge_terms(exps, cs)
    return Signomial(merged_e, merged_c)


def multiplier_expand(
    f: Signomial, p: int, base=None, term_limit: int = TERM_LIMIT
) -> Signomial:
    """Multiply f by (sum_j exp(a_j . x))^p over the base exponents.

    ``base`` defaults to f's own exponent rows; the result's support lies in
    E_{p+1} of that base.
    """
    if p < 0:
        raise ValueError("power p must be nonnegative")
    if base is None:
        base = f.exponents
    base = np.atleast_2d(np.asarray(base, dtype=float))
    power_sum = Signomial(base, np.ones(base.shape[0]))
    out = f
    for _ in range(p):
        out = multiply(out, power_sum, term_limit=term_limit)
    return out


def _separating_margin(exponents: np.ndarray, j: int):
    """Best margin of a linear functional exposing exponent j.

    Solves  max m  s.t.  u.(a_j - a_i) >= m for all i != j,  |u|_inf <= 1.
    Returns (margin, u).  A strictly positive margin certifies that a_j is
    an extreme point of the convex hull of the exponent rows.
    """
    ell, n = exponents.shape
    others = [i for i in range(ell) if i != j]
    if not others:
        return 1.0, np.zeros(n)
    # Variables (u, m); minimize -m.
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.zeros((len(others), n + 1))
    for r, i in enumerate(others):
        A_ub[r, :n] = exponents[i] - exponents[j]
        A_ub[r, -1] = 1.0
    b_ub = np.zeros(len(others))
    bounds = [(-1.0, 1.0)] * n + [(None, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:  # pragma: no cover - highs is reliable on these LPs
        return 0.0, np.zeros(n)
    return float(res.x[-1]), res.x[:n].copy()


def extremal_exponents(f: Signomial) -> frozenset[int]:
    """Indices whose exponent is an extreme point of the exponent hull."""
    return frozenset(_extremal_directions(f.exponents).keys())


def _extremal_directions(exponents: np.ndarray) -> dict[int, np.ndarray]:
    """Map from extremal index to a functional strictly exposing it."""
    exponents = np.atleast_2d(np.asarray(exponents, dtype=float))
    scale = float(np.max(np.abs(exponents))) if exponents.size else 0.0
    tol = 1e-8 * (1.0 + scale)
    out: dict[int, np.ndarray] = {}
    for j in range(exponents.shape[0]):
        margin, u = _separating_margin(exponents, j)
        if margin > tol:
            out[j] = u
    return out


@dataclass(frozen=True)
class UnboundednessReport:
    """Outcome of the structural screen for inf f = -inf."""

    verdict: str  # "unbounded_below" or "inconclusive"
    index: int | None = None
    direction: np.ndarray | None = None

    @property
    def unbounded(self) -> bool:
        return self.verdict == "unbounded_below"


def screen_unbounded(f: Signomial) -> UnboundednessReport:
    """Detect a negative coefficient at an extremal exponent.

    Such a term dominates along the exposing direction, so inf f = -inf;
    anything else is inconclusive.
    """
    directions = _extremal_directions(f.exponents)
    for j, u in directions.items():
        if f.coeffs[j] < 0:
            return UnboundednessReport("unbounded_below", j, u)
    return UnboundednessReport("inconclusive")


