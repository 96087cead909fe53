"""Dense small-scale LP and projection kernel.

Every other module routes its numerics through this one: a deterministic
two-phase simplex (Bland's rule) with dual certificates, Euclidean projection
onto polyhedral cones by active-set enumeration, and distances measured in a
polyhedral (Minkowski-functional) norm.  The module also owns the three
library-wide tolerances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Guaranteed envelope; callers stay within it.  The hard caps below are
# generous so that internal combination LPs (convex-coefficient variables)
# are not rejected.
MAX_LP_DIM = 256
MAX_LP_CONSTRAINTS = 4096


class DimensionMismatch(ValueError):
    """A vector does not match the ambient dimension of the problem."""


class AsymmetricBall(ValueError):
    """Unit-ball polytope is not symmetric (B != -B)."""


class DegenerateBall(ValueError):
    """Unit-ball polytope does not contain 0 strictly inside."""


@dataclass(frozen=True)
class Tolerances:
    """Library-wide comparison slacks.

    eps_feas bounds constraint violations accepted as feasible, eps_cmp is
    the slack for value comparisons, and strict inequalities must clear
    eps_strict.  All fuzzy comparisons in the library go through these.
    """

    eps_feas: float = 1e-9
    eps_cmp: float = 1e-7
    eps_strict: float = 1e-6

    def __post_init__(self):
        if not (0.0 < self.eps_feas < self.eps_strict < 1.0):
            raise ValueError("tolerances must satisfy 0 < eps_feas < eps_strict < 1")
        if self.eps_cmp <= 0.0:
            raise ValueError("eps_cmp must be positive")

    def eq(self, a: float, b: float) -> bool:
        return abs(a - b) <= self.eps_cmp

    def leq(self, a: float, b: float) -> bool:
        return a <= b + self.eps_cmp

    def lt_strict(self, a: float, b: float) -> bool:
        return a < b - self.eps_strict


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class LpProblem:
    """min/max <objective, x> subject to rows (normal, bound, relation).

    relation is "<=" or "=".  Variables are free (unrestricted sign).
    """

    objective: np.ndarray
    constraints: list  # of (normal: array, bound: float, relation: str)
    sense: str = "min"

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        object.__setattr__(self, "objective", c)
        n = c.shape[0]
        if n > MAX_LP_DIM:
            raise DimensionMismatch(f"LP dimension {n} exceeds {MAX_LP_DIM}")
        if len(self.constraints) > MAX_LP_CONSTRAINTS:
            raise DimensionMismatch(
                f"{len(self.constraints)} constraints exceed {MAX_LP_CONSTRAINTS}"
            )
        rows = []
        for a, b, rel in self.constraints:
            a = np.asarray(a, dtype=float)
            if a.shape != (n,):
                raise DimensionMismatch(
                    f"constraint normal of shape {a.shape} vs dimension {n}"
                )
            if rel not in ("<=", "="):
                raise ValueError(f"unknown relation {rel!r}")
            rows.append((a, float(b), rel))
        object.__setattr__(self, "constraints", rows)
        if self.sense not in ("min", "max"):
            raise ValueError(f"unknown sense {self.sense!r}")


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    value: float | None = None
    point: np.ndarray | None = None
    dual: np.ndarray | None = None  # one multiplier per constraint row

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


_PIVOT_TOL = 1e-10


def _bland_simplex(T, basis, cost_cols):
    """Run simplex on tableau T (constraint rows, then cost row) in place.

    Entering and leaving indices follow Bland's rule, so the iteration is
    finite and deterministic.  Returns "optimal" or "unbounded".
    """
    m = T.shape[0] - 1
    while True:
        r = T[-1]
        entering = -1
        for j in cost_cols:
            if r[j] < -_PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return "optimal"
        col = T[:m, entering]
        leaving = -1
        best_ratio = np.inf
        for i in range(m):
            if col[i] > _PIVOT_TOL:
                ratio = T[i, -1] / col[i]
                if (
                    leaving < 0
                    or ratio < best_ratio - _PIVOT_TOL
                    or (abs(ratio - best_ratio) <= _PIVOT_TOL and basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            return "unbounded"
        T[leaving] /= T[leaving, entering]
        scale = T[:, entering].copy()
        scale[leaving] = 0.0
        T -= np.outer(scale, T[leaving])
        basis[leaving] = entering


def solve_lp(problem: LpProblem, tol: Tolerances = DEFAULT_TOL) -> LpResult:
    """Solve a dense LP exactly (up to floating point) and emit a dual.

    Free variables are split, rows get slacks, and a full artificial basis
    drives phase 1.  The reported value is the objective recomputed at the
    returned point; `dual` certifies strong duality: value == dual . bounds
    with A^T dual == objective, dual <= 0 on "<=" rows for sense min,
    >= 0 for sense max, free on "=" rows.
    """
    c0 = problem.objective
    n = c0.shape[0]
    sense_flip = -1.0 if problem.sense == "max" else 1.0
    c = sense_flip * c0

    m = len(problem.constraints)
    if m == 0:
        if np.all(c == 0.0):
            return LpResult(LpStatus.OPTIMAL, 0.0, np.zeros(n), np.zeros(0))
        return LpResult(LpStatus.UNBOUNDED)

    n_slack = sum(1 for _, _, rel in problem.constraints if rel == "<=")
    n_struct = 2 * n + n_slack
    n_total = n_struct + m  # artificials at the end

    A = np.zeros((m, n_total))
    b = np.zeros(m)
    row_sign = np.ones(m)
    k = 0
    for i, (a, bi, rel) in enumerate(problem.constraints):
        A[i, :n] = a
        A[i, n : 2 * n] = -a
        if rel == "<=":
            A[i, 2 * n + k] = 1.0
            k += 1
        b[i] = bi
    for i in range(m):
        if b[i] < 0.0:
            A[i, :n_struct] *= -1.0
            b[i] = -b[i]
            row_sign[i] = -1.0
        A[i, n_struct + i] = 1.0

    # Phase 1: minimize the sum of artificials.
    T = np.zeros((m + 1, n_total + 1))
    T[:m, :n_total] = A
    T[:m, -1] = b
    T[-1, n_struct:n_total] = 1.0
    basis = [n_struct + i for i in range(m)]
    for i in range(m):
        T[-1] -= T[i]
    status = _bland_simplex(T, basis, range(n_total))
    assert status == "optimal"  # phase 1 is bounded below by 0
    if -T[-1, -1] > tol.eps_feas:
        return LpResult(LpStatus.INFEASIBLE)

    # Drive surviving artificials out of the basis; drop redundant rows.
    struct_cols = range(n_struct)
    drop_rows = set()
    for i in range(m):
        if basis[i] >= n_struct:
            pivot_j = -1
            for j in struct_cols:
                if abs(T[i, j]) > 1e-8:
                    pivot_j = j
                    break
            if pivot_j < 0:
                drop_rows.add(i)
                continue
            T[i] /= T[i, pivot_j]
            scale = T[:, pivot_j].copy()
            scale[i] = 0.0
            T -= np.outer(scale, T[i])
            basis[i] = pivot_j
    keep = [i for i in range(m) if i not in drop_rows]
    if drop_rows:
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[i] for i in keep]

    # Phase 2 over structural columns only.
    c_full = np.zeros(n_total)
    c_full[:n] = c
    c_full[n : 2 * n] = -c
    T[-1, :] = 0.0
    T[-1, :n_total] = c_full
    for i in range(len(basis)):
        if c_full[basis[i]] != 0.0:
            T[-1] -= c_full[basis[i]] * T[i]
    status = _bland_simplex(T, basis, struct_cols)
    if status == "unbounded":
        return LpResult(LpStatus.UNBOUNDED)

    z = np.zeros(n_total)
    for i, bi_col in enumerate(basis):
        z[bi_col] = T[i, -1]
    x = z[:n] - z[n : 2 * n]
    value = float(c0 @ x)

    # Dual from the final basis: solve A_B^T y = c_B on the kept rows.
    A_kept = A[keep]
    B_cols = A_kept[:, basis]
    try:
        y_kept = np.linalg.solve(B_cols.T, c_full[basis])
    except np.linalg.LinAlgError:
        y_kept, *_ = np.linalg.lstsq(B_cols.T, c_full[basis], rcond=None)
    y = np.zeros(m)
    for pos, i in enumerate(keep):
        y[i] = y_kept[pos] * row_sign[i]
    y *= sense_flip
    return LpResult(LpStatus.OPTIMAL, value, x, y)


def _feasible(A, y, eps):
    return bool(np.all(A @ y >= -eps)) if A.size else True


def project_cone(y, cone, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Euclidean projection of y onto a polyhedral cone.

    Enumerates active sets of facet rows: projecting y onto the nullspace of
    each subset produces every candidate that can be a metric projection, and
    the feasible candidate of minimal distance is exact.  Cheap because cones
    here live in low dimension and carry few facets.
    """
    y = np.asarray(y, dtype=float)
    A = cone.facets  # rows a with <a, x> >= 0 inside the cone
    n = y.shape[0]
    if A.shape[1] != n:
        raise DimensionMismatch("point dimension does not match cone")
    if _feasible(A, y, tol.eps_feas):
        return y.copy()
    best = None
    best_d2 = np.inf
    m = A.shape[0]
    for size in range(1, min(m, n) + 1):
        for S in itertools.combinations(range(m), size):
            A_S = A[list(S)]
            G = A_S @ A_S.T
            try:
                lam = np.linalg.solve(G, A_S @ y)
            except np.linalg.LinAlgError:
                lam, *_ = np.linalg.lstsq(G, A_S @ y, rcond=None)
            p = y - A_S.T @ lam
            if not _feasible(A, p, tol.eps_feas):
                continue
            d2 = float((y - p) @ (y - p))
            if d2 < best_d2 - 1e-15:
                best_d2 = d2
                best = p
    if best is None:
        best = np.zeros(n)  # defensive: only the apex remained
    return best


def minkowski_gauge_ball_check(ball, tol: Tolerances = DEFAULT_TOL):
    """Validate a unit-ball polytope: symmetric with 0 strictly inside."""
    V = ball.vertices
    A, b = ball.halfspaces
    norms = np.linalg.norm(A, axis=1)
    if np.any(b < tol.eps_strict * np.maximum(norms, 1e-30)):
        raise DegenerateBall("0 is not strictly inside the ball")
    slack = b[None, :] - (-V) @ A.T
    if np.min(slack) < -tol.eps_feas:
        raise AsymmetricBall("ball is not symmetric: some -v falls outside")


def dist_polyhedral_norm(y, S, ball, tol: Tolerances = DEFAULT_TOL) -> float:
    """inf over s in S of the Minkowski gauge of (y - s) w.r.t. `ball`.

    S is a polytope (convex combination of its vertices) or a polyhedral
    cone (conic combination of its rays); a single LP gives the exact value.
    """
    y = np.asarray(y, dtype=float)
    minkowski_gauge_ball_check(ball, tol)
    C, d = ball.halfspaces
    if hasattr(S, "rays"):  # polyhedral cone
        gen = S.rays
        affine = False
    else:
        gen = S.vertices
        affine = True
    k = gen.shape[0]
    # Variables (mu_1..mu_k, t): y - sum mu_i g_i in t * ball, mu >= 0.
    cons = []
    for j in range(C.shape[0]):
        row = np.concatenate([-C[j] @ gen.T, [-d[j]]])
        cons.append((row, -float(C[j] @ y), "<="))
    for i in range(k):
        e = np.zeros(k + 1)
        e[i] = -1.0
        cons.append((e, 0.0, "<="))
    if affine:
        e = np.zeros(k + 1)
        e[:k] = 1.0
        cons.append((e, 1.0, "="))
    obj = np.zeros(k + 1)
    obj[-1] = 1.0
    res = solve_lp(LpProblem(obj, cons, "min"), tol)
    assert res.is_optimal, "gauge distance LP must be solvable"
    return max(res.value, 0.0)
