"""The four scalarizing-functional families and their subdifferential ops.

Families, all positively homogeneous over a solid pointed ordering cone K:

* cone-translative ("GW"): smallest t with t*r inside y + K, r interior;
* signed-distance ("HU"): d(y, -K) - d(y, complement of -K), measured in the
  Euclidean norm or in the gauge of a symmetric polytope ball;
* generator-support ("DS"): support functional of a compact generator of the
  dual cone;
* support-difference ("QD"): sigma_G - sigma_H for a pair of polytopes.

Alongside evaluation: the subdifferential slice at 0 of the translative
functional, the dual-sphere-section support value of the signed distance,
the order-interval unit ball that turns a translative functional into a
signed distance, axiom audits, and classifiers for family membership.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone import PolyCone, dual_cone, membership
from .numkernel import (
    DEFAULT_TOL,
    DimensionMismatch,
    LpProblem,
    Tolerances,
    dist_polyhedral_norm,
    project_cone,
    solve_lp,
)
from .polytope import Polytope, hull, vertices_from_halfspaces


class RNotInterior(ValueError):
    """Reference direction must lie strictly inside the ordering cone."""


class NotAGenerator(ValueError):
    """Polytope fails the dual-cone generator conditions."""


class UnboundedInterval(ValueError):
    """Order interval of a non-pointed cone is unbounded."""


class InvalidCone(ValueError):
    """Ordering cone must be solid and pointed."""


def _require_ordering_cone(K: PolyCone, tol: Tolerances):
    if not K.is_solid(tol) or not K.is_pointed(tol):
        raise InvalidCone("ordering cone must be solid and pointed")


class GWFunctional:
    """Cone-translative functional: min{t : t*r in y + K}."""

    __slots__ = ("K", "r")

    def __init__(self, K: PolyCone, r, tol: Tolerances = DEFAULT_TOL):
        _require_ordering_cone(K, tol)
        r = np.asarray(r, dtype=float)
        if membership(K, r, tol) != "interior":
            raise RNotInterior("r must be strictly interior to K")
        self.K = K
        self.r = r

    def value(self, y, tol: Tolerances = DEFAULT_TOL) -> float:
        y = np.asarray(y, dtype=float)
        A = self.K.facets
        cons = [((-float(a @ self.r),), -float(a @ y), "<=") for a in A]
        res = solve_lp(LpProblem(np.array([1.0]), cons, "min"), tol)
        assert res.is_optimal, "translative LP is always solvable for interior r"
        return res.value

    def value_batch(self, Y) -> np.ndarray:
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        A = self.K.facets
        return np.max((Y @ A.T) / (A @ self.r)[None, :], axis=1)

    __call__ = value


class HUFunctional:
    """Signed distance to -K: d(y, -K) - d(y, Y \\ -K).

    `ball` is None for the Euclidean norm or a symmetric polytope whose
    Minkowski gauge is the norm.  The second distance is the minimal facet-
    plane distance for points inside -K and zero outside.
    """

    __slots__ = ("K", "ball", "_negK")

    def __init__(self, K: PolyCone, ball: Polytope | None = None, tol: Tolerances = DEFAULT_TOL):
        _require_ordering_cone(K, tol)
        self.K = K
        self.ball = ball
        self._negK = K.negated()

    def value(self, y, tol: Tolerances = DEFAULT_TOL) -> float:
        y = np.asarray(y, dtype=float)
        A = self._negK.facets  # unit rows, <a, x> >= 0 on -K
        if self.ball is None:
            p = project_cone(y, self._negK, tol)
            d_out = float(np.linalg.norm(y - p))
            if d_out > tol.eps_feas:
                return d_out
            return -float(np.min(np.abs(A @ y))) if A.size else 0.0
        d_out = dist_polyhedral_norm(y, self._negK, self.ball, tol)
        if d_out > tol.eps_feas:
            return d_out
        gauges = np.array([self.ball.support_value(a) for a in A])
        return -float(np.min(np.abs(A @ y) / gauges)) if A.size else 0.0

    def value_batch(self, Y, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
        return np.array([self.value(y, tol) for y in np.atleast_2d(Y)])

    __call__ = value


class DSFunctional:
    """Support functional of a generator of the dual cone."""

    __slots__ = ("G", "K")

    def __init__(self, G: Polytope, K: PolyCone | None = None, tol: Tolerances = DEFAULT_TOL):
        if K is not None:
            check_generator(G, K, tol)
        self.G = G
        self.K = K

    def value(self, y, tol: Tolerances = DEFAULT_TOL) -> float:
        return self.G.support_value(y)

    def value_batch(self, Y) -> np.ndarray:
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return np.max(Y @ self.G.vertices.T, axis=1)

    __call__ = value


class QDFunctional:
    """Difference of support functionals sigma_G - sigma_H."""

    __slots__ = ("G", "H")

    def __init__(self, G: Polytope, H: Polytope):
        if G.dim != H.dim:
            raise DimensionMismatch("G and H must share the ambient dimension")
        self.G = G
        self.H = H

    def value(self, y, tol: Tolerances = DEFAULT_TOL) -> float:
        return self.G.support_value(y) - self.H.support_value(y)

    def value_batch(self, Y) -> np.ndarray:
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return np.max(Y @ self.G.vertices.T, axis=1) - np.max(Y @ self.H.vertices.T, axis=1)

    __call__ = value


ScalFun = GWFunctional | HUFunctional | DSFunctional | QDFunctional


def evaluate(f: ScalFun, y, tol: Tolerances = DEFAULT_TOL) -> float:
    return f.value(y, tol)


def _ray_meets_polytope(G: Polytope, s, tol: Tolerances) -> bool:
    """Does {t s : t >= 0} intersect G?  1-D interval intersection."""
    A, b = G.halfspaces
    lo, hi = 0.0, np.inf
    for a, bb in zip(A, b):
        c = float(a @ s)
        if abs(c) <= 1e-12:
            if bb < -tol.eps_feas:
                return False
            continue
        t = bb / c
        if c > 0:
            hi = min(hi, t)
        else:
            lo = max(lo, t)
    return lo <= hi + tol.eps_feas and hi >= -tol.eps_feas


def check_generator(G: Polytope, K: PolyCone, tol: Tolerances = DEFAULT_TOL):
    """Raise NotAGenerator unless 0 is outside G and cone(G) equals K*."""
    Kstar = dual_cone(K, tol)
    A, b = G.halfspaces
    if float(np.min(b)) > -tol.eps_strict:
        raise NotAGenerator("0 lies in (or within eps_strict of) G")
    for v in G.vertices:
        if not Kstar.contains(v, tol):
            raise NotAGenerator("a vertex of G falls outside the dual cone")
    for s in Kstar.rays:
        if not _ray_meets_polytope(G, s, tol):
            raise NotAGenerator("an extreme dual ray misses G: cone(G) != K*")


def gw_subdiff0(K: PolyCone, r, tol: Tolerances = DEFAULT_TOL) -> Polytope:
    """Subdifferential at 0 of the translative functional: the slice
    {y* in K* : <y*, r> = 1}, always a polytope for interior r."""
    r = np.asarray(r, dtype=float)
    if membership(K, r, tol) != "interior":
        raise RNotInterior("r must be strictly interior to K")
    S = dual_cone(K, tol).rays
    pair = S @ r
    return hull(S / pair[:, None], tol)


def hu_sigma(K: PolyCone, y, tol: Tolerances = DEFAULT_TOL) -> float:
    """Support value over the dual-sphere section {y* in K* : ||y*|| = 1}.

    Equals the norm of the projection of y onto K* when that is nonzero and
    otherwise the best pairing among the unit extreme dual rays.
    """
    y = np.asarray(y, dtype=float)
    Kstar = dual_cone(K, tol)
    p = project_cone(y, Kstar, tol)
    nrm = float(np.linalg.norm(p))
    if nrm > tol.eps_feas:
        return nrm
    return float(np.max(Kstar.rays @ y))


def gw_norm_ball(K: PolyCone, r, tol: Tolerances = DEFAULT_TOL) -> Polytope:
    """Order interval (r - K) intersect (-r + K) as a unit-ball polytope.

    The gauge of this ball turns the signed distance into the translative
    functional of r.  Requires K pointed so the interval is bounded."""
    r = np.asarray(r, dtype=float)
    if membership(K, r, tol) != "interior":
        raise RNotInterior("r must be strictly interior to K")
    if not K.is_pointed(tol):
        raise UnboundedInterval("order interval of a non-pointed cone")
    A = K.facets
    rows = np.vstack([A, -A])
    offs = np.concatenate([A @ r, A @ r])
    cand = vertices_from_halfspaces(rows, offs, tol)
    assert cand is not None
    return hull(cand, tol)


def translation_check(G: Polytope, r, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Support functional of G shifts by t along r iff <g, r> = 1 on all
    vertices."""
    pair = G.vertices @ np.asarray(r, dtype=float)
    return bool(np.all(np.abs(pair - 1.0) <= tol.eps_cmp))


@dataclass(frozen=True)
class GWClassification:
    is_gw: bool
    r: np.ndarray | None = None
    reason: str = ""


def classify_gw(G: Polytope, K: PolyCone, tol: Tolerances = DEFAULT_TOL) -> GWClassification:
    """Is G the hyperplane slice {y* in K* : <y*, r> = 1} for some interior r?

    The candidate r is the common normal of G's affine hull scaled to pair
    to one; rejection reasons name the failing step.
    """
    check_generator(G, K, tol)
    V = G.vertices
    c = V.mean(axis=0)
    M = V - c
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > 1e-9 * max(s[0] if s.size else 0.0, 1.0)))
    n = G.dim
    if rank != n - 1:
        return GWClassification(False, None, "affine hull not a hyperplane section")
    w = Vt[-1]
    denom = float(c @ w)
    if abs(denom) <= tol.eps_feas:
        return GWClassification(False, None, "affine hull not a hyperplane section")
    r = w / denom
    if membership(K, r, tol) != "interior":
        return GWClassification(False, None, "slice normal not interior to K")
    slice_poly = gw_subdiff0(K, r, tol)
    if slice_poly.same_set(G, tol):
        return GWClassification(True, r, "")
    return GWClassification(False, None, "slice mismatch")


def hu_obstruction_scaling(G: Polytope, tol: Tolerances = DEFAULT_TOL):
    """Search extreme points for a positively collinear pair q = lam * p.

    Such a pair certifies that G is not the subdifferential body of any
    equivalent norm's signed distance (two extreme points on one ray cannot
    both have unit dual gauge).  Redundant points are re-extracted first.
    Returns (p, lam) with lam > 1, or None.
    """
    P = hull(G.vertices, tol)
    V = P.vertices
    norms = np.linalg.norm(V, axis=1)
    found = None
    for i in range(V.shape[0]):
        if norms[i] <= tol.eps_feas:
            continue
        for j in range(V.shape[0]):
            if i == j or norms[j] <= tol.eps_feas:
                continue
            lam = norms[j] / norms[i]
            if lam <= 1.0 + tol.eps_cmp:
                continue
            # exact ratio test: v_j * ||v_i|| == v_i * ||v_j||
            if np.linalg.norm(V[j] * norms[i] - V[i] * norms[j]) <= 1e-9 * norms[j]:
                if found is None or lam > found[1]:
                    found = (V[i].copy(), float(lam))
    return found


@dataclass(frozen=True)
class Verdict:
    """Outcome of one sampled axiom check: True / False / None (unknown)."""

    passed: bool | None
    witness: object = None
    note: str = ""


@dataclass(frozen=True)
class AxiomReport:
    k_monotone: Verdict
    strictly_monotone: Verdict
    level_set_eq: Verdict
    strict_level_set_eq: Verdict
    slater: Verdict

    @property
    def all_pass(self) -> bool:
        return all(
            v.passed for v in (
                self.k_monotone,
                self.strictly_monotone,
                self.level_set_eq,
                self.strict_level_set_eq,
                self.slater,
            )
        )


def _batch_values(f, Y, tol):
    if isinstance(f, HUFunctional):
        return f.value_batch(Y, tol)
    return f.value_batch(Y)


def axiom_report(
    f: ScalFun,
    K: PolyCone,
    n_samples: int = 1000,
    seed: int = 0,
    box: float = 5.0,
    tol: Tolerances = DEFAULT_TOL,
) -> AxiomReport:
    """Sampled audit of monotonicity, order representability and the
    existence of a strictly negative value.

    Every negative verdict carries a concrete witness; positive verdicts are
    sampled evidence, not proofs (note="sampled").
    """
    _require_ordering_cone(K, tol)
    rng = np.random.default_rng(seed)
    n = K.dim
    R = K.rays
    u = K.interior_point()

    Y = rng.uniform(-box, box, size=(n_samples, n))
    Kk = rng.uniform(0.0, 1.5, size=(n_samples, R.shape[0])) @ R
    Kint = Kk + rng.uniform(0.3, 1.2, size=(n_samples, 1)) * u

    vals_y = _batch_values(f, Y, tol)
    vals_mon = _batch_values(f, Y + Kk, tol)
    vals_strict = _batch_values(f, Y + Kint, tol)

    k_mon = Verdict(True, None, "sampled")
    bad = np.flatnonzero(vals_mon < vals_y - tol.eps_cmp)
    if bad.size:
        i = int(bad[0])
        k_mon = Verdict(False, (Y[i], Kk[i], float(vals_y[i]), float(vals_mon[i])))

    s_mon = Verdict(True, None, "sampled")
    bad = np.flatnonzero(vals_strict <= vals_y + tol.eps_cmp)
    if bad.size:
        i = int(bad[0])
        s_mon = Verdict(False, (Y[i], Kint[i], float(vals_y[i]), float(vals_strict[i])))

    negK = K.negated()
    slacks = np.min(Y @ negK.facets.T, axis=1)
    lvl = Verdict(True, None, "sampled")
    strict_lvl = Verdict(True, None, "sampled")
    for i in range(n_samples):
        v, s = float(vals_y[i]), float(slacks[i])
        if abs(v) > tol.eps_strict and abs(s) > tol.eps_strict:
            if (v < 0.0) != (s > 0.0):
                lvl = Verdict(False, (Y[i], v, s))
                break
    for i in range(n_samples):
        v, s = float(vals_y[i]), float(slacks[i])
        if abs(v) > tol.eps_strict and abs(s) > tol.eps_strict:
            if (v < -tol.eps_strict) != (s > tol.eps_strict):
                strict_lvl = Verdict(False, (Y[i], v, s))
                break

    slater = Verdict(None, None, "no strictly negative sample found (sampled)")
    probes = np.vstack([-u[None, :] * np.array([[1.0], [3.0]]), Y])
    pv = _batch_values(f, probes, tol)
    neg = np.flatnonzero(pv < -tol.eps_strict)
    if neg.size:
        i = int(neg[0])
        slater = Verdict(True, (probes[i], float(pv[i])), "sampled")
    return AxiomReport(k_mon, s_mon, lvl, strict_lvl, slater)


def quarter_arc_hull(n_points: int = 720) -> Polytope:
    """Hull of unit-circle samples over the closed first-quadrant arc."""
    th = np.linspace(0.0, np.pi / 2.0, n_points)
    return hull(np.column_stack([np.cos(th), np.sin(th)]))


def bumped_arc_hull() -> Polytope:
    """Half-arc polygon plus an outward point on the 45-degree ray.

    All arc samples stay on one side of the ray x = y, so the 45-degree arc
    vertex and the bump (3/4, 3/4) are both extreme and exactly positively
    collinear: a gauge-obstruction witness with ratio 3/(2 sqrt 2).
    """
    th = np.linspace(0.0, np.pi / 4.0, 361)
    pts = np.column_stack([np.cos(th), np.sin(th)])
    pts = np.vstack([pts, [[0.75, 0.75]]])
    return hull(pts)
