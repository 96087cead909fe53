"""Scalarization-pair machinery for support-difference functionals.

A pair of compact convex sets [G, H] is accepted when (i) the exposed faces
satisfy the set-less relation w.r.t. the dual cone in every direction,
(ii) G and H are disjoint, and (iii) the zero sublevel set of
sigma_G - sigma_H is contained in -K.  Accepted pairs produce an order-
representing monotone functional; the erosion G (-) H is its lower
(directional-derivative) subdifferential at 0, the hull of cell gradients
its Michel-Penot-type upper one, and the two cones they generate sandwich
the dual cone.  Constructors deliver pairs whose functional is provably not
a plain support functional (nonconvex), in closed form on the line and by
the two-dimensional geometric construction with its verification chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone import PolyCone, dual_cone, generators_from_halfspace_rows, membership
from .numkernel import DEFAULT_TOL, DimensionMismatch, LpProblem, Tolerances, solve_lp
from .polytope import FanCell, GenPolyhedron, Polytope, fan_refinement, hull, minkowski_sum, pontryagin_diff, vertices_from_halfspaces
from .scalarize import QDFunctional
from .setrel import SET, FaceRelationReport, y_face_relation_all


class NotSolid(ValueError):
    """Ordering cone has empty interior."""


class NotPointed(ValueError):
    """Ordering cone contains a line."""


class PairInvalid(ValueError):
    """Operation requires a validated scalarization pair."""


class PreconditionViolated(ValueError):
    """Constructor parameters break a stated inequality."""


class ConstructionFailed(RuntimeError):
    """A verification stage of a constructor did not pass."""

    def __init__(self, stage, detail=""):
        super().__init__(f"construction failed at stage {stage!r}: {detail}")
        self.stage = stage


@dataclass(frozen=True)
class Verdict:
    passed: bool
    witness: object = None
    note: str = ""


@dataclass(frozen=True)
class DsResult:
    is_ds: bool
    generator: Polytope | None = None


@dataclass(frozen=True)
class ConvexityResult:
    convex: bool
    witness: tuple | None = None  # (y1, y2, gap)


@dataclass(frozen=True)
class PairReport:
    cond_faces: Verdict
    cond_disjoint: Verdict
    cond_repr: Verdict
    ds: DsResult
    convexity: ConvexityResult

    @property
    def passed(self) -> bool:
        return self.cond_faces.passed and self.cond_disjoint.passed and self.cond_repr.passed


@dataclass(frozen=True)
class MpSubdiff:
    """Hull of the full-dimensional fan-cell gradients of sigma_G - sigma_H."""

    hull: Polytope
    gradients: np.ndarray


def dh_subdiff(G: Polytope, H: Polytope, tol: Tolerances = DEFAULT_TOL):
    """Lower subdifferential at 0 of sigma_G - sigma_H: the erosion G (-) H.

    None encodes the empty set (the functional then has no linear minorant
    matching its directional derivative)."""
    return pontryagin_diff(G, H, tol)


def _cell_gradient(G, H, cell):
    g = G.vertices[cell.g_face[0]]
    h = H.vertices[cell.h_face[0]]
    return g - h


def mp_subdiff0(G: Polytope, H: Polytope, tol: Tolerances = DEFAULT_TOL) -> MpSubdiff:
    """Upper subdifferential at 0: hull of the gradients attained on the
    full-dimensional cells of the common fan refinement.

    For piecewise-linear positively homogeneous functionals this hull's
    support equals sup over z of [psi(v+z) - psi(z)], which the test suite
    cross-validates against the definitional oracle."""
    cells = fan_refinement(G, H, tol)
    n = G.dim
    grads = [
        _cell_gradient(G, H, c)
        for c in cells
        if c.dim == n or c.sampled
    ]
    if not grads:  # both sets are points: a single linear piece
        grads = [G.vertices[0] - H.vertices[0]]
    grads = np.array(grads)
    return MpSubdiff(hull(grads, tol), grads)


def _intersection_point(G: Polytope, H: Polytope, tol: Tolerances):
    """A common point of G and H, or None when disjoint (LP feasibility)."""
    kg, kh = G.n_vertices, H.n_vertices
    gen = np.hstack([G.vertices.T, -H.vertices.T])
    n = G.dim
    cons = [(gen[j], 0.0, "=") for j in range(n)]
    sel_g = np.concatenate([np.ones(kg), np.zeros(kh)])
    sel_h = np.concatenate([np.zeros(kg), np.ones(kh)])
    cons.append((sel_g, 1.0, "="))
    cons.append((sel_h, 1.0, "="))
    cons += [(-np.eye(kg + kh)[i], 0.0, "<=") for i in range(kg + kh)]
    res = solve_lp(LpProblem(np.zeros(kg + kh), cons, "min"), tol)
    if not res.is_optimal:
        return None
    lam = res.point[:kg]
    return G.vertices.T @ lam


def _full_cells(G, H, cells):
    n = G.dim
    return [c for c in cells if c.dim == n]


def _cell_rows(G, H, cell):
    """Halfspace rows (>= 0 form) of a full-dimensional fan cell."""
    rows = []
    g0 = G.vertices[cell.g_face[0]]
    for w in range(G.n_vertices):
        if w != cell.g_face[0]:
            rows.append(g0 - G.vertices[w])
    h0 = H.vertices[cell.h_face[0]]
    for w in range(H.n_vertices):
        if w != cell.h_face[0]:
            rows.append(h0 - H.vertices[w])
    return rows


def validate_pair(G: Polytope, H: Polytope, K: PolyCone, tol: Tolerances = DEFAULT_TOL) -> PairReport:
    """Check the three pair axioms and attach the convexity diagnosis.

    (i) face-wise set-less relation w.r.t. K* over all directions, (ii)
    disjointness by an intersection LP, (iii) on every full-dimensional fan
    cell with gradient w, the sliced cone cell & {<w,y> <= 0} must sit
    inside -K (checked on its generators)."""
    if G.dim != H.dim or G.dim != K.dim:
        raise DimensionMismatch("G, H, K must share the ambient dimension")
    if not K.is_solid(tol):
        raise NotSolid("ordering cone must be solid")
    if not K.is_pointed(tol):
        raise NotPointed("ordering cone must be pointed")
    Kstar = dual_cone(K, tol)
    negK = K.negated()

    faces_rep = y_face_relation_all(G, H, Kstar, SET, tol)
    cond_faces = Verdict(faces_rep.holds, faces_rep.witness,
                         "exact" if faces_rep.exact else "sampled")

    pt = _intersection_point(G, H, tol)
    cond_disjoint = Verdict(pt is None, pt)

    cells = fan_refinement(G, H, tol)
    cond_repr = Verdict(True, None, "exact")
    for c in _full_cells(G, H, cells):
        w = _cell_gradient(G, H, c)
        rows = _cell_rows(G, H, c) + [-w]
        gens = generators_from_halfspace_rows(np.array(rows), G.dim, tol)
        for gvec in gens:
            if not negK.contains(gvec, tol):
                cond_repr = Verdict(False, gvec,
                                    "direction with psi <= 0 outside -K")
                break
        if not cond_repr.passed:
            break

    ds = is_ds(G, H, tol)
    viol = subadditivity_violation(G, H, tol)
    convexity = ConvexityResult(viol is None, viol)
    return PairReport(cond_faces, cond_disjoint, cond_repr, ds, convexity)


def is_ds(G: Polytope, H: Polytope, tol: Tolerances = DEFAULT_TOL) -> DsResult:
    """Is sigma_G - sigma_H a plain support functional?  Yes exactly when
    H + (G (-) H) reassembles G; the erosion is then the generator."""
    if G.dim != H.dim:
        raise DimensionMismatch("G and H must share the ambient dimension")
    D = pontryagin_diff(G, H, tol)
    if D is None:
        return DsResult(False, None)
    if minkowski_sum(H, D, tol).same_set(G, tol):
        return DsResult(True, D)
    return DsResult(False, None)


def subadditivity_violation(G: Polytope, H: Polytope, tol: Tolerances = DEFAULT_TOL):
    """Search for directions with psi(y1+y2) > psi(y1) + psi(y2) + eps_strict.

    A representative-pair scan runs first; every wall between adjacent
    full-dimensional fan cells is then probed with a straddling pair, which
    decides piecewise-linear convexity exactly.  Returns (y1, y2, gap) or
    None."""
    psi = QDFunctional(G, H)
    cells = fan_refinement(G, H, tol)
    n = G.dim
    reps = np.array([c.representative for c in cells])
    vals = psi.value_batch(reps)
    best = None
    for i in range(len(cells)):
        sums = reps[i][None, :] + reps
        F = vals[i] + vals - psi.value_batch(sums)
        j = int(np.argmin(F))
        if F[j] < -tol.eps_strict:
            gap = -float(F[j])
            if best is None or gap > best[2]:
                best = (reps[i].copy(), reps[j].copy(), gap)
    if best is not None:
        return best

    walls = [c for c in cells if c.dim == n - 1 and not c.sampled]
    for wcell in walls:
        span = _wall_span(G, H, wcell, tol)
        if span is None:
            continue
        t_hat = span
        base = wcell.representative
        for tau in (0.5, 0.2, 0.05, 0.01):
            y1 = base - tau * t_hat
            y2 = base + tau * t_hat
            F = psi.value(y1) + psi.value(y2) - psi.value(y1 + y2)
            if F < -tol.eps_strict:
                return (y1, y2, -float(F))
    return None


def _wall_span(G, H, wcell, tol):
    """Unit transversal direction across a codimension-1 fan cell."""
    rows = []
    for P, face in ((G, wcell.g_face), (H, wcell.h_face)):
        v0 = P.vertices[face[0]]
        for i in face[1:]:
            rows.append(P.vertices[i] - v0)
    n = G.dim
    if not rows:
        return None
    E = np.array(rows)
    _, s, Vt = np.linalg.svd(E, full_matrices=True)
    rank = int(np.sum(s > 1e-9 * max(s[0], 1.0))) if s.size else 0
    if n - rank != n - 1:
        return None  # not a wall of the refinement
    t_hat = Vt[0] if rank == 1 else Vt[rank - 1]
    # Orient away from the wall's own span: any unit vector of the row space.
    t_hat = Vt[0]
    return t_hat / np.linalg.norm(t_hat)


@dataclass(frozen=True)
class SandwichReport:
    lower_holds: bool
    upper_holds: bool
    lower_is_equality: bool
    upper_is_equality: bool
    dh: Polytope | None
    mp: MpSubdiff

    @property
    def passed(self) -> bool:
        return self.lower_holds and self.upper_holds


def _in_cone_of(s, M: np.ndarray, tol: Tolerances) -> bool:
    """Is s a nonnegative combination of the rows of M?"""
    k = M.shape[0]
    cons = [(M.T[j], float(s[j]), "=") for j in range(M.shape[1])]
    cons += [(-np.eye(k)[i], 0.0, "<=") for i in range(k)]
    return solve_lp(LpProblem(np.zeros(k), cons, "min"), tol).is_optimal


def dual_sandwich_check(G: Polytope, H: Polytope, K: PolyCone,
                        tol: Tolerances = DEFAULT_TOL,
                        report: PairReport | None = None) -> SandwichReport:
    """cone(G (-) H) inside K* inside cone(mp hull), with equality flags.

    Requires a validated pair (the zero sublevel set is then exactly -K);
    cone of the empty erosion is {0}."""
    if report is None:
        report = validate_pair(G, H, K, tol)
    if not report.passed:
        raise PairInvalid("pair does not satisfy the three axioms")
    Kstar = dual_cone(K, tol)
    D = dh_subdiff(G, H, tol)
    mp = mp_subdiff0(G, H, tol)

    lower = True
    if D is not None:
        lower = all(Kstar.contains(v, tol) for v in D.vertices)
    upper = all(_in_cone_of(s, mp.hull.vertices, tol) for s in Kstar.rays)
    lower_eq = (
        D is not None
        and lower
        and all(_in_cone_of(s, D.vertices, tol) for s in Kstar.rays)
    )
    upper_eq = upper and all(Kstar.contains(v, tol) for v in mp.hull.vertices)
    return SandwichReport(lower, upper, lower_eq, upper_eq, D, mp)


def build_nonconvex_pair_1d(a: float, b: float, c: float, d: float,
                            tol: Tolerances = DEFAULT_TOL):
    """Intervals G=[a,b], H=[c,d] forming a valid pair with empty erosion.

    Requires a > d (validity), b >= a and d >= c (interval order), and
    b - d < a - c (empty erosion, hence a nonconvex functional)."""
    checks = [
        (a > d, f"a > d fails: {a} <= {d}"),
        (b >= a, f"b >= a fails: {b} < {a}"),
        (d >= c, f"d >= c fails: {d} < {c}"),
        (b - d < a - c, f"b - d < a - c fails: {b - d} >= {a - c}"),
    ]
    for ok, msg in checks:
        if not ok:
            raise PreconditionViolated(msg)
    G = hull(np.array([[a], [b]]), tol)
    H = hull(np.array([[c], [d]]), tol)
    report = validate_pair(G, H, PolyCone.orthant(1), tol)
    if not report.passed:
        raise ConstructionFailed("validate", "interval pair failed the axioms")
    if report.ds.is_ds:
        raise ConstructionFailed("non_ds", "erosion unexpectedly reassembles G")
    return G, H


@dataclass(frozen=True)
class NonConvexPair2d:
    """Constructed planar pair with its verification certificates."""

    G: Polytope
    H: Polytope
    B: Polytope
    p_star: np.ndarray
    report: PairReport
    violation: tuple  # (y1, y2, gap)

    def __iter__(self):
        return iter((self.G, self.H))


def build_nonconvex_pair_2d(K: PolyCone, r, tol: Tolerances = DEFAULT_TOL) -> NonConvexPair2d:
    """Planar constructor for a valid pair whose functional is nonconvex.

    Stages: the slice B of K* through r; a deep interior dual point p*
    scaled so B sits inside p* - K*; G as the truncated sweep
    (B + K*) & (p* - K*); H as the shrunken hull of B and the vertices of G
    exposed where p* is suboptimal.  Every stage's output is verified, and
    the final pair must pass validation, fail the support-reassembly test,
    and exhibit an explicit subadditivity violation."""
    from .scalarize import gw_subdiff0  # local import to avoid cycles at load

    if K.dim != 2:
        raise ConstructionFailed("precondition", "constructor is planar only")
    if not K.is_solid(tol):
        raise ConstructionFailed("precondition", "K must be solid")
    if not K.is_pointed(tol):
        raise ConstructionFailed("precondition", "K must be pointed")
    r = np.asarray(r, dtype=float)
    if membership(K, r, tol) != "interior":
        raise ConstructionFailed("precondition", "r must be interior to K")
    Kstar = dual_cone(K, tol)
    if not Kstar.is_solid(tol):
        raise ConstructionFailed("precondition", "dual cone must be solid")

    B = gw_subdiff0(K, r, tol)
    v_star = Kstar.interior_point()
    eps = float(np.min(Kstar.facets @ v_star))
    if eps <= tol.eps_strict:
        raise ConstructionFailed("pstar", "interior margin of v* is degenerate")
    M = float(np.max(np.linalg.norm(B.vertices, axis=1)))
    p_star = (M / eps) * v_star

    swept = GenPolyhedron(B, Kstar)
    A1, b1 = swept.halfspaces(tol)
    A2 = Kstar.facets
    b2 = A2 @ p_star
    cand = vertices_from_halfspaces(np.vstack([A1, A2]), np.concatenate([b1, b2]), tol)
    if cand is None:
        raise ConstructionFailed("G", "halfspace intersection is empty")
    G = hull(cand, tol)
    for bv in B.vertices:
        if not G.contains(bv, tol):
            raise ConstructionFailed("G", "slice polytope escapes the sweep")

    exposed = []
    for i, g in enumerate(G.vertices):
        if np.linalg.norm(g - p_star) <= tol.eps_feas:
            continue
        rows = [g - G.vertices[w] for w in range(G.n_vertices) if w != i]
        n = 2
        cons = [(-np.asarray(row), 0.0, "<=") for row in rows]
        cons += [(np.eye(n)[j] * s, 1.0, "<=") for j in range(n) for s in (1.0, -1.0)]
        res = solve_lp(LpProblem(g - p_star, cons, "max"), tol)
        if res.is_optimal and res.value > tol.eps_strict:
            exposed.append(g)
    if not exposed:
        raise ConstructionFailed("exposed", "no vertex is exposed away from p*")

    H_tilde = hull(np.vstack([np.array(exposed), B.vertices]), tol)
    beta = float(np.min(np.linalg.norm(B.vertices, axis=1)))
    gamma = float(np.max(np.linalg.norm(H_tilde.vertices, axis=1)))
    H = H_tilde.scale(beta / (2.0 * gamma))

    report = validate_pair(G, H, K, tol)
    if not report.passed:
        raise ConstructionFailed("validate", "constructed pair fails the axioms")
    if report.ds.is_ds:
        raise ConstructionFailed("non_ds", "constructed functional is convex")
    viol = report.convexity.witness or subadditivity_violation(G, H, tol)
    if viol is None or viol[2] < tol.eps_strict:
        raise ConstructionFailed("nonconvexity", "no subadditivity violation found")
    return NonConvexPair2d(G, H, B, p_star, report, viol)
