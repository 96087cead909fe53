"""Set relations up to a cone, face-wise relation over all directions, and
minimal elements.

A set D in the dual space induces lower / upper / set-less comparisons of
compact convex sets: H is lower-less than G when G is covered by H + D,
upper-less when H is covered by G - D, set-less when both hold.  Punctured
(D without 0) and interior (int D) strictness are certified by an explicit
displacement of norm >= eps_strict, or an interior-margin displacement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone import PolyCone
from .numkernel import DEFAULT_TOL, DimensionMismatch, LpProblem, Tolerances, solve_lp
from .polytope import Polytope, fan_refinement, hull

_MU_CAP = 1.0e6


@dataclass(frozen=True)
class RelationKind:
    """tag in {lower, upper, set}; strictness in {weak, punctured, interior}."""

    tag: str
    strictness: str = "weak"

    def __post_init__(self):
        if self.tag not in ("lower", "upper", "set"):
            raise ValueError(f"unknown relation tag {self.tag!r}")
        if self.strictness not in ("weak", "punctured", "interior"):
            raise ValueError(f"unknown strictness {self.strictness!r}")


LOWER = RelationKind("lower")
UPPER = RelationKind("upper")
SET = RelationKind("set")


@dataclass(frozen=True)
class RelationResult:
    """Verdict with a witness vertex on failure; `unknown` marks verdicts the
    configured margins cannot certify (e.g. interior strictness against a
    non-solid cone, or a displacement below eps_strict)."""

    holds: bool
    unknown: bool = False
    witness: object = None
    note: str = ""

    def __bool__(self) -> bool:
        return self.holds


def _vertex_in_sum(v, P: Polytope, D: PolyCone, sign: float, strictness: str, tol: Tolerances):
    """Decide v in P + sign*D (with the requested strictness certificate).

    Returns (feasible, unknown).  Variables are the convex coefficients on
    P's vertices and conic coefficients on D's rays.
    """
    V, R = P.vertices, D.rays
    k, m = V.shape[0], R.shape[0]
    n = P.dim
    gen = np.hstack([V.T, sign * R.T]) if m else V.T  # (n, k+m) columns
    nv = k + m

    cons = [(gen[j], float(v[j]), "=") for j in range(n)]
    lam_sel = np.concatenate([np.ones(k), np.zeros(m)])
    cons.append((lam_sel, 1.0, "="))
    cons += [(-np.eye(nv)[i], 0.0, "<=") for i in range(nv)]

    if strictness == "interior":
        if not D.is_solid(tol):
            return False, True  # NotApplicable: int D is empty
        for c in D.facets:
            row = np.concatenate([np.zeros(k), R @ c])
            cons.append((-row, -tol.eps_strict, "<="))
        res = solve_lp(LpProblem(np.zeros(nv), cons, "min"), tol)
        return res.is_optimal, False

    if strictness == "weak" or m == 0:
        res = solve_lp(LpProblem(np.zeros(nv), cons, "min"), tol)
        if strictness == "weak":
            return res.is_optimal, False
        return False, False  # punctured against a trivial cone never holds

    cons += [(np.eye(nv)[k + i], _MU_CAP, "<=") for i in range(m)]
    obj = np.concatenate([np.zeros(k), np.ones(m)])
    res = solve_lp(LpProblem(obj, cons, "max"), tol)
    if not res.is_optimal:
        return False, False
    mu = res.point[k:]
    disp = R.T @ mu
    if np.linalg.norm(disp) >= tol.eps_strict:
        return True, False
    # Feasible only with a near-zero displacement: cannot certify D\{0}.
    return False, True


def relate(H: Polytope, G: Polytope, D: PolyCone, kind: RelationKind,
           tol: Tolerances = DEFAULT_TOL) -> RelationResult:
    """Does H relate to G (lower / upper / set) with respect to D?

    Containment is decided vertex by vertex: the covering sets H + D and
    G - D are convex, so checking G's (resp. H's) vertices is exact.
    """
    if H.dim != G.dim or G.dim != D.dim:
        raise DimensionMismatch("H, G and D must share the ambient dimension")
    unknown = False
    if kind.tag in ("lower", "set"):
        for g in G.vertices:
            ok, unk = _vertex_in_sum(g, H, D, 1.0, kind.strictness, tol)
            unknown = unknown or unk
            if not ok:
                return RelationResult(False, unk, g, "vertex of G escapes H + D")
    if kind.tag in ("upper", "set"):
        for h in H.vertices:
            ok, unk = _vertex_in_sum(h, G, D, -1.0, kind.strictness, tol)
            unknown = unknown or unk
            if not ok:
                return RelationResult(False, unk, h, "vertex of H escapes G - D")
    return RelationResult(True, unknown)


@dataclass(frozen=True)
class FaceRelationReport:
    """Face-wise relation quantified over all directions.

    `holds` is exact only when `exact` is set (ambient dimension <= 3);
    sampled mode can only report sampled evidence."""

    holds: bool
    exact: bool
    witness: np.ndarray | None = None
    unknown: bool = False


def y_face_relation_all(G: Polytope, H: Polytope, D: PolyCone, kind: RelationKind,
                        tol: Tolerances = DEFAULT_TOL) -> FaceRelationReport:
    """Check relate(H^y, G^y, D, kind) on every cell of the common normal-fan
    refinement; the exposed faces are constant on each cell, so cell
    representatives discharge the quantifier over all nonzero directions."""
    cells = fan_refinement(G, H, tol)
    exact = not any(c.sampled for c in cells)
    unknown = False
    for c in cells:
        Gy = hull(G.vertices[list(c.g_face)], tol)
        Hy = hull(H.vertices[list(c.h_face)], tol)
        rr = relate(Hy, Gy, D, kind, tol)
        unknown = unknown or rr.unknown
        if not rr.holds:
            return FaceRelationReport(False, exact, c.representative, rr.unknown)
    return FaceRelationReport(True, exact, None, unknown)


def minimal_elements(P: Polytope, D: PolyCone, tol: Tolerances = DEFAULT_TOL):
    """Vertices of P not dominated through D \\ {0}.

    A vertex v is dominated when some p in P and nonzero d in D give
    v = p + d; the nonzero certificate needs displacement >= eps_strict.
    """
    if not D.is_pointed(tol):
        raise ValueError("minimal elements need a pointed cone")
    out = []
    for v in P.vertices:
        dominated, _ = _vertex_in_sum(v, P, D, 1.0, "punctured", tol)
        if not dominated:
            out.append(v.copy())
    return out
