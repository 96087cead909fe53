"""Exact polytope algebra in small ambient dimension.

Vertex and halfspace representations are kept synchronized by construction:
`hull` reduces a point cloud to its affine hull, extracts extreme points
(monotone chain in intrinsic dimension 2, LP separation plus combination
facet enumeration in 3..6), and maps local facets back to ambient
coordinates together with affine-hull equality pairs.  On top of that live
support faces, Minkowski sums, the Pontryagin (erosion) difference and the
common refinement of two normal fans.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .numkernel import (
    DEFAULT_TOL,
    DimensionMismatch,
    LpProblem,
    LpStatus,
    Tolerances,
    solve_lp,
)


class EmptyInput(ValueError):
    """hull() called with no points."""


def _read_only(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _dedup_points(P, decimals=10):
    _, idx = np.unique(np.round(P, decimals=decimals), axis=0, return_index=True)
    return P[np.sort(idx)]


class Polytope:
    """Bounded convex set with irredundant vertices and a matching H-form.

    `vertices` is a (k, n) array; `halfspaces` is the pair (A, b) meaning
    <A[i], x> <= b[i].  Lower-dimensional sets carry their affine hull as
    paired opposite inequalities.  Instances are immutable; build them with
    :func:`hull`.
    """

    __slots__ = ("vertices", "A", "b", "dim")

    def __init__(self, vertices, A, b):
        self.vertices = _read_only(np.atleast_2d(vertices))
        self.A = _read_only(np.atleast_2d(A))
        self.b = _read_only(np.asarray(b, dtype=float))
        self.dim = self.vertices.shape[1]

    @property
    def halfspaces(self):
        return self.A, self.b

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def contains(self, x, tol: Tolerances = DEFAULT_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch("point dimension mismatch")
        return bool(np.all(self.A @ x <= self.b + tol.eps_feas))

    def support_value(self, y) -> float:
        return float(np.max(self.vertices @ np.asarray(y, dtype=float)))

    def support_argmax(self, y, tol: Tolerances = DEFAULT_TOL):
        """Indices of all vertices within eps_cmp of the maximum."""
        vals = self.vertices @ np.asarray(y, dtype=float)
        return tuple(int(i) for i in np.flatnonzero(vals >= np.max(vals) - tol.eps_cmp))

    def scale(self, t: float) -> "Polytope":
        if t < 0:
            return hull(t * self.vertices)
        return Polytope(t * self.vertices, self.A, t * self.b)

    def translate(self, v) -> "Polytope":
        v = np.asarray(v, dtype=float)
        return Polytope(self.vertices + v, self.A, self.b + self.A @ v)

    def same_set(self, other: "Polytope", tol: Tolerances = DEFAULT_TOL) -> bool:
        """Mutual containment of vertex sets in the other's H-form."""
        if self.dim != other.dim:
            raise DimensionMismatch("ambient dimension mismatch")
        ok1 = np.all(other.A @ self.vertices.T <= other.b[:, None] + tol.eps_feas)
        ok2 = np.all(self.A @ other.vertices.T <= self.b[:, None] + tol.eps_feas)
        return bool(ok1 and ok2)

    def validate(self, tol: Tolerances = DEFAULT_TOL):
        """Re-check the representation invariants (raises AssertionError).

        Every vertex satisfies every halfspace; every vertex is extreme
        (strict LP separation from the others); H->V candidates stay inside
        the vertex hull.
        """
        V, (A, b) = self.vertices, self.halfspaces
        assert np.all(A @ V.T <= b[:, None] + tol.eps_feas), "vertex violates halfspace"
        for i in range(self.n_vertices):
            if self.n_vertices == 1:
                break
            others = np.delete(V, i, axis=0)
            cons = [(q - V[i], -1.0, "<=") for q in others]
            res = solve_lp(LpProblem(np.zeros(self.dim), cons, "min"), tol)
            assert res.is_optimal, f"vertex {i} is not extreme"
        cand = vertices_from_halfspaces(A, b, tol)
        assert cand is not None, "halfspace system is infeasible"
        for x in cand:
            k = self.n_vertices
            cons = [(V.T[j], float(x[j]), "=") for j in range(self.dim)]
            cons.append((np.ones(k), 1.0, "="))
            cons += [(-np.eye(k)[i], 0.0, "<=") for i in range(k)]
            res = solve_lp(LpProblem(np.zeros(k), cons, "min"), tol)
            assert res.is_optimal, "H-form corner escapes the vertex hull"

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={self.n_vertices}, facets={len(self.b)})"


def _affine_basis(P, tol_rank=1e-9):
    """Centroid, orthonormal basis of the affine span, and its complement."""
    c = P.mean(axis=0)
    M = P - c
    if M.shape[0] == 1:
        n = P.shape[1]
        return c, np.zeros((n, 0)), np.eye(n)
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    cutoff = tol_rank * max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.sum(s > cutoff))
    return c, Vt[:rank].T, Vt[rank:].T


def _monotone_chain(L, cross_tol):
    """Indices of the convex hull of 2-D points L, counterclockwise."""
    order = np.lexsort((L[:, 1], L[:, 0]))

    def half(ordering):
        out = []
        for i in ordering:
            while len(out) >= 2:
                o, a = L[out[-2]], L[out[-1]]
                cross = (a[0] - o[0]) * (L[i][1] - o[1]) - (a[1] - o[1]) * (L[i][0] - o[0])
                if cross <= cross_tol:
                    out.pop()
                else:
                    break
            out.append(i)
        return out

    lower = half(order)
    upper = half(order[::-1])
    return lower[:-1] + upper[:-1]


def _extreme_filter_lp(L, tol):
    """Extreme points of a full-dimensional cloud via strict LP separation."""
    keep = []
    for i in range(L.shape[0]):
        others = np.delete(L, i, axis=0)
        cons = [(q - L[i], -1.0, "<=") for q in others]
        res = solve_lp(LpProblem(np.zeros(L.shape[1]), cons, "min"), tol)
        if res.is_optimal:
            keep.append(i)
    return keep


def _facets_by_combinations(L, tol):
    """Supporting hyperplanes of a full-dimensional cloud touching a facet.

    Tries every d-subset, keeps one-sided hyperplanes whose contact set has
    affine rank d-1 (true facets), deduplicates by rounded normal form.
    """
    d = L.shape[1]
    scale = float(np.max(np.abs(L))) + 1.0
    ftol = 1e-9 * scale
    seen = {}
    for S in itertools.combinations(range(L.shape[0]), d):
        pts = L[list(S)]
        M = pts[1:] - pts[0]
        _, s, Vt = np.linalg.svd(M, full_matrices=True)
        rank = int(np.sum(s > 1e-9 * max(s[0], 1.0))) if s.size else 0
        if rank < d - 1:
            continue  # points span less than a hyperplane
        a = Vt[-1]
        off = float(a @ pts[0])
        vals = L @ a
        if np.all(vals <= off + ftol):
            pass
        elif np.all(vals >= off - ftol):
            a, off, vals = -a, -off, -vals
        else:
            continue
        contact = L[vals >= off - ftol]
        _, cb, _ = _affine_basis(contact)
        if cb.shape[1] < d - 1:
            continue
        key = tuple(np.round(np.concatenate([a, [off]]), 9))
        if key not in seen:
            seen[key] = (a, off)
    return list(seen.values())


def hull(points, tol: Tolerances = DEFAULT_TOL) -> Polytope:
    """Convex hull with minimal vertices and affine-hull-aware halfspaces."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        raise EmptyInput("hull of no points")
    n = P.shape[1]
    P = _dedup_points(P)
    c, W, Wc = _affine_basis(P)
    d = W.shape[1]
    L = (P - c) @ W  # local coordinates, full-dimensional by construction
    scale = float(np.max(np.abs(L))) + 1.0 if L.size else 1.0

    local_facets = []  # (normal in R^d, offset)
    if d == 0:
        keep = [0]
    elif d == 1:
        t = L[:, 0]
        i_min, i_max = int(np.argmin(t)), int(np.argmax(t))
        keep = [i_min] if i_min == i_max else [i_min, i_max]
        local_facets = [(np.array([1.0]), float(t[i_max])), (np.array([-1.0]), float(-t[i_min]))]
    elif d == 2:
        keep = _monotone_chain(L, 1e-12 * scale * scale)
        V = L[keep]
        for i in range(len(keep)):
            e = V[(i + 1) % len(keep)] - V[i]
            a = np.array([e[1], -e[0]])
            a /= np.linalg.norm(a)
            local_facets.append((a, float(a @ V[i])))
    else:
        keep = _extreme_filter_lp(L, tol)
        local_facets = _facets_by_combinations(L[keep], tol)

    vertices = P[keep]
    A_rows, b_rows = [], []
    for a, off in local_facets:
        a_amb = W @ a
        nrm = np.linalg.norm(a_amb)
        A_rows.append(a_amb / nrm)
        b_rows.append((off + float(a_amb @ c)) / nrm)
    for j in range(Wc.shape[1]):
        w = Wc[:, j]
        off = float(w @ c)
        A_rows.append(w)
        b_rows.append(off)
        A_rows.append(-w)
        b_rows.append(-off)
    if not A_rows:  # single point in R^0-like edge case cannot happen (n>=1)
        A_rows = np.zeros((0, n))
        b_rows = np.zeros(0)
    return Polytope(vertices, np.array(A_rows), np.array(b_rows))


def support(P: Polytope, y, tol: Tolerances = DEFAULT_TOL):
    """Support value of P in direction y and the exposed face polytope."""
    y = np.asarray(y, dtype=float)
    idx = P.support_argmax(y, tol)
    return P.support_value(y), hull(P.vertices[list(idx)], tol)


def minkowski_sum(P: Polytope, Q: Polytope, tol: Tolerances = DEFAULT_TOL) -> Polytope:
    if P.dim != Q.dim:
        raise DimensionMismatch("ambient dimension mismatch")
    sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.dim)
    return hull(sums, tol)


def vertices_from_halfspaces(A, b, tol: Tolerances = DEFAULT_TOL):
    """All basic feasible points of {x : Ax <= b}, or None if infeasible.

    Assumes the feasible set is bounded.  Candidates come from every
    n-subset of rows with an invertible system; hull() of the result gives
    the clean polytope.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    feas = solve_lp(LpProblem(np.zeros(n), [(A[i], b[i], "<=") for i in range(m)], "min"), tol)
    if feas.status is LpStatus.INFEASIBLE:
        return None
    scale = float(np.max(np.abs(b))) + 1.0
    pts = [feas.point]
    for S in itertools.combinations(range(m), n):
        A_S = A[list(S)]
        if abs(np.linalg.det(A_S)) < 1e-10:
            continue
        x = np.linalg.solve(A_S, b[list(S)])
        if np.all(A @ x <= b + 1e-7 * scale):
            pts.append(x)
    return _dedup_points(np.array(pts))


def pontryagin_diff(G: Polytope, H: Polytope, tol: Tolerances = DEFAULT_TOL):
    """Erosion {x : x + H subset of G}; None when the system is infeasible."""
    if G.dim != H.dim:
        raise DimensionMismatch("ambient dimension mismatch")
    A, b = G.halfspaces
    shrink = np.max(H.vertices @ A.T, axis=0)  # support of H at each normal
    cand = vertices_from_halfspaces(A, b - shrink, tol)
    if cand is None:
        return None
    return hull(cand, tol)


@dataclass(frozen=True)
class FanCell:
    """One cell of the common refinement of two normal fans.

    `g_face` / `h_face` are the vertex-index sets exposed throughout the
    cell's relative interior; `dim` is the cell dimension (>= 1).
    """

    representative: np.ndarray
    g_face: tuple
    h_face: tuple
    dim: int
    sampled: bool = False


def _ccw_order(P: Polytope):
    """Vertex indices of a 2-D polytope in counterclockwise order."""
    V = P.vertices
    c = V.mean(axis=0)
    ang = np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0])
    return list(np.argsort(ang, kind="stable"))


def _edge_normal_angles(P: Polytope):
    """Outward edge-normal angles of a polytope in the plane."""
    V = P.vertices
    k = V.shape[0]
    if k == 1:
        return []
    if k == 2:
        e = V[1] - V[0]
        th = np.arctan2(-e[0], e[1])
        return [th % (2 * np.pi), (th + np.pi) % (2 * np.pi)]
    order = _ccw_order(P)
    angles = []
    for i in range(len(order)):
        e = V[order[(i + 1) % len(order)]] - V[order[i]]
        angles.append(np.arctan2(-e[0], e[1]) % (2 * np.pi))
    return angles


def _merge_angles(angles, tol_ang=1e-11):
    if not angles:
        return []
    arr = np.sort(np.asarray(angles) % (2 * np.pi))
    out = [float(arr[0])]
    for a in arr[1:]:
        if a - out[-1] > tol_ang:
            out.append(float(a))
    if out and (2 * np.pi - out[-1]) + out[0] <= tol_ang:
        out.pop()
    return out


def _fan_1d(G, H, tol):
    cells = []
    for s in (1.0, -1.0):
        rep = np.array([s])
        cells.append(
            FanCell(rep, G.support_argmax(rep, tol), H.support_argmax(rep, tol), 1)
        )
    if cells[0].g_face == cells[1].g_face and cells[0].h_face == cells[1].h_face:
        return [cells[0]]  # both sets are points: a single cell covers R
    return cells


def _fan_2d(G, H, tol):
    theta = _merge_angles(_edge_normal_angles(G) + _edge_normal_angles(H))
    if not theta:
        rep = np.array([1.0, 0.0])
        return [FanCell(rep, G.support_argmax(rep, tol), H.support_argmax(rep, tol), 2)]
    cells = []
    k = len(theta)
    for i in range(k):
        th = theta[i]
        ray = np.array([np.cos(th), np.sin(th)])
        cells.append(FanCell(ray, G.support_argmax(ray, tol), H.support_argmax(ray, tol), 1))
        th2 = theta[(i + 1) % k]
        gap = (th2 - th) % (2 * np.pi)
        if gap == 0.0:
            gap = 2 * np.pi
        mid = th + gap / 2.0
        rep = np.array([np.cos(mid), np.sin(mid)])
        cells.append(FanCell(rep, G.support_argmax(rep, tol), H.support_argmax(rep, tol), 2))
    return cells


def enumerate_faces(P: Polytope, tol: Tolerances = DEFAULT_TOL):
    """Vertex-index sets of every nonempty face (closure under facet cuts)."""
    V, (A, b) = P.vertices, P.halfspaces
    scale = float(np.max(np.abs(V))) + 1.0
    tight = []
    for f in range(A.shape[0]):
        vals = V @ A[f]
        T = frozenset(np.flatnonzero(vals >= b[f] - 1e-8 * scale))
        if T:
            tight.append(T)
    faces = {frozenset(range(P.n_vertices))}
    frontier = list(faces)
    while frontier:
        nxt = []
        for F in frontier:
            for T in tight:
                FF = F & T
                if FF and FF not in faces:
                    faces.add(FF)
                    nxt.append(FF)
        frontier = nxt
    return [tuple(sorted(F)) for F in faces]


def _normal_cone_rows(P: Polytope, face):
    """Equality/inequality rows describing {y : argmax of P on y contains face}."""
    V = P.vertices
    i0 = face[0]
    eq = [V[i] - V[i0] for i in face[1:]]
    other = [w for w in range(P.n_vertices) if w not in face]
    ineq = [V[i0] - V[w] for w in other]
    return eq, ineq


def _relative_interior_direction(eq_rows, ineq_rows, n, tol):
    """A point in the relative interior of {Ey=0, Ay>=0}, or None if {0}.

    Inequalities that hold as equalities everywhere on the cone are promoted
    iteratively; the returned tuple is (point, cone_dim).
    """
    eq = [np.asarray(r, dtype=float) for r in eq_rows]
    ineq = [np.asarray(r, dtype=float) for r in ineq_rows]

    def lin_dim():
        if not eq:
            return n
        E = np.array(eq)
        return n - int(np.linalg.matrix_rank(E, tol=1e-9))

    box = [(np.eye(n)[i] * s, 1.0, "<=") for i in range(n) for s in (1.0, -1.0)]
    while True:
        d_lin = lin_dim()
        if d_lin == 0:
            return None
        cons = [(np.concatenate([e, [0.0]]), 0.0, "=") for e in eq]
        cons += [(np.concatenate([-a, [1.0]]), 0.0, "<=") for a in ineq]
        cons += [(np.concatenate([a, [0.0]]), bb, rel) for a, bb, rel in box]
        cons.append((np.concatenate([np.zeros(n), [1.0]]), 1.0, "<="))
        obj = np.concatenate([np.zeros(n), [1.0]])
        res = solve_lp(LpProblem(obj, cons, "max"), tol)
        assert res.is_optimal
        t_star = res.value
        if t_star > 1e-7:
            y = res.point[:n]
            if not ineq:
                # Pure subspace: need any nonzero point of it.
                if np.linalg.norm(y) < 1e-9:
                    E = np.array(eq) if eq else np.zeros((0, n))
                    _, s, Vt = np.linalg.svd(E, full_matrices=True)
                    rank = int(np.sum(s > 1e-9)) if s.size else 0
                    y = Vt[rank]
                return y, d_lin
            return res.point[:n], d_lin
        if not ineq:
            E = np.array(eq) if eq else np.zeros((0, n))
            _, s, Vt = np.linalg.svd(E, full_matrices=True)
            rank = int(np.sum(s > 1e-9)) if s.size else 0
            if rank >= n:
                return None
            return Vt[rank], n - rank
        # Promote implicit equalities: rows whose max over the cone is 0.
        promoted = []
        still = []
        for a in ineq:
            cons_a = [(e, 0.0, "=") for e in eq]
            cons_a += [(-aa, 0.0, "<=") for aa in ineq]
            cons_a += box
            res_a = solve_lp(LpProblem(a, cons_a, "max"), tol)
            assert res_a.is_optimal
            if res_a.value <= 1e-9:
                promoted.append(a)
            else:
                still.append(a)
        if not promoted:
            return None  # numerically stuck; treat as trivial
        eq.extend(promoted)
        ineq = still


def _fan_generic(G, H, tol):
    n = G.dim
    cells = []
    seen = set()
    for Fg in enumerate_faces(G, tol):
        eq_g, ineq_g = _normal_cone_rows(G, Fg)
        for Fh in enumerate_faces(H, tol):
            eq_h, ineq_h = _normal_cone_rows(H, Fh)
            got = _relative_interior_direction(eq_g + eq_h, ineq_g + ineq_h, n, tol)
            if got is None:
                continue
            y, d_cell = got
            nrm = np.linalg.norm(y)
            if nrm < 1e-12:
                continue
            y = y / nrm
            if G.support_argmax(y, tol) != Fg or H.support_argmax(y, tol) != Fh:
                continue  # (Fg, Fh) is not the exact face pair of this cell
            key = (Fg, Fh)
            if key in seen:
                continue
            seen.add(key)
            cells.append(FanCell(y, Fg, Fh, d_cell))
    return cells


def fan_refinement(
    G: Polytope,
    H: Polytope,
    tol: Tolerances = DEFAULT_TOL,
    n_sample: int = 64,
    rng=None,
):
    """Cells (dim >= 1) of the common refinement of the two normal fans.

    Exact for ambient dimension <= 3; beyond that, representatives are the
    normalized vertex differences of G and H plus uniform sphere samples,
    and the cells are flagged `sampled`.
    """
    if G.dim != H.dim:
        raise DimensionMismatch("ambient dimension mismatch")
    n = G.dim
    if n == 1:
        return _fan_1d(G, H, tol)
    if n == 2:
        return _fan_2d(G, H, tol)
    if n == 3:
        return _fan_generic(G, H, tol)
    reps = []
    for P in (G, H):
        V = P.vertices
        diffs = (V[:, None, :] - V[None, :, :]).reshape(-1, n)
        for dvec in diffs:
            nrm = np.linalg.norm(dvec)
            if nrm > 1e-12:
                reps.append(dvec / nrm)
    if rng is None:
        rng = np.random.default_rng(0)
    Z = rng.normal(size=(n_sample, n))
    reps.extend(Z / np.linalg.norm(Z, axis=1, keepdims=True))
    cells = []
    seen = set()
    for y in reps:
        fg = G.support_argmax(y, tol)
        fh = H.support_argmax(y, tol)
        if (fg, fh) in seen:
            continue
        seen.add((fg, fh))
        cells.append(FanCell(y, fg, fh, -1, sampled=True))
    return cells


@dataclass(frozen=True)
class GenPolyhedron:
    """base + recession: a polytope swept by a polyhedral cone.

    The halfspace form is recovered from a far-truncated Minkowski sum:
    facets whose outward normal has nonpositive support on the recession
    cone are kept, the truncation artifacts are dropped.
    """

    base: Polytope
    recession: "object"  # PolyCone; annotated loosely to avoid an import cycle

    def halfspaces(self, tol: Tolerances = DEFAULT_TOL):
        R = self.recession.rays
        if R.size == 0:
            return self.base.halfspaces
        reach = 1000.0 * (float(np.max(np.abs(self.base.vertices))) + 1.0)
        cap = hull(np.vstack([np.zeros((1, self.base.dim)), reach * R]), tol)
        swept = minkowski_sum(self.base, cap, tol)
        A, b = swept.halfspaces
        keep = [i for i in range(A.shape[0]) if np.max(R @ A[i]) <= 1e-7]
        return A[keep], b[keep]

    def contains(self, x, tol: Tolerances = DEFAULT_TOL) -> bool:
        A, b = self.halfspaces(tol)
        return bool(np.all(A @ np.asarray(x, dtype=float) <= b + tol.eps_feas))

    def member_lp(self, x, tol: Tolerances = DEFAULT_TOL) -> bool:
        """Independent membership route: x = base-combination + ray-combination."""
        x = np.asarray(x, dtype=float)
        V, R = self.base.vertices, self.recession.rays
        k, r = V.shape[0], R.shape[0]
        gen = np.vstack([V, R]) if r else V
        cons = [(gen.T[j], float(x[j]), "=") for j in range(self.base.dim)]
        lamsel = np.concatenate([np.ones(k), np.zeros(r)])
        cons.append((lamsel, 1.0, "="))
        cons += [(-np.eye(k + r)[i], 0.0, "<=") for i in range(k + r)]
        return solve_lp(LpProblem(np.zeros(k + r), cons, "min"), tol).is_optimal
