"""Polyhedral cones, dual cones, memberships, and norm-defined cone oracles.

A cone is stored with extreme-ray generators and facet rows `a` meaning
membership is <a, x> >= 0 for all rows.  Duality swaps the two lists.  The
norm-defined ("Bishop-Phelps type") cone {y : <anchor, y> >= ||y||} gets a
closed-form dual-membership oracle via a scalar quadratic.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .numkernel import (
    DEFAULT_TOL,
    DimensionMismatch,
    LpProblem,
    Tolerances,
    solve_lp,
)


class AnchorTooShort(ValueError):
    """Closed-form dual membership needs an anchor of norm > 1."""


def _unit_rows(R):
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.shape[0] == 0:
        return R
    return R / np.linalg.norm(R, axis=1, keepdims=True)


def _dedup_rays(R, decimals=9):
    if R.shape[0] == 0:
        return R
    _, idx = np.unique(np.round(R, decimals=decimals), axis=0, return_index=True)
    return R[np.sort(idx)]


def _nullspace(A, rtol=1e-9):
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > rtol * max(s[0], 1.0))) if s.size else 0
    return Vt[rank:].T


def generators_from_halfspace_rows(A, n, tol: Tolerances = DEFAULT_TOL):
    """Generators of {x in R^n : A x >= 0}: extreme rays plus +-lineality.

    Lineality (the largest subspace inside the cone) is split off first;
    extreme rays of the pointed part come from rank-(d-1) subsets of the
    projected rows.  Exact for the small systems used here.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        A = np.zeros((0, n))
    lin = _nullspace(A)
    gens = [b for b in lin.T] + [-b for b in lin.T]
    d = n - lin.shape[1]
    if d == 0:
        return _unit_rows(np.array(gens)) if gens else np.zeros((0, n))
    # Orthonormal basis of the complement of the lineality space.
    Q = _nullspace(lin.T) if lin.shape[1] else np.eye(n)
    Ap = A @ Q  # rows over the pointed part, dimension d
    rays_p = []
    if d == 1:
        for s in (1.0, -1.0):
            v = np.array([s])
            if np.all(Ap @ v >= -tol.eps_feas):
                rays_p.append(v)
    else:
        m = Ap.shape[0]
        for S in itertools.combinations(range(m), d - 1):
            M = Ap[list(S)]
            ns = _nullspace(M)
            if ns.shape[1] != 1:
                continue
            v = ns[:, 0]
            for cand in (v, -v):
                if np.all(Ap @ cand >= -1e-9):
                    tight = np.abs(Ap @ cand) <= 1e-9
                    if np.linalg.matrix_rank(Ap[tight], tol=1e-9) >= d - 1:
                        rays_p.append(cand)
    for v in rays_p:
        gens.append(Q @ v)
    if not gens:
        return np.zeros((0, n))
    return _dedup_rays(_unit_rows(np.array(gens)))


class PolyCone:
    """Closed convex polyhedral cone with synchronized ray/facet forms."""

    __slots__ = ("dim", "rays", "facets")

    def __init__(self, dim, rays, facets):
        self.dim = int(dim)
        rays = np.atleast_2d(np.asarray(rays, dtype=float))
        facets = np.atleast_2d(np.asarray(facets, dtype=float))
        if rays.size == 0:
            rays = np.zeros((0, self.dim))
        if facets.size == 0:
            facets = np.zeros((0, self.dim))
        self.rays = rays
        self.facets = facets
        self.rays.setflags(write=False)
        self.facets.setflags(write=False)

    @classmethod
    def from_rays(cls, rays, tol: Tolerances = DEFAULT_TOL) -> "PolyCone":
        rays = np.atleast_2d(np.asarray(rays, dtype=float))
        n = rays.shape[1]
        rays = _dedup_rays(_unit_rows(rays))
        # Facet rows of cone(rays) are the extreme rays of its dual.
        facets = generators_from_halfspace_rows(rays, n, tol)
        rays_clean = generators_from_halfspace_rows(facets, n, tol)
        return cls(n, rays_clean, facets)

    @classmethod
    def from_halfspaces(cls, facets, dim=None, tol: Tolerances = DEFAULT_TOL) -> "PolyCone":
        facets = np.atleast_2d(np.asarray(facets, dtype=float))
        n = dim if dim is not None else facets.shape[1]
        rays = generators_from_halfspace_rows(facets, n, tol)
        facets_clean = generators_from_halfspace_rows(rays, n, tol)
        return cls(n, rays, facets_clean)

    @classmethod
    def orthant(cls, n) -> "PolyCone":
        return cls(n, np.eye(n), np.eye(n))

    def negated(self) -> "PolyCone":
        return PolyCone(self.dim, -self.rays, -self.facets)

    @property
    def is_trivial(self) -> bool:
        return self.rays.shape[0] == 0

    @property
    def is_full_space(self) -> bool:
        return self.facets.shape[0] == 0 and not self.is_trivial

    def is_pointed(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        """No generator has its negation inside the cone."""
        for r in self.rays:
            if self.contains(-r, tol):
                return False
        return True

    def is_solid(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        """The facet system admits a strict interior point."""
        if self.is_trivial:
            return False
        if self.facets.shape[0] == 0:
            return True
        n = self.dim
        cons = [
            (np.concatenate([-a, [1.0]]), 0.0, "<=") for a in self.facets
        ]
        cons += [
            (np.concatenate([np.eye(n)[i] * s, [0.0]]), 1.0, "<=")
            for i in range(n)
            for s in (1.0, -1.0)
        ]
        cons.append((np.concatenate([np.zeros(n), [1.0]]), 1.0, "<="))
        obj = np.concatenate([np.zeros(n), [1.0]])
        res = solve_lp(LpProblem(obj, cons, "max"), tol)
        return res.is_optimal and res.value > tol.eps_strict

    def contains(self, y, tol: Tolerances = DEFAULT_TOL) -> bool:
        y = np.asarray(y, dtype=float)
        if self.is_trivial:
            return bool(np.linalg.norm(y) <= tol.eps_feas)
        if self.facets.shape[0] == 0:
            return True
        return bool(np.all(self.facets @ y >= -tol.eps_feas))

    def min_slack(self, y) -> float:
        y = np.asarray(y, dtype=float)
        if self.facets.shape[0] == 0:
            return np.inf
        return float(np.min(self.facets @ y))

    def interior_point(self) -> np.ndarray:
        """Normalized sum of the extreme rays (interior for solid cones)."""
        if self.is_trivial:
            raise ValueError("trivial cone has no interior point")
        v = self.rays.sum(axis=0)
        nrm = np.linalg.norm(v)
        if nrm < 1e-12:
            return self.rays[0]
        return v / nrm

    def polar_generators(self, tol: Tolerances = DEFAULT_TOL):
        """Generators of the polar cone {a : <a, r> <= 0 for all rays r}."""
        return generators_from_halfspace_rows(-self.rays, self.dim, tol)

    def __repr__(self):
        return f"PolyCone(dim={self.dim}, rays={self.rays.shape[0]}, facets={self.facets.shape[0]})"


def dual_cone(C: PolyCone, tol: Tolerances = DEFAULT_TOL) -> PolyCone:
    """{y : <y, x> >= 0 on C}: rays and facet rows swap roles."""
    if C.is_trivial:
        full = np.vstack([np.eye(C.dim), -np.eye(C.dim)])
        return PolyCone(C.dim, full, np.zeros((0, C.dim)))
    rays = generators_from_halfspace_rows(C.rays, C.dim, tol)
    facets = generators_from_halfspace_rows(rays, C.dim, tol) if rays.size else C.rays
    # The dual's facet rows are (up to redundancy) the primal's extreme rays.
    return PolyCone(C.dim, rays, facets)


def membership(C: PolyCone, y, tol: Tolerances = DEFAULT_TOL) -> str:
    """Classify y against C: "interior" / "boundary" / "outside".

    Decided by the minimal facet slack against +-eps_strict; for trivial or
    full-space cones the classification degenerates accordingly.
    """
    y = np.asarray(y, dtype=float)
    if C.is_trivial:
        return "boundary" if np.linalg.norm(y) <= tol.eps_strict else "outside"
    if C.facets.shape[0] == 0:
        return "interior"
    s = C.min_slack(y)
    if s > tol.eps_strict:
        return "interior"
    if s < -tol.eps_strict:
        return "outside"
    return "boundary"


@dataclass(frozen=True)
class BPCone:
    """Norm-defined cone {y : <anchor, y> >= ||y||_2}."""

    anchor: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "anchor", np.asarray(self.anchor, dtype=float))

    @property
    def dim(self) -> int:
        return self.anchor.shape[0]

    def contains(self, y, tol: Tolerances = DEFAULT_TOL) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(self.anchor @ y >= np.linalg.norm(y) - tol.eps_feas)

    def sample_unit_members(self, n_samples, rng) -> np.ndarray:
        """Unit vectors inside the cone, by rejection from the sphere."""
        out = []
        while len(out) < n_samples:
            Z = rng.normal(size=(4 * n_samples, self.dim))
            Z /= np.linalg.norm(Z, axis=1, keepdims=True)
            ok = Z @ self.anchor >= 1.0
            out.extend(Z[ok])
        return np.array(out[:n_samples])


def bp_dual_member(
    bp: BPCone,
    ystar,
    tol: Tolerances = DEFAULT_TOL,
    allow_sampled: bool = False,
    n_samples: int = 20000,
    seed: int = 0,
) -> bool:
    """Dual-cone membership for a norm-defined cone, in closed form.

    y* belongs to the dual iff some t >= 0 puts y* inside t * (unit ball
    around the anchor), i.e. the quadratic
        t^2 (||anchor||^2 - 1) - 2 t <anchor, y*> + ||y*||^2 <= 0
    has a nonnegative root.  Exact for ||anchor|| > 1; shorter anchors only
    admit a sampled check (opt in with allow_sampled), which is flagged
    approximate via a warning.
    """
    ystar = np.asarray(ystar, dtype=float)
    if ystar.shape != bp.anchor.shape:
        raise DimensionMismatch("direction does not match anchor dimension")
    a2 = float(bp.anchor @ bp.anchor)
    if a2 <= 1.0 + tol.eps_cmp:
        if not allow_sampled:
            raise AnchorTooShort("need ||anchor|| > 1 for the closed form")
        warnings.warn(
            "anchor norm <= 1: falling back to a sampled, non-exact check",
            RuntimeWarning,
        )
        rng = np.random.default_rng(seed)
        Y = bp.sample_unit_members(n_samples, rng)
        return bool(np.min(Y @ ystar) >= -tol.eps_cmp)
    p = float(bp.anchor @ ystar)
    q2 = float(ystar @ ystar)
    if q2 <= tol.eps_feas**2:
        return True
    if p < 0.0:
        return False
    return p * p >= (a2 - 1.0) * q2 - tol.eps_feas


def bp_dual_margin(bp: BPCone, ystar) -> float:
    """Signed closed-form margin: >= 0 iff ystar is a dual member.

    Normalized discriminant of the membership quadratic; useful for
    boundary-aware comparisons in tests.
    """
    ystar = np.asarray(ystar, dtype=float)
    a2 = float(bp.anchor @ bp.anchor)
    p = float(bp.anchor @ ystar)
    q2 = float(ystar @ ystar)
    if q2 == 0.0:
        return np.inf
    if p < 0.0:
        return -np.inf
    return (p * p - (a2 - 1.0) * q2) / q2
