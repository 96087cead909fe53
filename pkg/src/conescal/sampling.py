"""Seeded random fixtures: cones, generators, polytopes and valid pairs.

Everything is driven by an explicit numpy Generator so reports and tests
are reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

from .cone import PolyCone, dual_cone, membership
from .numkernel import DEFAULT_TOL, Tolerances
from .polytope import Polytope, hull
from .scalarize import check_generator, gw_subdiff0


def random_pointed_cone(rng, dim: int, tol: Tolerances = DEFAULT_TOL) -> PolyCone:
    """A solid pointed cone in R^dim with a comfortably interior axis."""
    while True:
        u = rng.normal(size=dim)
        u /= np.linalg.norm(u)
        k = 2 if dim == 2 else int(rng.integers(3, 6))
        dirs = u[None, :] + 0.55 * rng.normal(size=(k, dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        C = PolyCone.from_rays(dirs, tol)
        if C.rays.shape[0] < dim:
            continue
        if not (C.is_pointed(tol) and C.is_solid(tol)):
            continue
        axis = C.interior_point()
        if C.min_slack(axis) < 0.05:
            continue  # too thin or too wide for well-conditioned duals
        Cd = dual_cone(C, tol)
        if Cd.rays.shape[0] < dim or Cd.min_slack(Cd.interior_point()) < 0.05:
            continue
        return C


def random_interior_direction(rng, K: PolyCone, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    while True:
        w = K.rays.T @ rng.uniform(0.3, 1.0, size=K.rays.shape[0])
        w /= np.linalg.norm(w)
        if membership(K, w, tol) == "interior":
            return w


def random_generator_polytope(rng, K: PolyCone, tol: Tolerances = DEFAULT_TOL) -> Polytope:
    """A compact generator of K*: scaled slice corners plus interior dust."""
    r = random_interior_direction(rng, K, tol)
    base = gw_subdiff0(K, r, tol)
    pts = [v * rng.uniform(0.7, 1.5) for v in base.vertices]
    Kstar = dual_cone(K, tol)
    for _ in range(int(rng.integers(1, 4))):
        w = Kstar.rays.T @ rng.uniform(0.2, 1.0, size=Kstar.rays.shape[0])
        pair = float(w @ r)
        if pair > 1e-9:
            pts.append(w * (rng.uniform(0.8, 1.3) / pair))
    G = hull(np.array(pts), tol)
    check_generator(G, K, tol)
    return G


def random_polytope(rng, dim: int, max_vertices: int = 7,
                    tol: Tolerances = DEFAULT_TOL) -> Polytope:
    k = int(rng.integers(3, max_vertices + 1))
    return hull(rng.uniform(-2.0, 2.0, size=(k, dim)), tol)


def random_ds_pair(rng, K: PolyCone, tol: Tolerances = DEFAULT_TOL):
    """A valid pair whose functional is a support functional: H = lam * G
    with lam below the pairing gap, so the sets are disjoint."""
    G = random_generator_polytope(rng, K, tol)
    r = K.interior_point()
    pair = G.vertices @ r
    lam = rng.uniform(0.3, 0.8) * float(np.min(pair) / np.max(pair))
    return G, G.scale(lam)


def random_valid_pair(rng, K: PolyCone, allow_nonconvex: bool = True,
                      tol: Tolerances = DEFAULT_TOL):
    """Mix of support-functional pairs and planar nonconvex constructions."""
    from .pairs import build_nonconvex_pair_2d

    if allow_nonconvex and K.dim == 2 and rng.uniform() < 0.5:
        r = random_interior_direction(rng, K, tol)
        cert = build_nonconvex_pair_2d(K, r, tol)
        return cert.G, cert.H
    return random_ds_pair(rng, K, tol)
