"""Shared construction helpers for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from isodecomp.decomp import facewise_affine_space
from isodecomp.errors import NotFullDimensional
from isodecomp.exactnum import dot
from isodecomp.moments import body_moments
from isodecomp.polytope import Polytope, hull_facets, translate
from isodecomp.variations import eps_bound


def cube(n: int) -> Polytope:
    pts = []
    for mask in range(2 ** n):
        pts.append(tuple(Fraction(1 if mask & (1 << i) else -1) for i in range(n)))
    return hull_facets(pts)


def cross_polytope(n: int) -> Polytope:
    pts = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        pts.append(tuple(e))
        pts.append(tuple(-x for x in e))
    return hull_facets(pts)


def centered_simplex(n: int) -> Polytope:
    pts = [tuple(Fraction(1 if j == i else 0) for j in range(n)) for i in range(n)]
    pts.append(tuple(Fraction(-1) for _ in range(n)))
    return hull_facets(pts)


def hexagon() -> Polytope:
    return hull_facets([(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)])


def triangle_origin() -> Polytope:
    return hull_facets([(2, -1), (-1, 2), (-1, -1)])


def standard_triangle() -> Polytope:
    return hull_facets([(0, 0), (1, 0), (0, 1)])


def random_polytope(rng: random.Random, n: int, npts: int, bound: int = 4,
                    centered: bool = True) -> Polytope:
    """Hull of random small-integer points, translated so 0 is interior."""
    while True:
        pts = [tuple(Fraction(rng.randrange(-bound, bound + 1)) for _ in range(n))
               for _ in range(npts)]
        try:
            body = hull_facets(pts)
        except NotFullDimensional:
            continue
        if not centered:
            return body
        c = body_moments(body).centroid()
        return translate(body, [-x for x in c])


def random_speed(rng: random.Random, body: Polytope, min_eps: Fraction | None = None):
    """Random nonzero facewise affine vertex-value vector; optionally
    rescaled so that the radial validity radius is at least min_eps."""
    basis = facewise_affine_space(body).basis
    m = len(body.vertices)
    while True:
        coeffs = [Fraction(rng.randrange(-3, 4)) for _ in basis]
        g = tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(m))
        if any(x != 0 for x in g):
            break
    if min_eps is not None:
        e = eps_bound(body, g)
        if e < min_eps:
            factor = e / (2 * min_eps)  # eps scales inversely with the speed
            g = tuple(x * factor for x in g)
    return g


def cyclic_vertex_order(body: Polytope) -> list[int]:
    """Vertex indices of a polygon in cyclic boundary order."""
    assert body.dim == 2
    nbrs: dict[int, list[int]] = {i: [] for i in range(len(body.vertices))}
    for f in body.facets:
        a, b = f.vertex_indices
        nbrs[a].append(b)
        nbrs[b].append(a)
    order = [0, nbrs[0][0]]
    while len(order) < len(body.vertices):
        prev, cur = order[-2], order[-1]
        order.append(nbrs[cur][0] if nbrs[cur][0] != prev else nbrs[cur][1])
    return order


def rs_tent_movement(rng: random.Random, body: Polytope):
    """Chord-aligned tent speeds on a polygon: a shadow movement that
    translates every chord in the direction of a vertex pair rigidly.

    Returns (direction, speeds) or None if no admissible pair exists.
    """
    assert body.dim == 2
    m = len(body.vertices)
    adjacency = {frozenset(f.vertex_indices) for f in body.facets}
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)
             if frozenset((i, j)) not in adjacency]
    rng.shuffle(pairs)
    for i, j in pairs:
        u = tuple(a - b for a, b in zip(body.vertices[i], body.vertices[j]))
        w = (-u[1], u[0])
        y = [dot(w, v) for v in body.vertices]
        y0 = y[i]
        ymin, ymax = min(y), max(y)
        if not (ymin < y0 < ymax):
            continue
        speeds = []
        for yk in y:
            if yk <= y0:
                speeds.append((yk - ymin) / (y0 - ymin))
            else:
                speeds.append((ymax - yk) / (ymax - y0))
        return u, tuple(speeds)
    return None
