"""Independent reference computations used to cross-check the main routes.

None of these share code paths with the quantities they check: distances come
from graph search over ``neighbors``, classification from brute-force
displacement, crossroads from intersecting apartment windows, and the local
PGL2 fixture from enumerating ball bijections.  Displacement searches use
``distance`` (itself checked against graph search) but not the trace and
determinant criterion they are compared with.
"""

from __future__ import annotations

from itertools import permutations, product

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .geometry import (
    ELLIPTIC,
    HYPERBOLIC,
    INVERSION,
    LocalAut,
    induced_edge_group,
)
from .gl2 import Mat2
from .tree import (
    Edge,
    act,
    apartment_window,
    ball,
    distance,
    edge_ball,
    neighbors,
    standard_vertex,
)


def bfs_distances(F, center, radius):
    """``(vertices, D)`` with ``D[i, j]`` the graph distance inside the ball,
    computed by unweighted shortest paths over the ``neighbors`` relation."""
    verts = ball(F, center, radius)
    index = {y: i for i, y in enumerate(verts)}
    rows, cols = [], []
    for y, i in index.items():
        for z in neighbors(F, y):
            j = index.get(z)
            if j is not None:
                rows.append(i)
                cols.append(j)
    n = len(verts)
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    D = shortest_path(adj, directed=False, unweighted=True)
    return verts, D.astype(int)


def displacement_search(g, radius=8, prune=True):
    """``(min d(x, g x), fixed, inverted)`` over ball(x_0, radius).

    ``fixed`` tells whether some vertex is fixed, ``inverted`` whether some
    vertex ``x`` at displacement 1 has ``g(g x) = x``.  With ``prune`` the
    search only follows paths from x_0 along which the displacement never
    increases and stops at the first fixed vertex; displacement is convex
    along geodesics, so every minimizer in the ball is still reached.  With
    ``prune=False`` every vertex of the ball is examined.
    """
    F = g.F
    x0 = standard_vertex(F, 0)

    def disp(x):
        return distance(F, x, act(g, x))

    best = disp(x0)
    fixed = best == 0
    inverted = best == 1 and act(g, act(g, x0)) == x0
    if prune:
        layer = [(x0, None, best)]
        for _ in range(radius):
            if fixed:
                break
            nxt = []
            for y, parent, dy in layer:
                for z in neighbors(F, y):
                    if z == parent:
                        continue
                    dz = disp(z)
                    if dz <= dy:
                        nxt.append((z, y, dz))
            for z, _, dz in nxt:
                best = min(best, dz)
                fixed = fixed or dz == 0
                inverted = inverted or (dz == 1 and act(g, act(g, z)) == z)
            layer = nxt
        return best, fixed, inverted
    for x in ball(F, x0, radius):
        dx = disp(x)
        best = min(best, dx)
        fixed = fixed or dx == 0
        inverted = inverted or (dx == 1 and act(g, act(g, x)) == x)
    return best, fixed, inverted


def classify_by_displacement(g, radius=8, prune=True):
    """``(kind, min displacement)`` from a displacement search.

    A fixed vertex means elliptic, an edge whose endpoints are swapped means
    an inversion, and otherwise the minimum displacement is the translation
    length of a hyperbolic element.
    """
    m, fixed, inverted = displacement_search(g, radius, prune)
    if fixed:
        return ELLIPTIC, 0
    if inverted:
        return INVERSION, 1
    return HYPERBOLIC, m


def crossroad_by_apartments(F, w1, w2, w3, window=24):
    """The vertex common to the three pairwise apartments, found by
    intersecting finite windows."""
    sets = [set(apartment_window(F, a, b, window)) for a, b in ((w1, w2), (w1, w3), (w2, w3))]
    common = sets[0] & sets[1] & sets[2]
    if len(common) != 1:
        raise AssertionError(f"window too small: {len(common)} common vertices")
    return common.pop()


def congruence_fixes_ball(F, m, level=2):
    """Check that every ``1 + pi^m X`` with ``X`` integral (enumerated modulo
    ``pi^level``) fixes ball(x_0, m) pointwise.  Returns the number of
    matrices checked; raises AssertionError on the first counterexample."""
    x0 = standard_vertex(F, 0)
    verts = ball(F, x0, m)
    pm = F.pi_pow(m)
    reps = F.integers_mod(level)
    count = 0
    for a, b, c, d in product(reps, repeat=4):
        g = Mat2(F, F.one + pm * a, pm * b, pm * c, F.one + pm * d)
        for y in verts:
            if act(g, y) != y:
                raise AssertionError(f"{g} moves a vertex of the radius-{m} ball")
        count += 1
    return count


def edge_bijections(F):
    """All adjacency-preserving bijections of B({x_0, x_1}, 1) fixing both
    endpoints, as image tuples in the order of ``edge_ball``."""
    x0, x1 = standard_vertex(F, 0), standard_vertex(F, 1)
    dom = edge_ball(F, Edge(x0, x1), 1)
    side0 = [z for z in neighbors(F, x0) if z != x1]
    side1 = [z for z in neighbors(F, x1) if z != x0]
    for p0, p1 in product(permutations(side0), permutations(side1)):
        f = {x0: x0, x1: x1, **dict(zip(side0, p0)), **dict(zip(side1, p1))}
        yield tuple(f[y] for y in dom)


def find_graft(F, radius=2):
    """Search for a bijection of B({x_0, x_1}, 1) outside the group induced by
    PGL2, and extend it to a local automorphism of ball(x_0, radius).

    Returns ``(graft, induced_size, full_size)``; ``graft`` is None when the
    induced group is the full adjacency-preserving stabilizer.
    """
    dom, table = induced_edge_group(F, 1)
    induced = set(table)
    full = 0
    found = None
    for images in edge_bijections(F):
        full += 1
        if found is None and images not in induced:
            found = dict(zip(dom, images))
    graft = None
    if found is not None:
        graft = extend_to_ball(F, found, standard_vertex(F, 0), radius)
    return graft, len(induced), full


def extend_to_ball(F, partial, center, radius):
    """Extend a partial tree isometry to all of ball(center, radius).

    Vertices are processed breadth first; the unmapped neighbours of each
    vertex are matched, in listing order, to the unused neighbours of its
    image that lie in the target ball.
    """
    f = dict(partial)
    fc = f[center]
    dom = ball(F, center, radius)
    domset = set(dom)
    target = set(ball(F, fc, radius))
    used = set(f.values())
    for y in dom:
        fy = f[y]
        todo = [z for z in neighbors(F, y) if z in domset and z not in f]
        free = [w for w in neighbors(F, fy) if w in target and w not in used]
        if len(todo) > len(free):
            raise AssertionError("partial map does not extend")
        for z, w in zip(todo, free):
            f[z] = w
            used.add(w)
    return LocalAut(F, center, radius, f).validate()
