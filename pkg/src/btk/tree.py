"""The Bruhat-Tits tree of PGL2(F).

A vertex is the homothety class of a lattice in F^2.  Every class contains a
unique lattice with basis matrix ``[[1, 0], [c, pi^m]]`` where ``c`` is reduced
modulo ``pi^m`` (see :meth:`Field.reduce_mod`); the pair ``(m, c)`` is the
vertex's canonical key.  The standard apartment is ``x_n = (n, 0)``, the class
of ``O e1 + O pi^n e2``.

Ends are points of P^1(F): the end ``[u : v]`` is reached by rays of lattices
shrinking onto the line ``F (u, v)``.  So ``[1 : 0]`` is the end of
``x_0, x_1, x_2, ...`` and ``[0 : 1]`` the end of ``x_0, x_-1, x_-2, ...``.
"""

from __future__ import annotations

import re
from typing import NamedTuple

from .errors import EqualEnds, NotDistinct, ParseError, ZeroVector
from .gl2 import Mat2, elementary_divisors


class Vertex(NamedTuple):
    m: int
    c: object


class Edge(NamedTuple):
    """Unordered edge, stored with endpoints in vertex order."""

    u: Vertex
    v: Vertex


class End(NamedTuple):
    """Canonical projective point: ``(1, 0)`` or ``(u, 1)``."""

    u: object
    v: object


# ---------------------------------------------------------------------------
# vertices


def vertex_key(F, x):
    return (x.m, F.key(x.c))


def make_edge(F, x, y):
    if vertex_key(F, y) < vertex_key(F, x):
        x, y = y, x
    return Edge(x, y)


def edge_key(F, e):
    return (vertex_key(F, e.u), vertex_key(F, e.v))


def standard_vertex(F, n):
    return Vertex(n, F.zero)


def base_vertex(F):
    return Vertex(0, F.zero)


def vertex_matrix(F, x):
    """Basis matrix ``[[1, 0], [c, pi^m]]`` of the canonical lattice of ``x``."""
    return Mat2(F, F.one, F.zero, x.c, F.pi_pow(x.m))


def _vertex_from_entries(F, a, b, c, d):
    # Column-reduce so the first row becomes (x, 0) with x of minimal valuation,
    # then scale x to 1.
    v = F.valuation
    va, vb = v(a), v(b)
    if va <= vb:
        top, bottom, vt = a, c, va
    else:
        top, bottom, vt = b, d, vb
    m = v(a * d - b * c) - 2 * vt
    return Vertex(m, F.reduce_mod(bottom / top, m))


def vertex_of_lattice(g):
    """Vertex of the lattice spanned by the columns of ``g``."""
    return _vertex_from_entries(g.F, g.a, g.b, g.c, g.d)


def act(g, x):
    """Image of the vertex ``x`` under ``g``."""
    F = g.F
    pm = F.pi_pow(x.m)
    c = x.c
    return _vertex_from_entries(F, g.a + g.b * c, g.b * pm, g.c + g.d * c, g.d * pm)


def neighbors(F, x):
    """The q+1 neighbours: children ``(m+1, c + r pi^m)`` for r = 0..p-1, then
    the parent ``(m-1, c mod pi^(m-1))``."""
    pm = F.pi_pow(x.m)
    out = [Vertex(x.m + 1, x.c + r * pm) for r in F.residue_reps()]
    out.append(Vertex(x.m - 1, F.reduce_mod(x.c, x.m - 1)))
    return out


def relative_matrix(F, x, y):
    """``g_x^-1 g_y`` for the canonical basis matrices of ``x`` and ``y``."""
    inv_pm = F.pi_pow(-x.m)
    return Mat2(F, F.one, F.zero, (y.c - x.c) * inv_pm, F.pi_pow(y.m - x.m))


def distance(F, x, y):
    a, b = elementary_divisors(relative_matrix(F, x, y))
    return b - a


def adjacent(F, x, y):
    return distance(F, x, y) == 1


def _ancestor(F, x, k):
    return Vertex(k, F.reduce_mod(x.c, k))


def geodesic(F, x, y):
    """The vertex path from ``x`` to ``y``."""
    meet = min(x.m, y.m, F.valuation(x.c - y.c))
    up = [_ancestor(F, x, k) for k in range(x.m, meet - 1, -1)]
    down = [_ancestor(F, y, k) for k in range(meet + 1, y.m + 1)]
    return up + down


def spheres(F, x, r):
    """Layers ``[S(x,0), ..., S(x,r)]`` in breadth-first order."""
    layers = [[x]]
    parents = {x: None}
    for _ in range(r):
        nxt = []
        for y in layers[-1]:
            for z in neighbors(F, y):
                if z != parents[y]:
                    parents[z] = y
                    nxt.append(z)
        layers.append(nxt)
    return layers


def sphere(F, x, r):
    return spheres(F, x, r)[r]


def ball(F, x, r):
    return [y for layer in spheres(F, x, r) for y in layer]


def ball_edges(F, x, r):
    """Edges of the ball, each emitted once from its outer endpoint."""
    layers = spheres(F, x, r)
    edges = []
    for depth in range(1, r + 1):
        inner = set(layers[depth - 1])
        for y in layers[depth]:
            for z in neighbors(F, y):
                if z in inner:
                    edges.append((z, y))
                    break
    return edges


def edge_ball(F, edge, e):
    """B(edge, e): vertices within ``e`` of either endpoint."""
    u, v = edge
    seen = dict.fromkeys(ball(F, u, e))
    for y in ball(F, v, e):
        seen.setdefault(y)
    return list(seen)


# ---------------------------------------------------------------------------
# ends


def end_canonical(F, u, v):
    if u == F.zero and v == F.zero:
        raise ZeroVector("an end needs a nonzero vector")
    if v == F.zero:
        return End(F.one, F.zero)
    return End(u / v, F.one)


def end_omega(F):
    """The end [1:0], reached along x_0, x_1, x_2, ..."""
    return End(F.one, F.zero)


def end_omega_prime(F):
    """The end [0:1], reached along x_0, x_-1, x_-2, ..."""
    return End(F.zero, F.one)


def act_end(g, w):
    return end_canonical(g.F, *g.apply(w.u, w.v))


def stabilizes_end(g, w):
    gu, gv = g.apply(w.u, w.v)
    return gu * w.v == gv * w.u


def _primitive(F, u, v):
    v_ = F.valuation
    pivot = u if v_(u) <= v_(v) else v
    return u / pivot, v / pivot


def _completion(F, u, v):
    """A matrix in K whose first column is the primitive vector ``(u, v)``."""
    if F.valuation(u) == 0:
        return Mat2(F, u, F.zero, v, F.one)
    return Mat2(F, u, F.one, v, F.zero)


def end_frame(F, w):
    """A matrix in K sending the end [1:0] to ``w`` (hence fixing x_0)."""
    return _completion(F, *_primitive(F, w.u, w.v))


def halfline(F, x, w, length):
    """First ``length + 1`` vertices of the ray from ``x`` to the end ``w``.

    With L the lattice of ``x`` and l the line of ``w``, the k-th vertex is the
    class of ``(L n l) + pi^k L``.
    """
    M = vertex_matrix(F, x)
    coords = M.inv().apply(w.u, w.v)
    basis = M * _completion(F, *_primitive(F, *coords))
    out = [x]
    for k in range(1, length + 1):
        pk = F.pi_pow(k)
        out.append(_vertex_from_entries(F, basis.a, basis.b * pk, basis.c, basis.d * pk))
    return out


def _ends_matrix(F, w1, w2):
    if w1.u * w2.v == w1.v * w2.u:
        raise EqualEnds("the two ends coincide")
    u1, v1 = _primitive(F, w1.u, w1.v)
    u2, v2 = _primitive(F, w2.u, w2.v)
    return Mat2(F, u1, u2, v1, v2)


def apartment_vertex(F, w1, w2, k):
    """Vertex ``[O pi^k w1 + O w2]`` of the apartment between ``w1`` and ``w2``.

    ``k = 0`` is the apartment vertex nearest x_0; increasing ``k`` moves
    toward ``w2``.
    """
    A = _ends_matrix(F, w1, w2)
    pk = F.pi_pow(k)
    return _vertex_from_entries(F, A.a * pk, A.b, A.c * pk, A.d)


def apartment_window(F, w1, w2, radius):
    """Vertices of the apartment from the ``w1`` side to the ``w2`` side, centred
    at the apartment vertex nearest x_0."""
    A = _ends_matrix(F, w1, w2)
    out = []
    for k in range(-radius, radius + 1):
        pk = F.pi_pow(k)
        out.append(_vertex_from_entries(F, A.a * pk, A.b, A.c * pk, A.d))
    return out


def crossroad(F, w1, w2, w3):
    """Median of three distinct ends: writing ``w3 = s w1 + t w2``, the class of
    ``O s w1 + O t w2``."""
    for a, b in ((w1, w2), (w1, w3), (w2, w3)):
        if a.u * b.v == a.v * b.u:
            raise NotDistinct("crossroad needs three distinct ends")
    A = Mat2(F, w1.u, w2.u, w1.v, w2.v)
    s, t = A.inv().apply(w3.u, w3.v)
    return _vertex_from_entries(F, s * w1.u, t * w2.u, s * w1.v, t * w2.v)


# ---------------------------------------------------------------------------
# text formats


def format_vertex(F, x):
    return f"({x.m};{F.format(x.c)})"


_VERTEX = re.compile(r"^\(\s*(-?\d+)\s*;(.*)\)$")


def parse_vertex(F, text):
    m = _VERTEX.match(text.strip())
    if m is None:
        raise ParseError(f"vertex must look like '(m;c)': {text!r}")
    level = int(m.group(1))
    return Vertex(level, F.reduce_mod(F.parse(m.group(2)), level))


def format_end(F, w):
    return f"[{F.format(w.u)}:{F.format(w.v)}]"


def parse_end(F, text):
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")) or body.count(":") != 1:
        raise ParseError(f"end must look like '[u:v]': {text!r}")
    u, v = body[1:-1].split(":")
    try:
        return end_canonical(F, F.parse(u), F.parse(v))
    except ZeroVector as exc:
        raise ParseError(f"end with zero vector: {text!r}") from exc


def ball_dot(F, x, r):
    """Graphviz text for B(x, r); vertices in breadth-first order, then edges."""
    lines = ["graph ball {"]
    for y in ball(F, x, r):
        lines.append(f'  "{format_vertex(F, y)}";')
    for y, z in ball_edges(F, x, r):
        lines.append(f'  "{format_vertex(F, y)}" -- "{format_vertex(F, z)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def random_vertex(F, rng, max_depth=6):
    """End of a non-backtracking random walk of random length from x_0."""
    x, prev = base_vertex(F), None
    for _ in range(rng.randint(0, max_depth)):
        nxt = rng.choice([z for z in neighbors(F, x) if z != prev])
        prev, x = x, nxt
    return x


def random_at_distance(F, rng, x, r):
    """A vertex at distance exactly ``r`` from ``x``."""
    prev = None
    for _ in range(r):
        nxt = rng.choice([z for z in neighbors(F, x) if z != prev])
        prev, x = x, nxt
    return x
