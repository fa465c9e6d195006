import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from btk.errors import EqualEnds, NotDistinct, ParseError, ZeroVector
from btk.field import make_field
from btk.gl2 import diag, identity, mat, member, proj_normalize, random_k, random_mat2, swap
from btk.oracles import bfs_distances, crossroad_by_apartments
from btk.tree import (
    act,
    act_end,
    apartment_window,
    ball,
    ball_dot,
    base_vertex,
    crossroad,
    distance,
    end_canonical,
    end_omega,
    end_omega_prime,
    format_end,
    format_vertex,
    geodesic,
    halfline,
    neighbors,
    parse_end,
    parse_vertex,
    random_vertex,
    sphere,
    stabilizes_end,
    standard_vertex,
    vertex_of_lattice,
)

seeds = st.integers(min_value=0, max_value=2**32)


def x(F, n):
    return standard_vertex(F, n)


# -- worked examples --------------------------------------------------------


def test_standard_vertices(F):
    assert x(F, 0) == base_vertex(F)
    assert format_vertex(F, x(F, 0)) == "(0;0)"
    assert distance(F, x(F, 0), x(F, 1)) == 1 and distance(F, x(F, 0), x(F, -1)) == 1
    verts, D = bfs_distances(F, x(F, 0), 5)
    assert D[verts.index(x(F, 0)), verts.index(x(F, 5))] == distance(F, x(F, 0), x(F, 5)) == 5


def test_vertex_of_lattice(F, rng):
    assert vertex_of_lattice(identity(F)) == x(F, 0)
    for n in range(-3, 4):
        assert vertex_of_lattice(diag(F, F.one, F.pi_pow(n))) == x(F, n)
    for _ in range(20):
        g, k = random_mat2(F, rng), random_k(F, rng)
        assert vertex_of_lattice(g * k) == vertex_of_lattice(g)
        assert vertex_of_lattice(g.scale(F.pi)) == vertex_of_lattice(g)


def test_act_examples(F, rng):
    y = random_vertex(F, rng)
    assert act(identity(F), y) == y
    for _ in range(10):
        assert act(random_k(F, rng), x(F, 0)) == x(F, 0)
    tau = diag(F, F.one, F.pi)
    for n in range(-3, 4):
        assert act(tau, x(F, n)) == x(F, n + 1)


def test_neighbors_examples(F, rng):
    nb = neighbors(F, x(F, 0))
    assert len(nb) == F.p + 1 == len(set(nb))
    assert x(F, 1) in nb and x(F, -1) in nb
    assert len(neighbors(make_field("QP", 2), base_vertex(make_field("QP", 2)))) == 3
    b = ball(F, x(F, 0), 3 if F.p < 5 else 2)
    bset = set(b)
    for y in b:
        for z in neighbors(F, y):
            if z in bset:
                assert y in neighbors(F, z)


def test_distance_examples(F):
    assert distance(F, x(F, 3), x(F, 3)) == 0
    for n in range(-6, 7):
        assert distance(F, x(F, 0), x(F, n)) == abs(n)
    assert distance(F, vertex_of_lattice(mat(F, 0, 1, F.pi, 0)), x(F, 0)) == 1


def test_geodesic_sphere_ball_examples(F):
    assert geodesic(F, x(F, 0), x(F, 3)) == [x(F, k) for k in range(4)]
    assert len(ball(F, x(F, 0), 0)) == 1
    F3 = make_field(F.backend, 3)
    assert len(sphere(F3, base_vertex(F3), 2)) == 12


def test_halfline_examples(F, rng):
    w, wp = end_omega(F), end_omega_prime(F)
    assert halfline(F, x(F, 0), w, 3) == [x(F, k) for k in range(4)]
    assert halfline(F, x(F, 0), wp, 3) == [x(F, -k) for k in range(4)]
    y = random_vertex(F, rng)
    assert halfline(F, y, w, 0) == [y]
    with pytest.raises(ZeroVector) as err:
        end_canonical(F, F.zero, F.zero)
    assert err.value.code == "ZERO_VECTOR"


def test_stabilizes_end_examples(F, rng):
    w = end_omega(F)
    u = mat(F, F.pi, 1, 0, F.one + F.pi)
    assert stabilizes_end(u, w)
    assert not stabilizes_end(swap(F), w)
    y = random_vertex(F, rng)
    a = halfline(F, act(u, y), act_end(u, w), 12)
    b = halfline(F, act(u, y), w, 12)
    assert a == b


def test_apartment_window_examples(F, rng):
    w, wp = end_omega(F), end_omega_prime(F)
    assert apartment_window(F, wp, w, 2) == [x(F, k) for k in range(-2, 3)]
    w1, w2 = (end_canonical(F, F.random_scalar(rng), F.random_scalar(rng)) for _ in range(2))
    if w1 != w2:
        win = apartment_window(F, w1, w2, 4)
        assert apartment_window(F, w2, w1, 4) == win[::-1]
        mid = win[4]
        covered = set(halfline(F, mid, w1, 4)) | set(halfline(F, mid, w2, 4))
        assert set(win) <= covered
    with pytest.raises(EqualEnds) as err:
        apartment_window(F, w, w, 1)
    assert err.value.code == "EQUAL_ENDS"


def test_crossroad_examples(F, rng):
    w, wp, one = end_omega(F), end_omega_prime(F), end_canonical(F, F.one, F.one)
    assert crossroad(F, w, wp, one) == x(F, 0) == crossroad_by_apartments(F, w, wp, one)
    with pytest.raises(NotDistinct) as err:
        crossroad(F, w, w, one)
    assert err.value.code == "NOT_DISTINCT"
    for _ in range(10):
        ends = [end_canonical(F, F.random_scalar(rng, -3, 3), F.one) for _ in range(3)]
        if len(set(ends)) < 3:
            continue
        c = crossroad(F, *ends)
        assert crossroad(F, ends[2], ends[0], ends[1]) == c
        g = random_mat2(F, rng)
        assert crossroad(F, *(act_end(g, e) for e in ends)) == act(g, c)


def test_text_formats(F, rng):
    for _ in range(20):
        y = random_vertex(F, rng)
        assert parse_vertex(F, format_vertex(F, y)) == y
        w = end_canonical(F, F.random_scalar(rng), F.random_scalar(rng))
        assert parse_end(F, format_end(F, w)) == w
    for bad in ("0;0", "(a;0)", "(0,0)"):
        with pytest.raises(ParseError):
            parse_vertex(F, bad)
    for bad in ("[1:0", "[0:0]", "1:0"):
        with pytest.raises(ParseError):
            parse_end(F, bad)


def test_ball_dot_is_deterministic():
    F = make_field("QP", 2)
    dot = ball_dot(F, base_vertex(F), 2)
    assert dot == ball_dot(F, base_vertex(F), 2)
    lines = dot.splitlines()
    assert lines[0] == "graph ball {" and lines[-1] == "}"
    assert sum(1 for ln in lines if "--" not in ln and ln.endswith('";')) == 10
    assert sum(1 for ln in lines if "--" in ln) == 9


# -- oracles and properties -------------------------------------------------


@pytest.mark.parametrize("backend,p", [("QP", 2), ("QP", 3), ("LAURENT", 2), ("LAURENT", 3)])
def test_metric_axioms_and_bfs_agreement(backend, p):
    F = make_field(backend, p)
    verts, D = bfs_distances(F, base_vertex(F), 3)
    n = len(verts)
    M = [[distance(F, verts[i], verts[j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            assert M[i][j] == D[i, j]
            assert M[i][j] == M[j][i]
            assert (M[i][j] == 0) == (i == j)
    step = max(1, n // 25)
    for i in range(0, n, step):
        for j in range(0, n, step):
            for k in range(0, n, step):
                assert M[i][k] <= M[i][j] + M[j][k]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_sphere_sizes(p):
    for backend in ("QP", "LAURENT"):
        F = make_field(backend, p)
        for r in range(1, 5 if p < 5 else 4):
            assert len(sphere(F, base_vertex(F), r)) == (p + 1) * p ** (r - 1)


@given(seeds)
def test_action_is_an_isometry(seed):
    rng = random.Random(seed)
    F = make_field(*[("QP", 3), ("LAURENT", 2)][seed % 2])
    g = random_mat2(F, rng)
    y, z = random_vertex(F, rng), random_vertex(F, rng)
    assert distance(F, act(g, y), act(g, z)) == distance(F, y, z)
    assert act(g.scale(F.pi), y) == act(g, y)
    h = random_mat2(F, rng)
    assert act(g * h, y) == act(g, act(h, y))


@given(seeds)
def test_geodesic_is_a_path(seed):
    rng = random.Random(seed)
    F = make_field(*[("QP", 2), ("LAURENT", 3)][seed % 2])
    y, z = random_vertex(F, rng), random_vertex(F, rng)
    path = geodesic(F, y, z)
    assert path[0] == y and path[-1] == z
    assert len(path) - 1 == distance(F, y, z)
    assert len(set(path)) == len(path)
    assert all(distance(F, a, b) == 1 for a, b in zip(path, path[1:]))


def _greedy_halfline(F, start, w, length):
    # Step to the neighbour closest to a far vertex of an apartment ending at w.
    other = end_omega_prime(F) if w != end_omega_prime(F) else end_omega(F)
    far = apartment_window(F, other, w, 40)[-1]
    out = [start]
    for _ in range(length):
        out.append(min(neighbors(F, out[-1]), key=lambda z: distance(F, z, far)))
    return out


@given(seeds)
def test_halfline_matches_greedy_oracle(seed):
    rng = random.Random(seed)
    F = make_field(*[("QP", 3), ("LAURENT", 2)][seed % 2])
    y = random_vertex(F, rng, 4)
    u, v = F.random_scalar(rng, -3, 3, 0.2), F.random_scalar(rng, -3, 3, 0.2)
    w = end_canonical(F, u, v if (u != F.zero or v != F.zero) else F.one)
    ray = halfline(F, y, w, 5)
    assert ray == _greedy_halfline(F, y, w, 5)
    assert halfline(F, y, w, 3) == ray[:4]


@given(seeds)
def test_halflines_to_one_end_merge(seed):
    rng = random.Random(seed)
    F = make_field("QP", 2)
    y, z = random_vertex(F, rng), random_vertex(F, rng)
    w = end_canonical(F, F.random_scalar(rng, -3, 3), F.one)
    ry, rz = halfline(F, y, w, 30), halfline(F, z, w, 30)
    # the rays meet within d(y, z) steps and agree from there on
    meet = next(j for j, v in enumerate(rz) if v in set(ry))
    assert meet <= distance(F, y, z)
    i = ry.index(rz[meet])
    tail = min(len(ry) - i, len(rz) - meet)
    assert tail > 0 and ry[i : i + tail] == rz[meet : meet + tail]


@given(seeds)
def test_stabilizer_predicates_match_action(seed):
    rng = random.Random(seed)
    F = make_field("QP", 3)
    k = random_k(F, rng).scale(F.random_scalar(rng))
    g = random_mat2(F, rng)
    for h in (k, g):
        fixes0 = act(h, x(F, 0)) == x(F, 0)
        assert fixes0 == member(proj_normalize(h), "K")
        fixes01 = fixes0 and act(h, x(F, 1)) == x(F, 1)
        assert fixes01 == member(proj_normalize(h), "I")
