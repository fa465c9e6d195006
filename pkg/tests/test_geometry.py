import json
import random
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from btk.errors import (
    CapacityError,
    DistanceMismatch,
    DomainTooSmall,
    InvalidLocalAut,
    NotInSubgroup,
    RadiusTooSmall,
    VertexNotOnApartment,
)
from btk.field import make_field
from btk.geometry import (
    ELLIPTIC,
    HYPERBOLIC,
    INVERSION,
    LOCALLY_PGL2,
    VIOLATION,
    LocalAut,
    alpha_tau,
    bruhat_geo,
    cartan_geo,
    classify,
    edge_end_orientation,
    end_pair_witness,
    fixes_standard_apartment,
    ghat_local_test,
    in_b_hat,
    in_i_hat,
    induced_edge_group,
    iwahori_borel_geo,
    iwahori_geo,
    iwasawa_geo,
    k_double_coset,
    levi_geo,
    nk_orbit_check,
    pgl2_match_on_ball,
    sphere_witness,
    tau_power,
    three_point_map,
    weak2_witness,
)
from btk.gl2 import diag, identity, mat, proj_eq, random_borel, random_iwahori, random_k, random_mat2, swap
from btk.oracles import classify_by_displacement, congruence_fixes_ball, find_graft
from btk.tree import (
    Edge,
    act,
    act_end,
    ball,
    base_vertex,
    edge_ball,
    distance,
    end_canonical,
    end_omega,
    end_omega_prime,
    halfline,
    random_at_distance,
    random_vertex,
    sphere,
    standard_vertex,
)

seeds = st.integers(min_value=0, max_value=2**32)
FIXTURE = Path(__file__).parent / "fixtures" / "graft_p5.json"


def x(F, n):
    return standard_vertex(F, n)


def _field(seed):
    return make_field(*[("QP", 2), ("QP", 3), ("QP", 5), ("LAURENT", 2), ("LAURENT", 3)][seed % 5])


# -- alpha, tau, classification ---------------------------------------------


def test_alpha_tau_examples(F):
    alpha, tau = alpha_tau(F)
    assert act(alpha, x(F, 0)) == x(F, 0)
    assert act(tau, x(F, 2)) == x(F, 3)
    for n in range(-4, 5):
        assert act(alpha * alpha, x(F, n)) == x(F, n)


def test_classify_examples(F):
    c = classify(swap(F))
    assert c.kind == ELLIPTIC and c.fixed_vertex == x(F, 0)
    c = classify(diag(F, F.one, F.pi))
    assert c.kind == HYPERBOLIC and c.length == 1
    assert set(c.axis_window) <= {x(F, k) for k in range(-5, 6)}
    assert classify_by_displacement(diag(F, F.one, F.pi)) == (HYPERBOLIC, 1)
    c = classify(mat(F, 0, 1, F.pi, 0))
    assert c.kind == INVERSION and set(c.edge) == {x(F, 0), x(F, 1)}
    assert classify_by_displacement(mat(F, 0, 1, F.pi, 0)) == (INVERSION, 1)


@given(seeds)
def test_classify_matches_displacement_oracle(seed):
    F = _field(seed)
    rng = random.Random(seed)
    g = random_mat2(F, rng, -3, 3)
    c = classify(g)
    assert (c.kind, c.min_displacement) == classify_by_displacement(g, 8)
    if c.kind == HYPERBOLIC:
        w = c.axis_window
        assert all(distance(F, y, act(g, y)) == c.length for y in w)


@given(seeds)
def test_pruned_displacement_search_is_exhaustive(seed):
    F = make_field(*[("QP", 2), ("QP", 3)][seed % 2])
    g = random_mat2(F, random.Random(seed), -2, 2)
    radius = 5 if F.p == 2 else 4
    assert classify_by_displacement(g, radius) == classify_by_displacement(g, radius, prune=False)


# -- witnesses --------------------------------------------------------------


def test_weak2_examples(F, rng):
    g = weak2_witness(F, x(F, 0), x(F, 1), x(F, 0), x(F, -1))
    assert act(g, x(F, 0)) == x(F, 0) and act(g, x(F, 1)) == x(F, -1)
    assert act(swap(F), x(F, 1)) == x(F, -1)  # alpha is one valid witness
    y, z = random_vertex(F, rng), random_vertex(F, rng)
    assert weak2_witness(F, y, z, y, z) == identity(F)
    with pytest.raises(DistanceMismatch) as err:
        weak2_witness(F, x(F, 0), x(F, 1), x(F, 0), x(F, 2))
    assert err.value.code == "DISTANCE_MISMATCH"


def test_sphere_witness_examples(F):
    assert sphere_witness(F, x(F, 0), x(F, 2), x(F, 2)) == identity(F)
    g = sphere_witness(F, x(F, 0), x(F, 2), x(F, -2))
    assert act(g, x(F, 0)) == x(F, 0) and act(g, x(F, 2)) == x(F, -2)
    with pytest.raises(DistanceMismatch):
        sphere_witness(F, x(F, 0), x(F, 1), x(F, 2))


def test_sphere_witness_exhaustive_p2():
    F = make_field("QP", 2)
    s = sphere(F, x(F, 0), 2)
    for y in s:
        for z in s:
            g = sphere_witness(F, x(F, 0), y, z)
            assert act(g, x(F, 0)) == x(F, 0) and act(g, y) == z


@given(seeds)
def test_weak2_random_quadruples(seed):
    F = _field(seed)
    rng = random.Random(seed)
    d = rng.randint(0, 4)
    x1 = random_vertex(F, rng)
    x2 = random_at_distance(F, rng, x1, d)
    y1 = random_vertex(F, rng)
    y2 = random_at_distance(F, rng, y1, d)
    g = weak2_witness(F, x1, x2, y1, y2)
    assert act(g, x1) == y1 and act(g, x2) == y2


def test_end_pair_examples(F, rng):
    w, wp, x0 = end_omega(F), end_omega_prime(F), x(F, 0)
    assert end_pair_witness(F, x0, w, wp, x0, w, wp) == identity(F)
    g = end_pair_witness(F, x0, w, wp, x0, wp, w)
    assert act(g, x0) == x0 and act_end(g, w) == wp and act_end(g, wp) == w
    assert proj_eq(g, swap(F))
    with pytest.raises(VertexNotOnApartment) as err:
        end_pair_witness(F, x(F, 0), w, wp, end_vertex := x(F, 0), w, end_canonical(F, F.pi_pow(-3), F.one))
    assert err.value.code == "VERTEX_NOT_ON_APARTMENT"
    assert end_vertex == x0


@given(seeds)
def test_end_pair_recovers_constraints(seed):
    F = _field(seed)
    rng = random.Random(seed)
    g = random_mat2(F, rng)
    w, wp, xk = end_omega(F), end_omega_prime(F), x(F, rng.randint(-3, 3))
    h = end_pair_witness(F, xk, w, wp, act(g, xk), act_end(g, w), act_end(g, wp))
    assert act(h, xk) == act(g, xk)
    assert act_end(h, w) == act_end(g, w) and act_end(h, wp) == act_end(g, wp)


def test_three_point_map(F, rng):
    src = [end_omega(F), end_omega_prime(F), end_canonical(F, F.one, F.one)]
    g = random_mat2(F, rng)
    dst = [act_end(g, w) for w in src]
    assert proj_eq(three_point_map(F, src, dst), g)


def test_edge_end_orientation_examples(F, rng):
    e = Edge(x(F, 0), x(F, 1))
    assert edge_end_orientation(F, e, end_omega(F)) == x(F, 1)
    assert edge_end_orientation(F, e, end_omega_prime(F)) == x(F, 0)
    for _ in range(40):
        sigma = end_canonical(F, F.random_scalar(rng, -3, 3), F.one)
        side = edge_end_orientation(F, e, sigma)
        v_on = halfline(F, x(F, 0), sigma, 1)[1] == x(F, 1)
        u_on = halfline(F, x(F, 1), sigma, 1)[1] == x(F, 0)
        assert v_on != u_on and side == (x(F, 1) if v_on else x(F, 0))


def test_fixes_standard_apartment_examples(F, rng):
    u = diag(F, F.random_unit(rng), F.random_unit(rng))
    assert fixes_standard_apartment(u)
    assert not fixes_standard_apartment(tau_power(F, 1))
    n = mat(F, 1, 1, 0, 1)
    assert act(n, x(F, -1)) != x(F, -1)
    assert not fixes_standard_apartment(n)


# -- geometric decompositions -----------------------------------------------


def test_geo_decomposition_examples(F):
    e = identity(F)
    gf = iwasawa_geo(e)
    assert [f for _, f in gf.factors] == [e, e]
    assert cartan_geo(diag(F, F.one, F.pi_pow(3))).n == 3
    assert bruhat_geo(mat(F, F.pi, 1, 0, F.one + F.pi)).case == "B"
    b = mat(F, F.pi, 1, 0, 1)
    lg = levi_geo(b)
    h = lg.factors[1][1]
    assert proj_eq(tau_power(F, -lg.n) * b, h)
    assert any(act(h, x(F, i)) == x(F, i) for i in range(-10, 11))
    kg = k_double_coset(swap(F))
    assert kg.case == "IaI" and kg.check()
    assert act(swap(F), x(F, 1)) == x(F, -1)


def test_geo_decomposition_errors(F):
    tau = tau_power(F, 1)
    cases = [(levi_geo, swap(F), "NOT_IN_B_HAT"), (iwahori_geo, swap(F), "NOT_IN_I_HAT"), (k_double_coset, tau, "NOT_IN_K_HAT")]
    for fn, g, code in cases:
        with pytest.raises(NotInSubgroup) as err:
            fn(g)
        assert err.value.code == code


@given(seeds)
def test_geo_decompositions_on_random_elements(seed):
    F = _field(seed)
    rng = random.Random(seed)
    g = random_mat2(F, rng)
    for gf in (iwasawa_geo(g), cartan_geo(g), bruhat_geo(g), iwahori_borel_geo(g)):
        assert gf.check()
    assert cartan_geo(g).n == distance(F, x(F, 0), act(g, x(F, 0)))
    bg = bruhat_geo(g)
    assert (bg.case == "B") == in_b_hat(g)
    if bg.case != "B":
        n1, n2 = bg.factors[0][1], bruhat_geo(g, route="unipotent").factors[0][1]
        assert fixes_standard_apartment(n1.inv() * n2)
    assert levi_geo(random_borel(F, rng)).check()
    ig = iwahori_geo(random_iwahori(F, rng))
    assert ig.check()
    k = random_k(F, rng)
    kg = k_double_coset(k)
    assert kg.check() and (kg.case == "I") == in_i_hat(k)


@given(seeds)
def test_cartan_index_is_k_biinvariant(seed):
    F = _field(seed)
    rng = random.Random(seed)
    g = random_mat2(F, rng)
    k1, k2 = random_k(F, rng), random_k(F, rng)
    assert cartan_geo(k1 * g * k2).n == cartan_geo(g).n


# -- index formula ----------------------------------------------------------


def test_nk_orbit_examples():
    F3 = make_field("QP", 3)
    assert nk_orbit_check(F3, 0).orbit_size == 3
    F2 = make_field("QP", 2)
    for k in range(-2, 3):
        r = nk_orbit_check(F2, k)
        assert r.orbit_size == 2 and r.elements_ok and r.passed


def test_nk_orbit_laurent(F):
    for k in (-1, 0, 2):
        assert nk_orbit_check(F, k).orbit_size == F.q


# -- local automorphisms and the local PGL2 test ----------------------------


def test_local_aut_validation(F, rng):
    g = random_mat2(F, rng)
    f = LocalAut.from_matrix(g, x(F, 0), 2).validate()
    data = json.loads(json.dumps(f.to_json()))
    assert LocalAut.from_json(data).mapping == f.mapping
    broken = dict(f.mapping)
    a, b = list(broken)[1:3]
    broken[a], broken[b] = broken[b], broken[a]
    with pytest.raises(InvalidLocalAut) as err:
        LocalAut(F, x(F, 0), 2, broken).validate()
    assert err.value.code == "INVALID_LOCAL_AUT"
    with pytest.raises(InvalidLocalAut):
        LocalAut(F, x(F, 0), 2, {x(F, 0): x(F, 0)}).validate()


def test_pgl2_match_examples(F, rng):
    edge = Edge(x(F, 0), x(F, 1))
    f = LocalAut.from_matrix(identity(F), x(F, 0), 3)
    for e in (1, 2) if F.p < 5 else (1,):
        for strategy in ("enumerate", "ends"):
            assert proj_eq(pgl2_match_on_ball(f, edge, e, strategy), identity(F))
    g = random_mat2(F, rng)
    f = LocalAut.from_matrix(g, x(F, 0), 3)
    h = pgl2_match_on_ball(f, edge, 1)
    assert all(act(h, y) == act(g, y) for y in edge_ball(F, edge, 1))
    with pytest.raises(DomainTooSmall) as err:
        pgl2_match_on_ball(LocalAut.from_matrix(g, x(F, 0), 1), edge, 1)
    assert err.value.code == "DOMAIN_TOO_SMALL"


def test_ghat_errors_and_capacity():
    F = make_field("QP", 3)
    f = LocalAut.from_matrix(identity(F), x(F, 0), 2)
    with pytest.raises(RadiusTooSmall) as err:
        ghat_local_test(f, 2)
    assert err.value.code == "RADIUS_TOO_SMALL"
    with pytest.raises(CapacityError) as err:
        induced_edge_group(F, 3)
    assert err.value.code == "CAPACITY"
    with pytest.raises(CapacityError):
        induced_edge_group(make_field("QP", 7), 1)
    # the tripod route has no capacity bound
    g = random_mat2(make_field("QP", 7), random.Random(1))
    f7 = LocalAut.from_matrix(g, base_vertex(g.F), 2)
    assert ghat_local_test(f7, 1, "ends").kind == LOCALLY_PGL2


@given(seeds)
def test_restrictions_are_locally_pgl2(seed):
    F = make_field(*[("QP", 2), ("QP", 3), ("LAURENT", 2)][seed % 3])
    rng = random.Random(seed)
    g = random_mat2(F, rng)
    f = LocalAut.from_matrix(g, random_vertex(F, rng, 3), 3)
    for e in (1, 2):
        assert ghat_local_test(f, e).kind == LOCALLY_PGL2
        assert ghat_local_test(f, e, "ends").kind == LOCALLY_PGL2


def test_graft_fixture_is_rejected():
    data = json.loads(FIXTURE.read_text())
    F = make_field(data["backend"], data["p"])
    graft, induced, full = find_graft(F)
    assert data["outcome"] == ("GRAFT_REJECTED" if graft is not None else "INDUCED_IS_FULL")
    assert (induced, full) == (data["induced_size"], data["full_size"])
    recorded = LocalAut.from_json(data["graft"])
    assert recorded.mapping == graft.mapping
    for strategy in ("enumerate", "ends"):
        v = ghat_local_test(recorded, 1, strategy)
        assert v.kind == VIOLATION
        assert v.edge in set(
            Edge(a, b) for a in ball(F, x(F, 0), 1) for b in ball(F, x(F, 0), 1) if distance(F, a, b) == 1
        )
    assert pgl2_match_on_ball(recorded, Edge(x(F, 0), x(F, 1)), 1) is None
    # e = 0 only asks for an edge witness, which always exists
    assert ghat_local_test(recorded, 0).kind == LOCALLY_PGL2


def test_small_primes_graft_search():
    F2 = make_field("QP", 2)
    graft, induced, full = find_graft(F2)
    assert graft is None and induced == full == 4
    F3 = make_field("QP", 3)
    graft, induced, full = find_graft(F3)
    assert graft is not None and (induced, full) == (18, 36)
    assert ghat_local_test(graft, 1).kind == VIOLATION


def test_congruence_principle():
    for p in (2, 3):
        F = make_field("QP", p)
        for m in (1, 2):
            assert congruence_fixes_ball(F, m, 2) == p**8
    F = make_field("LAURENT", 2)
    assert congruence_fixes_ball(F, 2, 1) == 16
