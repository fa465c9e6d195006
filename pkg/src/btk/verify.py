"""Verification suites.

Each suite draws its cases from a ``random.Random(seed)`` and returns a
:class:`VerifyReport`.  Reports serialize without timing information so that
two runs with the same seed are byte-identical; wall time is kept on the
report object for the caller to print separately.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from itertools import permutations

from .errors import BTKError, UnknownSuite
from .field import make_field
from .geometry import (
    LOCALLY_PGL2,
    VIOLATION,
    LocalAut,
    bruhat_geo,
    cartan_geo,
    classify,
    fixes_standard_apartment,
    fixed_standard_index,
    ghat_local_test,
    in_b_hat,
    in_b_prime_hat,
    in_i_hat,
    iwahori_borel_geo,
    iwahori_geo,
    iwasawa_geo,
    k_double_coset,
    levi_geo,
    nk_orbit_check,
    sphere_witness,
    weak2_witness,
)
from .gl2 import (
    IWAHORI_ORDERINGS,
    Mat2,
    SubgroupTag,
    bruhat,
    cartan,
    diag,
    elementary_divisors,
    format_mat,
    iwahori_factor,
    iwasawa,
    levi,
    member,
    proj_normalize,
    random_borel,
    random_iwahori,
    random_k,
    random_mat2,
)
from .oracles import (
    bfs_distances,
    classify_by_displacement,
    congruence_fixes_ball,
    crossroad_by_apartments,
    find_graft,
)
from .tree import (
    act,
    act_end,
    ball,
    base_vertex,
    crossroad,
    distance,
    end_canonical,
    end_omega,
    format_end,
    format_vertex,
    neighbors,
    random_at_distance,
    random_vertex,
    sphere,
    standard_vertex,
)


@dataclass
class VerifyReport:
    suite: str
    backend: str
    p: int
    seed: int | None
    params: dict
    cases: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self):
        return not self.failures

    def fail(self, case, reason, **args):
        self.failures.append({"case": case, "reason": reason, "args": args})

    def to_dict(self):
        return {
            "suite": self.suite,
            "backend": self.backend,
            "p": self.p,
            "seed": self.seed,
            "params": self.params,
            "cases": self.cases,
            "passed": self.passed,
            "failures": sorted(self.failures, key=lambda f: f["case"]),
            "details": self.details,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _check(report, case, ok, reason, **args):
    if not ok:
        report.fail(case, reason, **args)


def _guard(report, case, fn, **args):
    """Run ``fn``; record a library error as a failure instead of aborting."""
    try:
        return fn()
    except BTKError as exc:
        report.fail(case, f"{exc.code}: {exc}", **args)
        return None


def _random_end(F, rng, vmin=-3, vmax=3):
    while True:
        u = F.random_scalar(rng, vmin, vmax, 0.1)
        v = F.random_scalar(rng, vmin, vmax, 0.1)
        if u != F.zero or v != F.zero:
            return end_canonical(F, u, v)


def _distinct_ends(F, rng, n=3):
    ends = []
    while len(ends) < n:
        w = _random_end(F, rng)
        if w not in ends:
            ends.append(w)
    return ends


# ---------------------------------------------------------------------------
# suites


def suite_cartan_distance(F, rng, report, radius=4):
    """Elementary-divisor distance equals graph distance on all pairs of a ball."""
    verts, D = bfs_distances(F, base_vertex(F), radius)
    n = len(verts)
    for i in range(n):
        x = verts[i]
        for j in range(n):
            d = distance(F, x, verts[j])
            if d != D[i, j]:
                report.fail(i * n + j, "distance mismatch", x=format_vertex(F, x), y=format_vertex(F, verts[j]))
    report.cases = n * n
    report.details = {"ball_size": n}


def suite_decomp_recompose(F, rng, report, cases=1000):
    """Every classical factorization recomposes exactly, factors in place."""
    B, K, I, T, N = SubgroupTag.B, SubgroupTag.K, SubgroupTag.I, SubgroupTag.T, SubgroupTag.N
    counts = {"B": 0, "BSB": 0}
    for case in range(cases):
        g = random_mat2(F, rng)
        args = {"matrix": format_mat(g)}
        b, k = iwasawa(g)
        _check(report, case, b * k == g and member(b, B) and member(k, K), "iwasawa", **args)
        cf = cartan(g)
        _check(
            report,
            case,
            cf.recompose() == g and member(cf.k1, K) and member(cf.k2, K) and cf.a <= cf.b,
            "cartan",
            **args,
        )
        _check(report, case, cf.exponents == elementary_divisors(g), "cartan exponents", **args)
        bf = bruhat(g)
        counts[bf.case] += 1
        ok = bf.recompose() == g and (bf.case == "B") == (g.c == F.zero)
        ok = ok and member(bf.b1, B) and (bf.b2 is None or member(bf.b2, B))
        _check(report, case, ok, "bruhat", **args)
        for bb in (b, random_borel(F, rng)):
            n, t = levi(bb)
            _check(report, case, n * t == bb and member(n, N) and member(t, T), "levi", matrix=format_mat(bb))
        i = random_iwahori(F, rng)
        for ordering in IWAHORI_ORDERINGS:
            fs = iwahori_factor(i, ordering)
            ok = fs[0] * fs[1] * fs[2] == i
            ok = ok and all(member(f, I) and member(f, tag) for f, tag in zip(fs, ordering))
            _check(report, case, ok, "iwahori", matrix=format_mat(i), ordering=[t.value for t in ordering])
    report.cases = cases
    report.details = {"bruhat_cases": counts}


def suite_regularity(F, rng, report, cases=200, radius=4):
    """q+1 neighbours everywhere and the sphere-size formula."""
    q = F.q
    for case in range(cases):
        x = random_vertex(F, rng, 8)
        nb = neighbors(F, x)
        ok = len(nb) == q + 1 and len(set(nb)) == q + 1 and all(distance(F, x, y) == 1 for y in nb)
        _check(report, case, ok, "neighbour count", vertex=format_vertex(F, x))
    sizes = {}
    for r in range(1, radius + 1):
        size = len(sphere(F, base_vertex(F), r))
        sizes[str(r)] = size
        _check(report, cases + r, size == (q + 1) * q ** (r - 1), "sphere size", r=r)
    report.cases = cases + radius
    report.details = {"sphere_sizes": sizes}


def _stabilizer_sample(F, rng, case):
    """Mix of generic elements and scaled K, Iwahori and Borel elements so
    that both sides of each equivalence are exercised."""
    kind = case % 4
    if kind == 0:
        return random_mat2(F, rng)
    z = F.random_scalar(rng, -3, 3)
    if kind == 1:
        return random_k(F, rng).scale(z)
    if kind == 2:
        return random_iwahori(F, rng).scale(z)
    return random_borel(F, rng).scale(z)


def suite_stabilizers(F, rng, report, cases=500):
    """Vertex, edge and end stabilizers match the matrix subgroups."""
    x0, x1 = standard_vertex(F, 0), standard_vertex(F, 1)
    omega = end_omega(F)
    tally = {"K": 0, "I": 0, "B": 0}
    for case in range(cases):
        g = _stabilizer_sample(F, rng, case)
        h = proj_normalize(g)
        args = {"matrix": format_mat(g)}
        fixes0 = act(g, x0) == x0
        fixes01 = fixes0 and act(g, x1) == x1
        stab = in_b_hat(g)
        tally["K"] += fixes0
        tally["I"] += fixes01
        tally["B"] += stab
        _check(report, case, fixes0 == member(h, SubgroupTag.K), "vertex stabilizer", **args)
        _check(report, case, fixes01 == member(h, SubgroupTag.I), "edge stabilizer", **args)
        _check(report, case, stab == member(h, SubgroupTag.B), "end stabilizer", **args)
        _check(report, case, stab == (act_end(g, omega) == omega), "end action", **args)
    report.cases = cases
    report.details = {"positives": tally}


def suite_sphere_transitivity(F, rng, report, radius=3, cases=200):
    """Exhaustive sphere witnesses around x_0 and random weak 2-transitivity
    witnesses."""
    x0 = base_vertex(F)
    case = 0
    for r in range(radius + 1):
        sph = sphere(F, x0, r)
        for y in sph:
            for z in sph:
                g = _guard(report, case, lambda: sphere_witness(F, x0, y, z), y=format_vertex(F, y), z=format_vertex(F, z))
                if g is not None:
                    _check(report, case, act(g, x0) == x0 and act(g, y) == z, "sphere witness", y=format_vertex(F, y))
                case += 1
    exhaustive = case
    for _ in range(cases):
        d = rng.randint(0, 4)
        x1 = random_vertex(F, rng)
        x2 = random_at_distance(F, rng, x1, d)
        y1 = random_vertex(F, rng)
        y2 = random_at_distance(F, rng, y1, d)
        args = {k: format_vertex(F, v) for k, v in (("x1", x1), ("x2", x2), ("y1", y1), ("y2", y2))}
        g = _guard(report, case, lambda: weak2_witness(F, x1, x2, y1, y2), **args)
        if g is not None:
            _check(report, case, act(g, x1) == y1 and act(g, x2) == y2, "weak2 witness", **args)
        case += 1
    report.cases = case
    report.details = {"sphere_pairs": exhaustive, "random_quadruples": cases}


def suite_crossroad(F, rng, report, cases=300, equivariance=100):
    """Crossroads against apartment intersection, symmetry and equivariance."""
    for case in range(cases):
        w = _distinct_ends(F, rng)
        args = {"ends": [format_end(F, e) for e in w]}
        c = crossroad(F, *w)
        _check(report, case, c == crossroad_by_apartments(F, *w), "oracle mismatch", **args)
        _check(report, case, all(crossroad(F, *perm) == c for perm in permutations(w)), "not symmetric", **args)
        if case < equivariance:
            g = random_mat2(F, rng)
            gw = [act_end(g, e) for e in w]
            _check(report, case, crossroad(F, *gw) == act(g, c), "not equivariant", matrix=format_mat(g), **args)
    report.cases = cases


def _classify_sample(F, rng, radius):
    # Keep d(x_0, g x_0) <= 2 * radius so every minimizer lies in the ball.
    x0 = base_vertex(F)
    while True:
        g = random_mat2(F, rng)
        if distance(F, x0, act(g, x0)) <= 2 * radius:
            return g


def suite_classify_oracle(F, rng, report, cases=500, radius=8):
    """Trace/determinant classification against the displacement oracle."""
    tally = {}
    for case in range(cases):
        g = _classify_sample(F, rng, radius)
        cl = classify(g)
        expected = classify_by_displacement(g, radius)
        tally[cl.kind] = tally.get(cl.kind, 0) + 1
        _check(
            report,
            case,
            (cl.kind, cl.min_displacement) == expected,
            "classification mismatch",
            matrix=format_mat(g),
            got=[cl.kind, cl.min_displacement],
            oracle=list(expected),
        )
    report.cases = cases
    report.details = {"kinds": dict(sorted(tally.items()))}


def suite_geo_decomp(F, rng, report, cases=500, pairs=200, ray=8):
    """Geometric decompositions on PGL2 elements."""
    tally = {}
    pairs_done = 0

    def note(gf):
        key = f"{gf.kind}:{gf.case}"
        tally[key] = tally.get(key, 0) + 1
        return gf

    for case in range(cases):
        g = random_mat2(F, rng)
        args = {"matrix": format_mat(g)}
        _guard(report, case, lambda: note(iwasawa_geo(g)), op="iwasawa_geo", **args)
        cg = _guard(report, case, lambda: note(cartan_geo(g)), op="cartan_geo", **args)
        if cg is not None:
            x0 = base_vertex(F)
            _check(report, case, cg.n == distance(F, x0, act(g, x0)), "cartan index", **args)
            k1, k2 = random_k(F, rng), random_k(F, rng)
            _check(report, case, cartan_geo(k1 * g * k2).n == cg.n, "cartan index not K-invariant", **args)
        bg = _guard(report, case, lambda: note(bruhat_geo(g)), op="bruhat_geo", **args)
        if bg is not None:
            _check(report, case, (bg.case == "B") == in_b_hat(g), "bruhat case", **args)
            if bg.case != "B" and pairs_done < pairs:
                other = bruhat_geo(g, route="unipotent")
                n1, n2 = bg.factors[0][1], other.factors[0][1]
                _check(report, case, fixes_standard_apartment(n1.inv() * n2), "N-part not unique mod H", **args)
                pairs_done += 1
        _guard(report, case, lambda: note(iwahori_borel_geo(g)), op="iwahori_borel_geo", **args)

        b = random_borel(F, rng)
        lg = _guard(report, case, lambda: note(levi_geo(b)), op="levi_geo", matrix=format_mat(b))
        if lg is not None:
            h = lg.factors[1][1]
            i = fixed_standard_index(h)
            ok = i is not None and all(act(h, standard_vertex(F, i + j)) == standard_vertex(F, i + j) for j in range(ray))
            _check(report, case, ok, "N-part does not fix a ray toward omega", matrix=format_mat(b))

        i_el = random_iwahori(F, rng)
        ig = _guard(report, case, lambda: note(iwahori_geo(i_el)), op="iwahori_geo", matrix=format_mat(i_el))
        if ig is not None:
            f1, f2 = ig.factors[0][1], ig.factors[1][1]
            ok = in_b_hat(f1) and in_b_prime_hat(f2) and in_i_hat(f1) and in_i_hat(f2)
            _check(report, case, ok, "iwahori factors", matrix=format_mat(i_el))
        u = diag(F, F.random_unit(rng), F.random_unit(rng))
        both = in_i_hat(u) and in_b_hat(u) and in_b_prime_hat(u)
        _check(report, case, both and fixes_standard_apartment(u), "intersection is not H", matrix=format_mat(u))

        k = random_k(F, rng)
        kg = _guard(report, case, lambda: note(k_double_coset(k)), op="k_double_coset", matrix=format_mat(k))
        if kg is not None:
            _check(report, case, (kg.case == "I") == in_i_hat(k), "K double coset case", matrix=format_mat(k))
    report.cases = cases
    report.details = {"cases_by_kind": dict(sorted(tally.items())), "coset_pairs": pairs_done}


def suite_nk_index(F, rng, report, kmin=-2, kmax=2):
    """Orbit size q for consecutive unipotent-type stabilizers."""
    sizes = {}
    for case, k in enumerate(range(kmin, kmax + 1)):
        r = nk_orbit_check(F, k)
        sizes[str(k)] = r.orbit_size
        _check(report, case, r.passed, "index differs from q", k=k, orbit_size=r.orbit_size, q=F.q)
    report.cases = kmax - kmin + 1
    report.details = {"q": F.q, "orbit_sizes": sizes}


def suite_ghat_local(F, rng, report, cases=200, radius=3, levels=(1, 2), cross_check=20):
    """Local PGL2 test on restrictions of PGL2 elements, the congruence
    principle, and the grafted counterexample fixture."""
    levels = tuple(levels)
    x0 = base_vertex(F)
    case = 0
    for e in levels:
        for j in range(cases):
            g = random_mat2(F, rng)
            f = LocalAut.from_matrix(g, x0, radius)
            v = _guard(report, case, lambda: ghat_local_test(f, e), matrix=format_mat(g), e=e)
            if v is not None:
                _check(report, case, v.kind == LOCALLY_PGL2, "restriction rejected", matrix=format_mat(g), e=e)
            if j < cross_check:
                v2 = _guard(report, case, lambda: ghat_local_test(f, e, "ends"), matrix=format_mat(g), e=e)
                if v2 is not None:
                    _check(report, case, v2.kind == LOCALLY_PGL2, "ends strategy disagrees", matrix=format_mat(g), e=e)
            case += 1
    # congruence principle
    congruence = {}
    level = 2 if F.p <= 3 else 1
    for m in (1, 2):
        try:
            congruence[str(m)] = congruence_fixes_ball(F, m, level)
        except AssertionError as exc:
            report.fail(case, f"congruence principle: {exc}", m=m)
        pm = F.pi_pow(m)
        for _ in range(cases // 10):
            X = [F.random_integral(rng) for _ in range(4)]
            g = Mat2(F, F.one + pm * X[0], pm * X[1], pm * X[2], F.one + pm * X[3])
            _check(report, case, all(act(g, y) == y for y in ball(F, x0, m)), "congruence element moves ball", m=m)
        case += 1
    # grafted fixture on the edge {x_0, x_1}
    fixture = {"induced": None, "full": None, "outcome": None}
    graft, induced, full = find_graft(F, radius=2)
    fixture.update(induced=induced, full=full)
    if graft is None:
        fixture["outcome"] = "INDUCED_IS_FULL"
        _check(report, case, induced == full, "graft search inconsistent")
    else:
        fixture["outcome"] = "GRAFT_REJECTED"
        fixture["graft"] = graft.to_json()["mapping"]
        for strategy in ("enumerate", "ends"):
            v = ghat_local_test(graft, 1, strategy)
            _check(report, case, v.kind == VIOLATION, "graft not rejected", strategy=strategy)
            if strategy == "enumerate" and v.edge is not None:
                fixture["violation_edge"] = [format_vertex(F, v.edge.u), format_vertex(F, v.edge.v)]
        _check(report, case, ghat_local_test(graft, 0).kind == LOCALLY_PGL2, "e = 0 is not vacuous")
    case += 1
    report.cases = case
    report.details = {"congruence_checked": congruence, "fixture": fixture}


@dataclass(frozen=True)
class Suite:
    run: object
    randomized: bool
    defaults: dict


SUITES = {
    "cartan-distance": Suite(suite_cartan_distance, False, {"radius": 4}),
    "decomp-recompose": Suite(suite_decomp_recompose, True, {"cases": 1000}),
    "sphere-transitivity": Suite(suite_sphere_transitivity, True, {"radius": 3, "cases": 200}),
    "geo-decomp": Suite(suite_geo_decomp, True, {"cases": 500}),
    "nk-index": Suite(suite_nk_index, False, {}),
    "ghat-local": Suite(suite_ghat_local, True, {"cases": 200, "radius": 3, "levels": [1, 2]}),
    "crossroad": Suite(suite_crossroad, True, {"cases": 300}),
    "classify-oracle": Suite(suite_classify_oracle, True, {"cases": 500, "radius": 8}),
    "regularity": Suite(suite_regularity, True, {"cases": 200, "radius": 4}),
    "stabilizers": Suite(suite_stabilizers, True, {"cases": 500}),
}


def verify_suite(name, p, backend="QP", seed=None, **params):
    """Run a suite; ``params`` override the suite's defaults (None is ignored)."""
    suite = SUITES.get(name)
    if suite is None:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    F = make_field(backend, p)
    used = dict(suite.defaults)
    for key, value in params.items():
        if value is not None and key in suite.defaults:
            used[key] = value
    report = VerifyReport(name, F.backend, F.p, seed, dict(sorted(used.items())))
    rng = random.Random(seed)
    start = time.perf_counter()
    suite.run(F, rng, report, **used)
    report.wall_time = time.perf_counter() - start
    return report
