"""Automorphisms of the tree induced by PGL2(F).

Classification (elliptic / inversion / hyperbolic), constructive witnesses for
weak 2-transitivity, the geometric decompositions of the stabilizer subgroups
(vertex stabilizer, end stabilizer, Iwahori, torus of translations along the
standard apartment), the index computation for the filtration of the
unipotent-type subgroups, and a finite-ball test for the condition "agrees
locally with some element of PGL2".

Every witness is checked against its defining constraints before it is
returned; a failed check raises :class:`InternalError`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    CapacityError,
    DistanceMismatch,
    DomainTooSmall,
    InternalError,
    InvalidLocalAut,
    NotInSubgroup,
    RadiusTooSmall,
    VertexNotOnApartment,
)
from .field import make_field
from .gl2 import Mat2, diag, identity, proj_eq, swap, upper_unipotent
from .tree import (
    Edge,
    Vertex,
    act,
    act_end,
    apartment_vertex,
    ball,
    ball_edges,
    base_vertex,
    distance,
    edge_ball,
    edge_key,
    end_canonical,
    end_frame,
    end_omega,
    end_omega_prime,
    format_vertex,
    geodesic,
    halfline,
    make_edge,
    neighbors,
    parse_vertex,
    sphere,
    stabilizes_end,
    standard_vertex,
    vertex_matrix,
)

# Scan range used when searching the standard apartment for a fixed vertex or
# for the onset of a translation.
APARTMENT_REACH = 64


def alpha_tau(F):
    """The reflection ``alpha = s`` and translation ``tau = diag(1, pi)`` of the
    standard apartment: ``alpha(x_n) = x_-n`` and ``tau(x_n) = x_n+1``."""
    alpha = swap(F)
    tau = diag(F, F.one, F.pi)
    for n in range(-4, 5):
        xn = standard_vertex(F, n)
        if act(alpha, xn) != standard_vertex(F, -n) or act(tau, xn) != standard_vertex(F, n + 1):
            raise InternalError("alpha/tau do not act on the standard apartment as expected")
    return alpha, tau


def tau_power(F, n):
    return diag(F, F.one, F.pi_pow(n))


# ---------------------------------------------------------------------------
# classification


ELLIPTIC = "ELLIPTIC"
INVERSION = "INVERSION"
HYPERBOLIC = "HYPERBOLIC"


@dataclass(frozen=True)
class AutClass:
    kind: str
    fixed_vertex: Vertex | None = None
    edge: Edge | None = None
    length: int = 0
    axis_window: list | None = None

    @property
    def min_displacement(self):
        return {ELLIPTIC: 0, INVERSION: 1}.get(self.kind, self.length)


def classify(g):
    """Classify ``g`` from the valuations of its trace and determinant.

    ``g`` is hyperbolic iff ``2 v(tr) < v(det)``, with translation length
    ``v(det) - 2 v(tr)``; otherwise it inverts an edge iff ``v(det)`` is odd,
    and is elliptic if not.  The fixed vertex / inverted edge / axis is located
    on the geodesic from x_0 to g x_0 and verified.
    """
    F = g.F
    v = F.valuation
    vdet, vtr = v(g.det()), v(g.trace())
    x0 = base_vertex(F)
    path = geodesic(F, x0, act(g, x0))
    d = len(path) - 1
    if 2 * vtr < vdet:
        length = vdet - 2 * vtr
        y = path[(d - length) // 2]
        gy = act(g, y)
        if distance(F, y, gy) != length:
            raise InternalError("axis vertex has the wrong displacement")
        window = geodesic(F, act(g.inv(), y), gy)
        return AutClass(HYPERBOLIC, length=length, axis_window=window)
    if vdet % 2:
        y, z = path[(d - 1) // 2], path[(d + 1) // 2]
        if act(g, y) != z or act(g, z) != y:
            raise InternalError("middle edge of [x0, g x0] is not inverted")
        return AutClass(INVERSION, edge=make_edge(F, y, z))
    mid = path[d // 2]
    if act(g, mid) != mid:
        raise InternalError("midpoint of [x0, g x0] is not fixed")
    return AutClass(ELLIPTIC, fixed_vertex=mid)


# ---------------------------------------------------------------------------
# witnesses


def _k_onto(F, y):
    """``(k, r)`` with ``k`` in K and ``k(x_r) = y``, where ``r = d(x_0, y)``."""
    if F.valuation(y.c) >= 0:
        if y.m >= 0:
            return Mat2(F, F.one, F.zero, y.c, F.one), y.m
        return swap(F), -y.m
    inv_c = F.one / y.c
    return Mat2(F, inv_c, F.one, F.one, F.zero), y.m - 2 * F.valuation(y.c)


def sphere_witness(F, x, y, z):
    """``g`` fixing ``x`` with ``g(y) = z``; needs ``d(x, y) = d(x, z)``."""
    if distance(F, x, y) != distance(F, x, z):
        raise DistanceMismatch("y and z are not on a common sphere around x")
    if y == z:
        return identity(F)
    M = vertex_matrix(F, x)
    Minv = M.inv()
    ky, _ = _k_onto(F, act(Minv, y))
    kz, _ = _k_onto(F, act(Minv, z))
    g = M * kz * ky.inv() * Minv
    if act(g, x) != x or act(g, y) != z:
        raise InternalError("sphere witness failed its check")
    return g


def weak2_witness(F, x1, x2, y1, y2):
    """``g`` with ``g(x1) = y1`` and ``g(x2) = y2``; needs equal distances.

    Moves ``x1`` to ``y1`` by a translation of canonical lattices, then rotates
    about ``y1`` with :func:`sphere_witness`.
    """
    if distance(F, x1, x2) != distance(F, y1, y2):
        raise DistanceMismatch("the two pairs are at different distances")
    if x1 == y1 and x2 == y2:
        return identity(F)
    g1 = vertex_matrix(F, y1) * vertex_matrix(F, x1).inv()
    g = sphere_witness(F, y1, act(g1, x2), y2) * g1
    if act(g, x1) != y1 or act(g, x2) != y2:
        raise InternalError("weak 2-transitivity witness failed its check")
    return g


def _apartment_index(F, x, w1, w2):
    k0 = apartment_vertex(F, w1, w2, 0)
    delta = distance(F, x, k0)
    for k in (delta, -delta):
        if apartment_vertex(F, w1, w2, k) == x:
            return k
    raise VertexNotOnApartment(f"{format_vertex(F, x)} is not on the apartment")


def _ends_basis(F, w1, w2):
    """Matrix whose columns span the lines of ``w1`` and ``w2`` (unscaled)."""
    return Mat2(F, w1.u, w2.u, w1.v, w2.v)


def end_pair_witness(F, x, w1, w2, y, s1, s2):
    """``g`` with ``g(x) = y``, ``g(w1) = s1``, ``g(w2) = s2``.

    ``x`` must lie on the apartment between ``w1`` and ``w2`` and ``y`` on the
    one between ``s1`` and ``s2``.
    """
    from .tree import _ends_matrix

    i = _apartment_index(F, x, w1, w2)
    j = _apartment_index(F, y, s1, s2)
    A = _ends_matrix(F, w1, w2)
    B = _ends_matrix(F, s1, s2)
    g = B * diag(F, F.pi_pow(j - i), F.one) * A.inv()
    if act(g, x) != y or act_end(g, w1) != s1 or act_end(g, w2) != s2:
        raise InternalError("end-pair witness failed its check")
    return g


def edge_end_orientation(F, edge, sigma):
    """For an edge ``{u, v}`` and an end, return the endpoint lying on the ray
    from the other endpoint to the end (exactly one of them does)."""
    u, v = edge
    v_on = halfline(F, u, sigma, 1)[1] == v
    u_on = halfline(F, v, sigma, 1)[1] == u
    if v_on == u_on:
        raise InternalError("edge/end orientation is not exclusive")
    return v if v_on else u


def three_point_map(F, src, dst):
    """The element of PGL2(F) taking three distinct ends ``src`` to ``dst``."""

    def frame(w1, w2, w3):
        s, t = _ends_basis(F, w1, w2).inv().apply(w3.u, w3.v)
        return Mat2(F, s * w1.u, t * w2.u, s * w1.v, t * w2.v)

    g = frame(*dst) * frame(*src).inv()
    for a, b in zip(src, dst):
        if act_end(g, a) != b:
            raise InternalError("three-point map failed its check")
    return g


# ---------------------------------------------------------------------------
# geometric subgroups (realized on PGL2 elements)


def fixes_standard_apartment(g, window=8):
    """True iff ``g`` fixes ``x_k`` for ``|k| <= window`` and is diagonal with
    entries of equal valuation.  The second condition is the exact criterion
    for fixing the whole apartment; the first is its finite shadow."""
    F = g.F
    finite = all(act(g, standard_vertex(F, k)) == standard_vertex(F, k) for k in range(-window, window + 1))
    algebraic = g.b == F.zero and g.c == F.zero and F.valuation(g.a) == F.valuation(g.d)
    return finite and algebraic


def fixed_standard_index(g, reach=APARTMENT_REACH):
    """Smallest ``i`` in ``[-reach, reach]`` with ``g(x_i) = x_i``, or None."""
    F = g.F
    for i in range(-reach, reach + 1):
        if act(g, standard_vertex(F, i)) == standard_vertex(F, i):
            return i
    return None


def _tau_exponent(g):
    """``n`` if ``g`` is projectively ``tau^n``, else None."""
    y = act(g, base_vertex(g.F))
    if y.c != g.F.zero:
        return None
    return y.m if proj_eq(g, tau_power(g.F, y.m)) else None


def in_k_hat(g):
    x0 = base_vertex(g.F)
    return act(g, x0) == x0


def in_b_hat(g):
    return stabilizes_end(g, end_omega(g.F))


def in_b_prime_hat(g):
    return stabilizes_end(g, end_omega_prime(g.F))


def in_n_hat(g):
    return in_b_hat(g) and fixed_standard_index(g) is not None


def in_i_hat(g):
    F = g.F
    x0, x1 = standard_vertex(F, 0), standard_vertex(F, 1)
    return act(g, x0) == x0 and act(g, x1) == x1


def in_t_hat(g):
    return _tau_exponent(g) is not None


def in_h_hat(g):
    return fixes_standard_apartment(g)


GEO_PREDICATES = {
    "K": in_k_hat,
    "B": in_b_hat,
    "B'": in_b_prime_hat,
    "N": in_n_hat,
    "I": in_i_hat,
    "I∩B": lambda g: in_i_hat(g) and in_b_hat(g),
    "I∩B'": lambda g: in_i_hat(g) and in_b_prime_hat(g),
    "T": in_t_hat,
    "H": in_h_hat,
    "alpha": lambda g: proj_eq(g, swap(g.F)),
}


@dataclass(frozen=True)
class GeoFactors:
    kind: str
    case: str
    target: Mat2
    factors: tuple  # ((role, Mat2), ...) with role a key of GEO_PREDICATES
    n: int | None = None

    def recompose(self):
        out = identity(self.target.F)
        for _, f in self.factors:
            out = out * f
        return out

    def membership(self):
        return [GEO_PREDICATES[role](f) for role, f in self.factors]

    def check(self):
        return proj_eq(self.recompose(), self.target) and all(self.membership())


def _finish(kind, case, target, factors, n=None):
    out = GeoFactors(kind, case, target, tuple(factors), n)
    if not out.check():
        raise InternalError(f"{kind} factors failed their check")
    return out


def iwasawa_geo(g):
    """``g = k b`` with ``k`` fixing x_0 and ``b`` fixing the end omega."""
    F = g.F
    k = end_frame(F, act_end(g, end_omega(F)))
    return _finish("iwasawa", "KB", g, [("K", k), ("B", k.inv() * g)])


def cartan_geo(g):
    """``g = k1 tau^n k2`` with ``k1, k2`` fixing x_0 and ``n = d(x_0, g x_0)``."""
    F = g.F
    x0 = base_vertex(F)
    y = act(g, x0)
    n = distance(F, x0, y)
    k = sphere_witness(F, x0, y, standard_vertex(F, n))
    k2 = tau_power(F, -n) * k * g
    return _finish("cartan", "KTK", g, [("K", k.inv()), ("T", tau_power(F, n)), ("K", k2)], n)


def bruhat_geo(g, route="crossroad"):
    """``g`` in B-hat, or ``g = n alpha b`` with ``n`` in N-hat, ``b`` in B-hat.

    ``route`` picks how ``n`` is built: ``"crossroad"`` maps omega' to g(omega)
    while fixing the crossroad of omega, omega', g(omega); ``"unipotent"`` uses
    the upper unipotent matrix.  The two agree modulo H-hat.
    """
    F = g.F
    omega, omega_p = end_omega(F), end_omega_prime(F)
    if stabilizes_end(g, omega):
        return _finish("bruhat", "B", g, [("B", g)])
    alpha = swap(F)
    sigma = act_end(g, omega)
    if sigma == omega_p:
        n = identity(F)
    elif route == "crossroad":
        from .tree import crossroad

        xk = crossroad(F, omega, omega_p, sigma)
        n = end_pair_witness(F, xk, omega_p, omega, xk, sigma, omega)
    elif route == "unipotent":
        n = upper_unipotent(F, sigma.u)
    else:
        raise ValueError(f"unknown route {route!r}")
    b = (n * alpha).inv() * g
    return _finish("bruhat", "NaB", g, [("N", n), ("alpha", alpha), ("B", b)])


def levi_geo(b):
    """``b = tau^n h`` with ``h`` in N-hat; ``n`` is the translation of ``b``
    along the standard apartment toward omega."""
    F = b.F
    if not in_b_hat(b):
        raise NotInSubgroup("B_HAT")
    for i in range(-APARTMENT_REACH, APARTMENT_REACH):
        y = act(b, standard_vertex(F, i))
        if y.c == F.zero and act(b, standard_vertex(F, i + 1)) == standard_vertex(F, y.m + 1):
            n = y.m - i
            break
    else:
        raise InternalError("no translation onset found on the standard apartment")
    h = tau_power(F, -n) * b
    return _finish("levi", "TN", b, [("T", tau_power(F, n)), ("N", h)], n)


def iwahori_geo(g):
    """``g = (g h) h^-1`` with ``g h`` in I-hat n B-hat and ``h^-1`` in
    I-hat n B'-hat."""
    F = g.F
    if not in_i_hat(g):
        raise NotInSubgroup("I_HAT")
    omega, omega_p = end_omega(F), end_omega_prime(F)
    x0 = base_vertex(F)
    sigma = act_end(g.inv(), omega)
    h = end_pair_witness(F, x0, omega_p, omega, x0, omega_p, sigma)
    return _finish("iwahori", "(I∩B)(I∩B')", g, [("I∩B", g * h), ("I∩B'", h.inv())])


def k_double_coset(k):
    """``k`` in I-hat, or ``k = i alpha j`` with ``i, j`` in I-hat."""
    F = k.F
    if not in_k_hat(k):
        raise NotInSubgroup("K_HAT")
    x1, xm1 = standard_vertex(F, 1), standard_vertex(F, -1)
    y = act(k, x1)
    if y == x1:
        return _finish("k_double_coset", "I", k, [("I", k)])
    alpha = swap(F)
    i = weak2_witness(F, xm1, x1, y, x1)
    j = (i * alpha).inv() * k
    return _finish("k_double_coset", "IaI", k, [("I", i), ("alpha", alpha), ("I", j)])


def iwahori_borel_geo(g):
    """``g`` in I-hat B-hat or in I-hat alpha B-hat, decided by which endpoint of
    ``{x_0, x_1}`` lies on the ray from the other toward ``g(omega)``."""
    F = g.F
    x0, x1 = standard_vertex(F, 0), standard_vertex(F, 1)
    sigma = act_end(g, end_omega(F))
    if edge_end_orientation(F, Edge(x0, x1), sigma) == x1:
        h = end_frame(F, sigma)
        return _finish("iwahori_borel", "IB", g, [("I", h), ("B", h.inv() * g)])
    alpha = swap(F)
    tau = tau_power(F, 1)
    q = end_frame(F, act_end(tau.inv(), sigma)) * alpha
    p_ = tau * q * tau.inv()
    return _finish("iwahori_borel", "IaB", g, [("I", p_), ("alpha", alpha), ("B", (p_ * alpha).inv() * g)])


# ---------------------------------------------------------------------------
# index of consecutive unipotent-type stabilizers


@dataclass
class NkReport:
    k: int
    q: int
    orbit_size: int
    target_size: int
    elements_ok: bool
    orbit: list = field(default_factory=list)

    @property
    def passed(self):
        return self.elements_ok and self.orbit_size == self.q == self.target_size


def nk_orbit_check(F, k, ray_window=4):
    """Orbit of ``x_{k-1}`` under the q unipotents ``[[1, r pi^-k], [0, 1]]``.

    Each unipotent fixes the ray from ``x_k`` toward omega; the index of the
    consecutive fixers equals the orbit size on ``S(x_k, 1) - {x_k+1}``.
    """
    omega = end_omega(F)
    xk = standard_vertex(F, k)
    elements = [upper_unipotent(F, r * F.pi_pow(-k)) for r in F.residue_reps()]
    ray = [standard_vertex(F, k + j) for j in range(ray_window + 1)]
    elements_ok = all(stabilizes_end(u, omega) and all(act(u, y) == y for y in ray) for u in elements)
    target = set(sphere(F, xk, 1)) - {standard_vertex(F, k + 1)}
    orbit = [standard_vertex(F, k - 1)]
    seen = set(orbit)
    frontier = list(orbit)
    while frontier:
        nxt = []
        for y in frontier:
            for u in elements:
                z = act(u, y)
                if z not in seen:
                    seen.add(z)
                    orbit.append(z)
                    nxt.append(z)
        frontier = nxt
    elements_ok = elements_ok and seen <= target
    return NkReport(k, F.q, len(orbit), len(target), elements_ok, orbit)


# ---------------------------------------------------------------------------
# local automorphisms and the local PGL2 condition


@dataclass
class LocalAut:
    """A distance-preserving bijection from a ball onto a ball.

    ``center`` is a vertex (domain B(x, R)) or an :class:`Edge` (domain
    B(edge, R)).
    """

    F: object
    center: object
    radius: int
    mapping: dict

    def domain(self):
        if isinstance(self.center, Edge):
            return edge_ball(self.F, self.center, self.radius)
        return ball(self.F, self.center, self.radius)

    def __call__(self, x):
        return self.mapping[x]

    @classmethod
    def from_matrix(cls, g, center, radius):
        out = cls(g.F, center, radius, {})
        out.mapping = {y: act(g, y) for y in out.domain()}
        return out

    def validate(self):
        F = self.F
        dom = self.domain()
        if set(self.mapping) != set(dom):
            raise InvalidLocalAut("mapping keys are not exactly the domain ball")
        images = [self.mapping[y] for y in dom]
        if len(set(images)) != len(images):
            raise InvalidLocalAut("mapping is not injective")
        if isinstance(self.center, Edge):
            fu, fv = self.mapping[self.center.u], self.mapping[self.center.v]
            if distance(F, fu, fv) != 1:
                raise InvalidLocalAut("centre edge is not mapped to an edge")
            target = edge_ball(F, Edge(fu, fv), self.radius)
        else:
            target = ball(F, self.mapping[self.center], self.radius)
        if set(images) != set(target):
            raise InvalidLocalAut("image is not the ball around the image centre")
        domset = set(dom)
        for y in dom:
            for z in neighbors(F, y):
                if z in domset and distance(F, self.mapping[y], self.mapping[z]) != 1:
                    raise InvalidLocalAut(f"adjacency broken at {format_vertex(F, y)}")
        return self

    def to_json(self):
        F = self.F
        fmt = lambda x: format_vertex(F, x)  # noqa: E731
        center = [fmt(self.center.u), fmt(self.center.v)] if isinstance(self.center, Edge) else fmt(self.center)
        return {
            "backend": F.backend,
            "p": F.p,
            "center": center,
            "radius": self.radius,
            "mapping": [[fmt(y), fmt(self.mapping[y])] for y in self.domain()],
        }

    @classmethod
    def from_json(cls, data, F=None):
        try:
            if F is None:
                F = make_field(data.get("backend", "QP"), data["p"])
            center = data["center"]
            if isinstance(center, list):
                center = make_edge(F, parse_vertex(F, center[0]), parse_vertex(F, center[1]))
            else:
                center = parse_vertex(F, center)
            mapping = {parse_vertex(F, a): parse_vertex(F, b) for a, b in data["mapping"]}
            radius = int(data["radius"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidLocalAut(f"malformed local automorphism: {exc}") from exc
        return cls(F, center, radius, mapping).validate()


# Largest level and residue characteristic the enumeration strategy accepts.
MAX_ENUM_LEVEL = 2
MAX_ENUM_P = 5


def iwahori_rep_count(F, e):
    p = F.p
    return (p ** (e + 1) - p**e) * p ** (2 * e + 1)


@lru_cache(maxsize=None)
def induced_edge_group(F, e):
    """The permutations of B({x_0, x_1}, e) induced by the Iwahori subgroup.

    Returns ``(ball, table)`` where ``table`` maps the image tuple of ``ball``
    to one matrix inducing it.  Matrices are enumerated modulo pi^(e+1) with
    (1,1) entry normalized to 1, which suffices because the congruence
    subgroup of level e+1 fixes B(x_0, e+1) pointwise.
    """
    if e > MAX_ENUM_LEVEL or F.p > MAX_ENUM_P:
        raise CapacityError(
            f"enumeration supports e <= {MAX_ENUM_LEVEL} and p <= {MAX_ENUM_P}; got e={e}, p={F.p}"
        )
    edge = Edge(standard_vertex(F, 0), standard_vertex(F, 1))
    dom = edge_ball(F, edge, e)
    residues = F.integers_mod(e + 1)
    units = [d for d in residues if F.valuation(d) == 0]
    lower = [F.pi * c for c in F.integers_mod(e)]
    table = {}
    for d in units:
        for b in residues:
            for c in lower:
                g = Mat2(F, F.one, b, c, d)
                table.setdefault(tuple(act(g, y) for y in dom), g)
    return dom, table


def _ray_end(F, u, y):
    """An end whose ray from ``u`` passes through ``y``."""
    r = distance(F, u, y)
    frame = weak2_witness(F, base_vertex(F), standard_vertex(F, r), u, y)
    return act_end(frame, end_omega(F))


def _walk_away(F, start, avoid, steps):
    """Follow first-listed neighbours for ``steps`` steps, never stepping back."""
    prev, cur = avoid, start
    for _ in range(steps):
        nxt = next(z for z in neighbors(F, cur) if z != prev)
        prev, cur = cur, nxt
    return cur


def pgl2_match_on_ball(f, edge, e, strategy="enumerate"):
    """An element of PGL2(F) agreeing with ``f`` on B(edge, e), or None.

    Both strategies first move the edge onto its image with a weak
    2-transitivity witness.  ``strategy="enumerate"`` then looks the residual
    permutation up in :func:`induced_edge_group`.  ``strategy="ends"`` instead
    takes the element sending three ends through a tripod of boundary vertices
    to the matching ends through their images; it has no capacity limit and
    serves as an independent cross-check.
    """
    F = f.F
    u, v = edge
    dom = edge_ball(F, edge, e)
    if any(y not in f.mapping for y in dom):
        raise DomainTooSmall("B(edge, e) is not inside the domain")
    w = weak2_witness(F, u, v, f(u), f(v))
    if e == 0:
        return w
    winv = w.inv()
    h = {y: act(winv, f(y)) for y in dom}
    if strategy == "ends":
        others = [z for z in neighbors(F, u) if z != v]
        y1 = _walk_away(F, v, u, e)
        y2 = _walk_away(F, others[0], u, e - 1)
        y3 = _walk_away(F, others[1], u, e - 1)
        src = [_ray_end(F, u, y) for y in (y1, y2, y3)]
        dst = [_ray_end(F, u, h[y]) for y in (y1, y2, y3)]
        candidate = w * three_point_map(F, src, dst)
    elif strategy == "enumerate":
        std_dom, table = induced_edge_group(F, e)
        M = weak2_witness(F, standard_vertex(F, 0), standard_vertex(F, 1), u, v)
        Minv = M.inv()
        key = tuple(act(Minv, h[act(M, y)]) for y in std_dom)
        found = table.get(key)
        if found is None:
            return None
        candidate = w * M * found * Minv
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if all(act(candidate, y) == f(y) for y in dom):
        return candidate
    return None


LOCALLY_PGL2 = "LOCALLY_PGL2"
VIOLATION = "VIOLATION"


@dataclass(frozen=True)
class GhatVerdict:
    kind: str
    edge: Edge | None = None
    edges_checked: int = 0


def tested_edges(F, center, radius, e):
    """Edges ``eta`` with B(eta, e) inside B(center, radius), sorted."""
    edges = [make_edge(F, y, z) for y, z in ball_edges(F, center, radius - e)]
    return sorted(edges, key=lambda ed: edge_key(F, ed))


def ghat_local_test(f, e, strategy="enumerate"):
    """Check every edge whose e-ball fits in the domain of ``f``; report the
    first edge (in sorted order) where no PGL2 element matches."""
    if isinstance(f.center, Edge):
        raise ValueError("the local test needs a vertex-centred ball")
    if f.radius < e + 1:
        raise RadiusTooSmall(f"radius {f.radius} < e + 1 = {e + 1}")
    edges = tested_edges(f.F, f.center, f.radius, e)
    for count, edge in enumerate(edges, 1):
        if pgl2_match_on_ball(f, edge, e, strategy) is None:
            return GhatVerdict(VIOLATION, edge, count)
    return GhatVerdict(LOCALLY_PGL2, None, len(edges))
