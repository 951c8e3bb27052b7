import itertools
import random
from fractions import Fraction

import pytest

from conftest import finite_gg, vector_gg
from groupgraph import linalg
from groupgraph.graph import Graph, GraphMorphism
from groupgraph.group_graph import (
    GroupGraphError,
    GroupGraphMorphism,
    GroupHom,
    constant_group_graph,
    cyclic_group,
    pullback,
    remove_offsupport_edges,
    trivial_group,
    trivial_group_graph,
)
from groupgraph.cohomology import (
    Cochain0,
    Cocycle1,
    coboundary_action,
    h0,
    h1_class_of,
    h1_finite_bruteforce,
    h1_map,
    h1_vector,
    push_cocycle,
)


def seg_gg_finite(va, vb, e, hom_a=None, hom_b=None):
    homs = {}
    if hom_a is not None:
        homs[("a", ("a", "b"))] = hom_a
    if hom_b is not None:
        homs[("b", ("a", "b"))] = hom_b
    return finite_gg(["a", "b"], [("a", "b")], {"a": va, "b": vb}, {("a", "b"): e}, homs)


# --- H0 -------------------------------------------------------------------------


def test_h0_trivial():
    gg = trivial_group_graph(Graph.make("ab", [("a", "b")]), "finite")
    assert h0(gg).order == 1


def test_h0_constant_diagonal():
    gg = constant_group_graph(Graph.make("abc", [("a", "b"), ("b", "c")]), cyclic_group(4))
    res = h0(gg)
    assert res.order == 4
    for fam in res.elements:
        vals = set(fam.values.values())
        assert len(vals) == 1  # equality constraints force constancy


def test_h0_scalar_kernel():
    # restrictions x and 2x into a single line: kernel of [1, -2] has dim 1
    gg = vector_gg(
        ["a", "b"], [("a", "b")], {"a": 1, "b": 1}, {("a", "b"): 1},
        mats={("a", ("a", "b")): [[1]], ("b", ("a", "b")): [[2]]},
    )
    res = h0(gg)
    assert res.dim == 1
    fam = res.basis[0]
    assert fam.values["a"][0] == 2 * fam.values["b"][0]


# --- the coboundary action -------------------------------------------------------


def small_finite_instance():
    z4, z2 = cyclic_group(4), cyclic_group(2)
    return seg_gg_finite(z4, z2, z2, hom_a=(0, 1, 0, 1), hom_b=(0, 1))


def test_action_identity_cochain_fixes_cocycles():
    gg = small_finite_instance()
    z = Cocycle1.from_tail_values(gg, {("a", "b"): 1})
    c = Cochain0(gg, {"a": 0, "b": 0})
    assert coboundary_action(c, z, gg).values == z.values


def test_action_on_trivial_cocycle_is_coboundary():
    # abelian carrier: acting on 1 gives the difference family
    gg = vector_gg(
        ["a", "b"], [("a", "b")], {"a": 1, "b": 1}, {("a", "b"): 1},
    )
    c = Cochain0(gg, {"a": [Fraction(1)], "b": [Fraction(3)]})
    out = coboundary_action(c, Cocycle1.trivial(gg), gg)
    assert out.values[("a", ("a", "b"))] == [Fraction(2)]  # g_b - g_a at the tail
    assert out.values[("b", ("a", "b"))] == [Fraction(-2)]


def test_action_law_exhaustive_on_small_instance():
    gg = small_finite_instance()
    families = [
        Cochain0(gg, {"a": a, "b": b}) for a in range(4) for b in range(2)
    ]
    cocycles = [Cocycle1.from_tail_values(gg, {("a", "b"): t}) for t in range(2)]
    for c1 in families:
        for c2 in families:
            prod = Cochain0(gg, {
                v: gg.vobj[v].mul(c1.values[v], c2.values[v]) for v in ("a", "b")
            })
            for z in cocycles:
                twice = coboundary_action(c2, coboundary_action(c1, z, gg), gg)
                once = coboundary_action(prod, z, gg)
                assert twice.values == once.values


def test_antisymmetry_is_enforced():
    gg = small_finite_instance()
    e = ("a", "b")
    with pytest.raises(GroupGraphError):
        Cocycle1(gg, {("a", e): 1, ("b", e): 0})


# --- H1, vector carrier ------------------------------------------------------------


def test_h1_vector_full_support_tree_is_trivial():
    gg = vector_gg(
        ["a", "b", "c"], [("a", "b"), ("b", "c")],
        {"a": 1, "b": 1, "c": 1},
        {("a", "b"): 1, ("b", "c"): 1},
    )
    assert h1_vector(gg).dim == 0


def test_h1_vector_segment_010(segment_010):
    res = h1_vector(segment_010)
    assert res.dim == 1
    assert len(res.basis) == 1


def test_h1_vector_path_11110():
    gg = vector_gg(
        ["a", "b", "c"], [("a", "b"), ("b", "c")],
        {"a": 1, "b": 1, "c": 0},
        {("a", "b"): 1, ("b", "c"): 1},
    )
    assert h1_vector(gg).dim == 0  # the coboundary is onto the two lines


def test_h1_vector_on_a_cycle():
    # a triangle with constant line and identity restrictions has dim 1
    tri = Graph.make("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    gg = vector_gg(
        "abc", [("a", "b"), ("b", "c"), ("a", "c")],
        {v: 1 for v in "abc"}, {tuple(sorted(e)): 1 for e in tri.edges},
    )
    assert h1_vector(gg).dim == 1


# --- H1, finite brute force ----------------------------------------------------------


def test_h1_finite_all_trivial():
    gg = trivial_group_graph(Graph.make("ab", [("a", "b")]), "finite")
    res = h1_finite_bruteforce(gg)
    assert res.count == 1
    assert res.representatives[0].is_trivial()


def test_h1_finite_segment_edge_z2():
    gg = seg_gg_finite(trivial_group(), trivial_group(), cyclic_group(2))
    assert h1_finite_bruteforce(gg).count == 2


def test_h1_finite_segment_constant_z2():
    gg = constant_group_graph(Graph.make("ab", [("a", "b")]), cyclic_group(2))
    assert h1_finite_bruteforce(gg).count == 1


def test_privileged_class_first():
    gg = seg_gg_finite(trivial_group(), trivial_group(), cyclic_group(3))
    res = h1_finite_bruteforce(gg)
    assert res.representatives[0].is_trivial()
    z = Cocycle1.from_tail_values(gg, {("a", "b"): 0})
    assert h1_class_of(res, z) == 0


def test_abelian_count_is_z1_over_image():
    rng = random.Random(5)
    for _ in range(12):
        n = rng.randint(2, 4)
        names = [f"v{i}" for i in range(n)]
        edges = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
        g = Graph.make(names, edges)
        m = rng.choice([2, 3, 4])
        grp = cyclic_group(m)
        homs = {}
        for v, e in g.incidences():
            c = rng.randrange(m)
            homs[(v, e)] = tuple((c * x) % m for x in range(m))
        gg = finite_gg(names, edges, {v: grp for v in names},
                       {e: grp for e in g.edges}, homs)
        res = h1_finite_bruteforce(gg)
        z1 = m ** len(g.edges)
        image = set()
        for fam in itertools.product(range(m), repeat=n):
            c = Cochain0(gg, dict(zip(sorted(names), fam)))
            image.add(coboundary_action(c, Cocycle1.trivial(gg), gg).tail_tuple())
        assert res.count == z1 // len(image)


def test_elementary_abelian_matches_mod_p_linear_algebra():
    # (Z/p)^d group-graphs double as vector-space graphs over the p-element
    # field: the class count must be p ** (dim Z1 - rank of the coboundary)
    rng = random.Random(11)
    for p in (2, 3):
        for _ in range(6):
            n = rng.randint(2, 4)
            names = [f"v{i}" for i in range(n)]
            edges = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
            g = Graph.make(names, edges)
            grp = cyclic_group(p)
            homs = {}
            coeff = {}
            for v, e in g.incidences():
                c = rng.randrange(p)
                coeff[(v, e)] = c
                homs[(v, e)] = tuple((c * x) % p for x in range(p))
            gg = finite_gg(names, edges, {v: grp for v in names},
                           {e: grp for e in g.edges}, homs)
            count = h1_finite_bruteforce(gg).count
            rows = []
            vs = sorted(names)
            for a, b in g.sorted_edges():
                row = [0] * n
                row[vs.index(b)] += coeff[(b, (a, b))]
                row[vs.index(a)] -= coeff[(a, (a, b))]
                rows.append(row)
            dim_h1 = len(g.edges) - linalg.rank_mod_p(rows, p)
            assert count == p ** dim_h1


def test_offsupport_edge_removal_preserves_h1():
    rng = random.Random(3)
    for _ in range(8):
        n = rng.randint(2, 5)
        names = [f"v{i}" for i in range(n)]
        edges = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
        vdims = {v: rng.randint(0, 2) for v in names}
        edims = {tuple(sorted(e)): rng.randint(0, 1) for e in edges}
        mats = {}
        g = Graph.make(names, edges)
        for v, e in g.incidences():
            mats[(v, e)] = [
                [Fraction(rng.randint(-1, 1)) for _ in range(vdims[v])]
                for _ in range(edims[e])
            ]
        gg = vector_gg(names, edges, vdims, edims, mats)
        smaller, _ = remove_offsupport_edges(gg)
        assert h1_vector(gg).dim == h1_vector(smaller).dim


def test_offsupport_edge_removal_preserves_h1_finite():
    rng = random.Random(13)
    for _ in range(8):
        n = rng.randint(2, 5)
        names = [f"v{i}" for i in range(n)]
        edges = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
        g = Graph.make(names, edges)
        orders_v = {v: rng.choice([1, 2, 3]) for v in names}
        orders_e = {e: rng.choice([1, 2, 3]) for e in g.edges}
        homs = {}
        for v, e in g.incidences():
            m, k = orders_v[v], orders_e[e]
            import math

            c = (k // math.gcd(m, k)) * rng.randrange(math.gcd(m, k))
            homs[(v, e)] = tuple((c * x) % k for x in range(m))
        gg = finite_gg(names, edges, {v: cyclic_group(orders_v[v]) for v in names},
                       {e: cyclic_group(orders_e[e]) for e in g.edges}, homs)
        smaller, _ = remove_offsupport_edges(gg)
        assert h1_finite_bruteforce(gg).count == h1_finite_bruteforce(smaller).count


def test_coboundary_squared_is_zero():
    # the second coboundary (sum of the two incidence values) kills images of
    # the first one
    rng = random.Random(9)
    gg = vector_gg(
        ["a", "b", "c"], [("a", "b"), ("b", "c")],
        {"a": 2, "b": 1, "c": 1},
        {("a", "b"): 1, ("b", "c"): 2},
        mats={
            ("a", ("a", "b")): [[1, -1]],
            ("b", ("a", "b")): [[2]],
            ("b", ("b", "c")): [[1], [0]],
            ("c", ("b", "c")): [[0], [3]],
        },
    )
    for _ in range(10):
        c = Cochain0(gg, {
            "a": [Fraction(rng.randint(-3, 3)) for _ in range(2)],
            "b": [Fraction(rng.randint(-3, 3))],
            "c": [Fraction(rng.randint(-3, 3))],
        })
        z = coboundary_action(c, Cocycle1.trivial(gg), gg)
        for e in gg.base.sorted_edges():
            a, b = e
            total = linalg.vec_add(z.values[(a, e)], z.values[(b, e)])
            assert all(x == 0 for x in total)


# --- induced maps ---------------------------------------------------------------------


def test_h1_map_identity():
    gg = seg_gg_finite(trivial_group(), trivial_group(), cyclic_group(3))
    mp = h1_map(GroupGraphMorphism.identity(gg))
    assert mp.is_bijective()
    assert mp.mapping == list(range(mp.source_result.count))


def test_h1_map_to_trivial_target():
    gg = seg_gg_finite(trivial_group(), trivial_group(), cyclic_group(3))
    triv = trivial_group_graph(gg.base, "finite")
    maps = {s: GroupHom.trivial(gg.obj(s), triv.obj(s)) for s in gg.stars()}
    mor = GroupGraphMorphism(GraphMorphism.identity(gg.base), gg, triv, maps)
    mp = h1_map(mor)
    assert set(mp.mapping) == {0}  # constant at the privileged class


def test_h1_map_functoriality_random():
    rng = random.Random(21)
    for _ in range(6):
        n = rng.randint(2, 4)
        names = [f"v{i}" for i in range(n)]
        edges = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
        m = rng.choice([2, 3, 4])
        grp = cyclic_group(m)
        g = Graph.make(names, edges)
        gg = finite_gg(names, edges, {v: grp for v in names}, {e: grp for e in g.edges})

        def random_endo():
            # one global multiplier commutes with the identity restrictions
            c = rng.randrange(1, m) if m > 1 else 0
            return GroupGraphMorphism(
                GraphMorphism.identity(g), gg, gg,
                {s: GroupHom(grp, grp, tuple((c * x) % m for x in range(m))) for s in gg.stars()},
            )

        m1, m2 = random_endo(), random_endo()
        composed = m2.compose(m1)
        lhs = h1_map(composed)
        step1 = h1_map(m1)
        step2 = h1_map(m2)
        chained = [step2.mapping[c] for c in step1.mapping]
        assert lhs.mapping == chained


def test_h1_map_functoriality_vector():
    rng = random.Random(31)
    for _ in range(6):
        n = rng.randint(2, 4)
        names = [f"v{i}" for i in range(n)]
        edges = [(names[rng.randrange(i)], names[i]) for i in range(1, n)]
        g = Graph.make(names, edges)
        gg = vector_gg(names, edges, {v: 1 for v in names},
                       {e: 1 for e in g.edges})

        def scaling(c):
            return GroupGraphMorphism(
                GraphMorphism.identity(g), gg, gg,
                {s: GroupHom(gg.obj(s), gg.obj(s), [[Fraction(c)]]) for s in gg.stars()},
            )

        m1, m2 = scaling(rng.randint(1, 3)), scaling(rng.randint(1, 3))
        lhs = h1_map(m2.compose(m1))
        step1, step2 = h1_map(m1), h1_map(m2)
        assert lhs.matrix == linalg.mat_mul(step2.matrix, step1.matrix)


def test_cocycle_and_cochain_json_round_trip(segment_010):
    res = h1_vector(segment_010)
    z = res.basis[0]
    back = Cocycle1.from_json(segment_010, z.to_json())
    assert back.values == z.values
    gg = small_finite_instance()
    c = Cochain0(gg, {"a": 3, "b": 1})
    assert Cochain0.from_json(gg, c.to_json()).values == c.values
    zf = Cocycle1.from_tail_values(gg, {("a", "b"): 1})
    assert Cocycle1.from_json(gg, zf.to_json()).values == zf.values


def test_push_cocycle_inserts_identity_on_collapsed_edges():
    seg = Graph.make("ab", [("a", "b")])
    point = Graph.make(["x"], [])
    phi = GraphMorphism.make(seg, point, {"a": "x", "b": "x"})
    gg = constant_group_graph(point, cyclic_group(4))
    pb, canonical = pullback(phi, gg)
    z = Cocycle1.trivial(gg)
    out = push_cocycle(canonical, z)
    assert out.values[("a", ("a", "b"))] == 0
