"""Constructive realizations and checkers for the structural results:
pruning, quotient isomorphism with its inductive lift, direct-image
injectivity and surjectivity, contraction regularity, the active-edge
description of H1 of a regular group-graph, and the tensor isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .cohomology import (
    Cochain0,
    Cocycle1,
    CohomologyResult,
    DEFAULT_ENUM_BUDGET,
    coboundary_action,
    h1_auto,
    h1_class_coordinates,
    h1_finite_bruteforce,
    h1_map,
    h1_vector,
    push_cocycle,
)
from .graph import Edge, Graph, GraphMorphism, Tree, contract, edge_key
from .group_graph import (
    GroupGraph,
    GroupGraphError,
    GroupGraphMorphism,
    SubGroupGraph,
    direct_image,
    is_regular,
    pullback,
    quotient_with_projection,
    support,
    support_components,
    tensor,
)


class VerificationError(RuntimeError):
    """An internal consistency assertion that must never fire did fire."""


class HypothesisViolated(ValueError):
    def __init__(self, message: str, violations):
        super().__init__(message)
        self.violations = violations


def restrict(g: GroupGraph, sub: Graph) -> GroupGraph:
    inclusion = GraphMorphism.inclusion(sub, g.base)
    return pullback(inclusion, g)[0]


# ---------------------------------------------------------------------------
# pruning


@dataclass
class RepulsivityReport:
    subtree: list[str]
    violations: list[tuple[str, Edge]]

    def is_repulsive(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "subtree": self.subtree,
            "violations": [[v, list(e)] for v, e in self.violations],
            "repulsive": self.is_repulsive(),
        }


def check_repulsive(g: GroupGraph, r) -> RepulsivityReport:
    """Test outward surjectivity along the partial order induced by a subtree."""
    from .graph import precedes

    t = Tree(g.base)
    rset = frozenset(r)
    violations = []
    for e in g.base.sorted_edges():
        u, w = e
        if u in rset and w in rset:
            continue  # incomparable: no condition
        for near, far in ((u, w), (w, u)):
            if precedes(t, rset, near, far) and not g.restriction(far, e).is_surjective():
                violations.append((far, e))
    violations.sort(key=lambda p: (p[0], p[1]))
    return RepulsivityReport(sorted(rset), violations)


def pruning_verify(g: GroupGraph, r, budget: int = DEFAULT_ENUM_BUDGET):
    """Check that restricting cocycle families to a repulsive subtree is a
    bijection on H1 classes; returns (ok, data for both sides)."""
    rep = check_repulsive(g, r)
    if not rep.is_repulsive():
        raise HypothesisViolated("subtree is not repulsive", rep.violations)
    sub = g.base.induced(frozenset(r))
    inclusion = GraphMorphism.inclusion(sub, g.base)
    _, canonical = pullback(inclusion, g)
    mp = h1_map(canonical, budget)
    return mp.is_bijective(), {
        "ambient": mp.source_result,
        "restricted": mp.target_result,
        "map": mp,
    }


# ---------------------------------------------------------------------------
# quotient isomorphism, with the constructive lift from the inductive proof


def _orbit_witnesses(g: GroupGraph, budget: int):
    """Orbit partition of Z1 with, per tail tuple, a vertex family sending the
    orbit representative to that tuple (finite carrier)."""
    from .cohomology import _act_tail, _enumerate_z1

    all_tails = _enumerate_z1(g, budget)
    vs = g.base.sorted_vertices()
    moves = []
    for v in vs:
        for x in range(1, g.vobj[v].order):
            moves.append((v, x))
    witness: dict[tuple, dict] = {}
    class_rep: dict[tuple, tuple] = {}
    for start in sorted(all_tails):
        if start in witness:
            continue
        witness[start] = {v: 0 for v in vs}
        class_rep[start] = start
        queue = [start]
        while queue:
            cur = queue.pop()
            for v, x in moves:
                fam = {u: 0 for u in vs}
                fam[v] = x
                nxt = _act_tail(g, fam, cur)
                if nxt not in witness:
                    # acting by c then by the single move is acting by the product
                    prev = witness[cur]
                    witness[nxt] = {
                        u: g.vobj[u].mul(prev[u], fam[u]) for u in vs
                    }
                    class_rep[nxt] = class_rep[start]
                    queue.append(nxt)
    return witness, class_rep


def _min_preimage(data, value, domain=None) -> int:
    it = domain if domain is not None else range(len(data))
    for x in sorted(it):
        if data[x] == value:
            return x
    raise VerificationError("no preimage found where one must exist")


def quotient_lift(
    g: GroupGraph,
    k: SubGroupGraph,
    proj: GroupGraphMorphism,
    z: Cocycle1,
    h: Cocycle1,
    quotient_witness,
) -> Cochain0:
    """Realize the inductive proof: produce a vertex family (k_v) with
    (k_v) acting on z giving exactly h, for two cocycles whose projections are
    cohomologous.  The induction runs over distances to the lexicographically
    smallest root."""
    base = g.base
    vs = base.sorted_vertices()
    edges = base.sorted_edges()
    quo = proj.target

    pz = push_cocycle(proj, z)
    ph = push_cocycle(proj, h)
    witness, class_rep = quotient_witness
    tz, th = pz.tail_tuple(), ph.tail_tuple()
    if class_rep[tz] != class_rep[th]:
        raise HypothesisViolated("projected cocycles are not cohomologous", [])
    # combine witnesses: c1 * rep = pz and c2 * rep = ph give (c1^-1 c2) * pz = ph
    c1, c2 = witness[tz], witness[th]
    cbar = {v: quo.vobj[v].mul(quo.vobj[v].inv(c1[v]), c2[v]) for v in vs}

    # lift the quotient family and solve for the edge correction in the kernel
    gv = {v: _min_preimage(proj.maps[v].data, cbar[v]) for v in vs}

    Tree(base)  # the induction needs unique parent edges
    root = min(vs)
    dist = {root: 0}
    order = [root]
    parent_edge: dict[str, tuple[str, Edge]] = {}
    frontier = [root]
    while frontier:
        nxt = []
        for u in sorted(frontier):
            for n in base.neighbors(u):
                if n not in dist:
                    dist[n] = dist[u] + 1
                    parent_edge[n] = (u, (min(u, n), max(u, n)))
                    order.append(n)
                    nxt.append(n)
        frontier = nxt

    def oriented(e: Edge) -> tuple[str, str]:
        a, b = e
        return (a, b) if dist[a] < dist[b] else (b, a)

    ge = {}
    for e in edges:
        v, w = oriented(e)
        grp = g.eobj[e]
        rv = g.restriction(v, e).apply(gv[v])
        rw = g.restriction(w, e).apply(gv[w])
        expr = grp.mul(grp.mul(grp.inv(rv), z.values[(v, e)]), rw)
        ge[e] = grp.mul(grp.inv(expr), h.values[(v, e)])
        if ge[e] not in k.subs[e]:
            raise VerificationError("edge correction left the kernel sub-group-graph")

    kv = {root: gv[root]}
    fprime = {root: 0}
    for w in order[1:]:
        par, e_w = parent_edge[w]
        grp_e = g.eobj[e_w]
        grp_w = g.vobj[w]
        rho_w = g.restriction(w, e_w)
        rho_par = g.restriction(par, e_w)
        rho_w_table = [rho_w.apply(x) for x in range(grp_w.order)]
        gprime_w = _min_preimage(rho_w_table, ge[e_w], domain=sorted(k.subs[w]))
        gg = grp_e.mul(
            grp_e.mul(grp_e.inv(rho_par.apply(kv[par])), z.values[(par, e_w)]),
            rho_w.apply(grp_w.mul(gv[w], gprime_w)),
        )
        tilde = grp_e.mul(grp_e.mul(grp_e.inv(gg), rho_par.apply(fprime[par])), gg)
        tilde_w = _min_preimage(rho_w_table, tilde, domain=sorted(k.subs[w]))
        fprime[w] = grp_w.mul(gprime_w, tilde_w)
        kv[w] = grp_w.mul(gv[w], fprime[w])

    cochain = Cochain0(g, kv)
    acted = coboundary_action(cochain, z, g)
    if acted.tail_tuple() != h.tail_tuple():
        raise VerificationError("constructive lift failed to trivialize the pair")
    return cochain


def quotient_iso_verify(
    g: GroupGraph,
    k: SubGroupGraph,
    budget: int = DEFAULT_ENUM_BUDGET,
    require_tree: bool = True,
    lift_pairs_cap: int | None = None,
) -> dict:
    """Verify that the projection onto the quotient induces a bijection on H1
    and exercise the constructive lift on every cohomologous pair."""
    if require_tree:
        Tree(g.base)
    bad = [
        (v, e)
        for v, e in g.base.incidences()
        if frozenset(g.restriction(v, e).apply(x) for x in k.subs[v]) != k.subs[e]
    ]
    if bad:
        raise HypothesisViolated(
            "kernel restrictions are not surjective at: "
            + ", ".join(f"{v}|{edge_key(e)}" for v, e in sorted(bad)),
            bad,
        )
    quo, proj = quotient_with_projection(g, k)
    mp = h1_map(proj, budget)

    lifted = 0
    failures = []
    if require_tree:
        qw = _orbit_witnesses(quo, budget)
        src = mp.source_result
        by_class: dict[int, list[tuple]] = {}
        for t, c in src._class_index.items():
            by_class.setdefault(c, []).append(t)
        edges = g.base.sorted_edges()
        for c, members in sorted(by_class.items()):
            rep = src.representatives[c]
            for t in sorted(members):
                if lift_pairs_cap is not None and lifted >= lift_pairs_cap:
                    break
                other = Cocycle1.from_tail_values(g, dict(zip(edges, t)))
                try:
                    quotient_lift(g, k, proj, rep, other, qw)
                    lifted += 1
                except VerificationError as exc:
                    failures.append((c, t, str(exc)))
    return {
        "bijective": mp.is_bijective(),
        "source_count": mp.source_result.size(),
        "target_count": mp.target_result.size(),
        "lifted_pairs": lifted,
        "lift_failures": failures,
        "ok": mp.is_bijective() and not failures,
        "map": mp,
    }


# ---------------------------------------------------------------------------
# direct image


def direct_image_verify(
    phi: GraphMorphism, g: GroupGraph, budget: int = DEFAULT_ENUM_BUDGET
) -> dict:
    """Check injectivity of the induced map, the image characterization on
    collapsed edges, and surjectivity under trivial fiber cohomology."""
    img, j = direct_image(phi, g, budget)
    mp = h1_map(j, budget)
    collapsed = [e for e in g.base.sorted_edges() if phi.collapses(e)]
    edges = g.base.sorted_edges()
    col_idx = [edges.index(e) for e in collapsed]

    if g.carrier == "finite":
        tgt = mp.target_result
        image_classes = set(mp.mapping)
        flat_classes = {
            c for t, c in tgt._class_index.items() if all(t[i] == 0 for i in col_idx)
        }
        image_ok = image_classes == flat_classes
    else:
        tgt = mp.target_result
        image_cols = [
            [mp.matrix[i][jcol] for i in range(len(mp.matrix))]
            for jcol in range(mp.source_result.dim or 0)
        ]
        flat_coords = []
        for e in edges:
            if e in collapsed:
                continue
            for i in range(g.eobj[e].dim):
                tail = {
                    f: [Fraction(0)] * g.eobj[f].dim for f in edges
                }
                tail[e][i] = Fraction(1)
                flat_coords.append(
                    h1_class_coordinates(tgt, Cocycle1.from_tail_values(g, tail))
                )
        r_img = linalg.rank(image_cols)
        r_flat = linalg.rank(flat_coords)
        r_both = linalg.rank(image_cols + flat_coords)
        image_ok = r_img == r_flat == r_both

    fibers_trivial = True
    for v2 in phi.target.sorted_vertices():
        fiber = phi.fiber(v2)
        if not fiber.vertices:
            continue  # empty fiber: trivial cohomology
        res = h1_auto(restrict(g, fiber), budget)
        trivial = res.dim == 0 if res.carrier == "vector" else res.count == 1
        if not trivial:
            fibers_trivial = False
            break

    injective = mp.is_injective()
    surjective = mp.is_surjective()
    ok = injective and image_ok and (surjective or not fibers_trivial)
    return {
        "injective": injective,
        "surjective": surjective,
        "fibers_trivial": fibers_trivial,
        "image_ok": image_ok,
        "ok": ok,
        "map": mp,
    }


# ---------------------------------------------------------------------------
# regular group-graphs: contraction and the active-edge description of H1


def contraction_regularity(g: GroupGraph, sub, budget: int = DEFAULT_ENUM_BUDGET) -> GroupGraph:
    """Direct image along the contraction of a supported subtree; asserts the
    output is again regular."""
    ok, violations = is_regular(g)
    if not ok:
        raise GroupGraphError(f"group-graph is not regular: {violations}")
    t = Tree(g.base)
    supp = set(support(g))
    sub_graph = g.base.induced(frozenset(sub))
    if any(e not in supp for e in sub_graph.sorted_edges()):
        raise GroupGraphError("subtree has an edge outside the support")
    _, c = contract(t, sub)
    img, _ = direct_image(c, g, budget)
    ok2, violations2 = is_regular(img)
    if not ok2:
        raise VerificationError(f"contracted group-graph is not regular: {violations2}")
    return img


@dataclass
class ActiveStructure:
    active_edges: list[Edge]
    active_vertex: dict
    components: list[dict]
    chosen: dict
    a_prime: list[Edge]

    @property
    def a(self) -> int:
        return len(self.active_edges)

    @property
    def p(self) -> int:
        return len(self.chosen)

    def to_json(self) -> dict:
        return {
            "active_edges": [edge_key(e) for e in self.active_edges],
            "active_vertex": {edge_key(e): v for e, v in sorted(self.active_vertex.items())},
            "components": [
                {
                    "elements": [
                        s if isinstance(s, str) else edge_key(s) for s in comp["elements"]
                    ],
                    "active": comp["active"],
                    "single_edge": comp["single_edge"],
                    "chosen": edge_key(comp["chosen"]) if comp["chosen"] else None,
                }
                for comp in self.components
            ],
            "a": self.a,
            "p": self.p,
            "a_prime": [edge_key(e) for e in self.a_prime],
        }


def build_active_structure(g: GroupGraph, prefer_last: bool = False) -> ActiveStructure:
    """Active edges, the selected active vertices, and the reduced edge set.

    An edge is active when its group is nontrivial and some endpoint carries
    the trivial group; per active component not reduced to a single edge, one
    active edge is dropped from the basis set.  The default selection is the
    lexicographically smallest candidate; prefer_last reverses every choice
    (dimensions and counts must not depend on it).
    """
    pick_one = max if prefer_last else min
    supp = set(support(g))
    active_edges = []
    active_vertex = {}
    for e in g.base.sorted_edges():
        if e not in supp:
            continue
        a, b = e
        trivial = [v for v in (a, b) if v not in supp]
        if not trivial:
            continue
        active_edges.append(e)
        nontrivial = [v for v in (a, b) if v in supp]
        active_vertex[e] = nontrivial[0] if nontrivial else pick_one(a, b)

    comps = support_components(g)
    components = []
    chosen = {}
    for comp in comps:
        comp_edges = [s for s in comp if not isinstance(s, str)]
        actives_here = [e for e in comp_edges if e in set(active_edges)]
        entry = {
            "elements": comp,
            "active": bool(actives_here),
            "single_edge": len(comp) == 1 and bool(comp_edges),
            "chosen": None,
        }
        if entry["active"] and not entry["single_edge"]:
            pick = pick_one(actives_here)
            entry["chosen"] = pick
            chosen[tuple(sorted((str(s) for s in comp)))] = pick
        components.append(entry)
    removed = {entry["chosen"] for entry in components if entry["chosen"]}
    a_prime = [e for e in active_edges if e not in removed]
    return ActiveStructure(active_edges, active_vertex, components, chosen, a_prime)


def _delta_cocycle(g: GroupGraph, st: ActiveStructure, assignment: dict) -> Cocycle1:
    """The basis realization: inverse at the active vertex, the value at the
    other endpoint, trivial elsewhere."""
    values = {}
    for e in g.base.sorted_edges():
        a, b = e
        if e in assignment:
            va = st.active_vertex[e]
            other = b if va == a else a
            x = assignment[e]
            if g.carrier == "finite":
                values[(va, e)] = g.eobj[e].inv(x)
                values[(other, e)] = x
            else:
                values[(va, e)] = linalg.vec_neg(x)
                values[(other, e)] = x
        else:
            if g.carrier == "finite":
                values[(a, e)] = 0
                values[(b, e)] = 0
            else:
                values[(a, e)] = [Fraction(0)] * g.eobj[e].dim
                values[(b, e)] = [Fraction(0)] * g.eobj[e].dim
    return Cocycle1(g, values)


def regular_h1(
    g: GroupGraph,
    crosscheck: bool = True,
    budget: int = DEFAULT_ENUM_BUDGET,
    prefer_last: bool = False,
) -> tuple[ActiveStructure, CohomologyResult]:
    """H1 of a regular group-graph over a tree via the active-edge description.

    Vector carrier: dimension is the total dimension over the reduced active
    set, with the explicit basis; finite carrier: the class count is the
    product of the active-edge group orders.  Cross-checked against the
    generic pipelines unless disabled.
    """
    ok, violations = is_regular(g)
    if not ok:
        raise GroupGraphError(f"group-graph is not regular: {violations}")
    Tree(g.base)
    st = build_active_structure(g, prefer_last=prefer_last)

    if g.carrier == "vector":
        dim = sum(g.eobj[e].dim for e in st.a_prime)
        basis = []
        for e in st.a_prime:
            for i in range(g.eobj[e].dim):
                unit = [Fraction(0)] * g.eobj[e].dim
                unit[i] = Fraction(1)
                basis.append(_delta_cocycle(g, st, {e: unit}))
        result = CohomologyResult("h1", "vector", dim=dim, basis=basis, _graph=g)
        if crosscheck:
            ref = h1_vector(g)
            if ref.dim != dim:
                raise VerificationError(
                    f"active-edge dimension {dim} disagrees with linear algebra {ref.dim}"
                )
    else:
        count = 1
        for e in st.a_prime:
            count *= g.eobj[e].order
        if count > budget:
            from .group_graph import BudgetExceeded

            raise BudgetExceeded(
                f"active-edge class enumeration of size {count} exceeds budget {budget}",
                {"candidates": count, "budget": budget},
            )
        import itertools

        reps = []
        for combo in itertools.product(*(range(g.eobj[e].order) for e in st.a_prime)):
            reps.append(_delta_cocycle(g, st, dict(zip(st.a_prime, combo))))
        result = CohomologyResult("h1", "finite", count=count, representatives=reps, _graph=g)
        if crosscheck:
            ref = h1_finite_bruteforce(g, budget)
            if ref.count != count:
                raise VerificationError(
                    f"active-edge count {count} disagrees with brute force {ref.count}"
                )
    return st, result


def equidimensional_support_dim(g: GroupGraph) -> int | None:
    """The common dimension of the supported objects, or None if mixed."""
    dims = {g.obj(s).dim for s in support(g)}
    if len(dims) == 1:
        return dims.pop()
    return None


# ---------------------------------------------------------------------------
# tensor


def tensor_h1_verify(t: GroupGraph, w_dim: int) -> bool:
    """dim H1(T tensor W) must factor as dim H1(T) * dim W, with the basis
    correspondence realized explicitly."""
    from .group_graph import VectorSpace

    base_res = h1_vector(t)
    tens = tensor(t, VectorSpace(w_dim))
    tens_res = h1_vector(tens)
    if tens_res.dim != (base_res.dim or 0) * w_dim:
        return False
    coords = []
    for b in base_res.basis or []:
        for jcol in range(w_dim):
            tail = {}
            for e in t.base.sorted_edges():
                d = t.eobj[e].dim
                vec = [Fraction(0)] * (d * w_dim)
                src = b.values[(e[0], e)]
                for i in range(d):
                    vec[i * w_dim + jcol] = src[i]
                tail[e] = vec
            coords.append(h1_class_coordinates(tens_res, Cocycle1.from_tail_values(tens, tail)))
    return linalg.rank(coords) == tens_res.dim
