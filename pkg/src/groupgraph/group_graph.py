"""Group-graphs over a graph in two carriers.

A group-graph assigns a group object to every vertex and edge of a base graph
and a restriction homomorphism vertex -> edge to every incidence.  Carriers:

* "finite": small finite groups given by a Cayley table over element indices
  0..order-1, identity always at index 0;
* "vector": finite-dimensional vector spaces over exact rationals, morphisms
  as matrices.

All values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .graph import (
    Edge,
    Graph,
    GraphMorphism,
    edge_key,
    incidence_key,
    parse_edge_key,
    parse_incidence_key,
)

DEFAULT_GROUP_ORDER_CAP = 24
DEFAULT_PRODUCT_ORDER_BUDGET = 4096


class GroupGraphError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured budget; carries the sizes."""

    def __init__(self, message: str, sizes: dict):
        super().__init__(message)
        self.sizes = sizes


# ---------------------------------------------------------------------------
# carriers


class FiniteGroup:
    """Finite group as a Cayley table over indices 0..order-1, identity = 0."""

    def __init__(self, order: int, table, validate: bool = True):
        self.order = order
        self.table = tuple(tuple(row) for row in table)
        self._inv: tuple[int, ...] | None = None
        if validate:
            self._validate()

    def _validate(self):
        n = self.order
        if n < 1 or len(self.table) != n or any(len(r) != n for r in self.table):
            raise GroupGraphError("Cayley table shape does not match the order")
        for row in self.table:
            for x in row:
                if not (0 <= x < n):
                    raise GroupGraphError("Cayley table entry out of range")
        if any(self.table[0][j] != j for j in range(n)) or any(
            self.table[i][0] != i for i in range(n)
        ):
            raise GroupGraphError("element 0 is not the identity")
        for i in range(n):
            if 0 not in self.table[i]:
                raise GroupGraphError(f"element {i} has no inverse")
        for a in range(n):
            for b in range(n):
                ab = self.table[a][b]
                for c in range(n):
                    if self.table[ab][c] != self.table[a][self.table[b][c]]:
                        raise GroupGraphError("Cayley table is not associative")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        if self._inv is None:
            self._inv = tuple(row.index(0) for row in self.table)
        return self._inv[a]

    def elements(self) -> range:
        return range(self.order)

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_abelian(self) -> bool:
        return all(
            self.table[a][b] == self.table[b][a]
            for a in range(self.order)
            for b in range(a)
        )

    def element_order(self, a: int) -> int:
        x, n = a, 1
        while x != 0:
            x = self.mul(x, a)
            n += 1
        return n

    def generated_subgroup(self, gens) -> frozenset[int]:
        closure = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                for y in (self.mul(x, g), self.mul(x, self.inv(g))):
                    if y not in closure:
                        closure.add(y)
                        frontier.append(y)
        return frozenset(closure)

    def is_subgroup(self, elems) -> bool:
        s = set(elems)
        if 0 not in s:
            return False
        return all(self.mul(a, b) in s and self.inv(a) in s for a in s for b in s)

    def is_normal(self, elems) -> bool:
        s = set(elems)
        return all(
            self.mul(self.mul(g, k), self.inv(g)) in s
            for g in range(self.order)
            for k in s
        )

    def subgroup(self, elems) -> tuple["FiniteGroup", tuple[int, ...]]:
        """Subgroup as its own FiniteGroup plus the inclusion (index -> parent index)."""
        if not self.is_subgroup(elems):
            raise GroupGraphError("not a subgroup")
        incl = (0,) + tuple(sorted(set(elems) - {0}))
        pos = {x: i for i, x in enumerate(incl)}
        table = [[pos[self.mul(a, b)] for b in incl] for a in incl]
        return FiniteGroup(len(incl), table, validate=False), incl

    def quotient(self, normal_elems) -> tuple["FiniteGroup", tuple[int, ...]]:
        """Quotient by a normal subgroup; returns (group, projection index map)."""
        k = frozenset(normal_elems)
        if not self.is_subgroup(k):
            raise GroupGraphError("not a subgroup")
        if not self.is_normal(k):
            raise GroupGraphError("subgroup is not normal")
        coset_of: dict[int, frozenset[int]] = {}
        for x in range(self.order):
            if x not in coset_of:
                cs = frozenset(self.mul(x, h) for h in k)
                for y in cs:
                    coset_of[y] = cs
        cosets = sorted({cs for cs in coset_of.values()}, key=min)
        cosets.sort(key=lambda cs: 0 not in cs)  # identity coset first
        index = {cs: i for i, cs in enumerate(cosets)}
        proj = tuple(index[coset_of[x]] for x in range(self.order))
        reps = [min(cs) for cs in cosets]
        table = [[proj[self.mul(a, b)] for b in reps] for a in reps]
        return FiniteGroup(len(cosets), table, validate=False), proj

    def automorphisms(self) -> list[tuple[int, ...]]:
        """All automorphisms as permutation tuples (brute force; small orders only)."""
        n = self.order
        orders = [self.element_order(a) for a in range(n)]
        perms = []
        for p in itertools.permutations(range(1, n)):
            perm = (0,) + p
            if any(orders[perm[a]] != orders[a] for a in range(1, n)):
                continue
            if all(
                perm[self.table[a][b]] == self.table[perm[a]][perm[b]]
                for a in range(n)
                for b in range(n)
            ):
                perms.append(perm)
        return perms

    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroup)
            and self.order == other.order
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.order, self.table))

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def to_json(self) -> dict:
        return {"order": self.order, "table": [list(r) for r in self.table]}

    @staticmethod
    def from_json(data: dict, order_cap: int = DEFAULT_GROUP_ORDER_CAP) -> "FiniteGroup":
        if data["order"] > order_cap:
            raise BudgetExceeded(
                f"finite group order {data['order']} exceeds the cap {order_cap}",
                {"order": data["order"], "cap": order_cap},
            )
        return FiniteGroup(data["order"], data["table"])


def trivial_group() -> FiniteGroup:
    return FiniteGroup(1, ((0,),), validate=False)


def cyclic_group(n: int) -> FiniteGroup:
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup(n, table, validate=False)


def dihedral_group(n: int) -> FiniteGroup:
    """Dihedral group of order 2n; element i + n*j is rotation^i * flip^j."""

    def mul(x, y):
        i1, j1 = x % n, x // n
        i2, j2 = y % n, y // n
        i = (i1 + (i2 if j1 == 0 else -i2)) % n
        return i + n * ((j1 + j2) % 2)

    table = [[mul(a, b) for b in range(2 * n)] for a in range(2 * n)]
    return FiniteGroup(2 * n, table, validate=False)


def direct_product_group(
    factors: list[FiniteGroup], budget: int = DEFAULT_PRODUCT_ORDER_BUDGET
) -> tuple[FiniteGroup, list[tuple[int, ...]]]:
    """Direct product plus the element tuples in index order (identity first)."""
    order = 1
    for f in factors:
        order *= f.order
    if order > budget:
        raise BudgetExceeded(
            f"product group order {order} exceeds budget {budget}",
            {"order": order, "budget": budget},
        )
    elems = list(itertools.product(*(range(f.order) for f in factors)))
    pos = {t: i for i, t in enumerate(elems)}
    table = [
        [pos[tuple(f.mul(a[i], b[i]) for i, f in enumerate(factors))] for b in elems]
        for a in elems
    ]
    return FiniteGroup(order, table, validate=False), elems


@dataclass(frozen=True)
class VectorSpace:
    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise GroupGraphError("negative dimension")

    def is_trivial(self) -> bool:
        return self.dim == 0

    def to_json(self) -> dict:
        return {"dim": self.dim}

    @staticmethod
    def from_json(data: dict) -> "VectorSpace":
        return VectorSpace(data["dim"])


def obj_is_trivial(obj) -> bool:
    return obj.is_trivial()


def obj_to_json(obj) -> dict:
    return obj.to_json()


def obj_from_json(carrier: str, data: dict, order_cap: int = DEFAULT_GROUP_ORDER_CAP):
    if carrier == "finite":
        return FiniteGroup.from_json(data, order_cap)
    return VectorSpace.from_json(data)


class GroupHom:
    """Homomorphism between two objects of the same carrier.

    Finite carrier: an element map checked exhaustively against the tables.
    Vector carrier: a (target dim x source dim) rational matrix.
    """

    def __init__(self, source, target, data, validate: bool = True):
        self.source = source
        self.target = target
        if isinstance(source, FiniteGroup) != isinstance(target, FiniteGroup):
            raise GroupGraphError("mixed carriers in a homomorphism")
        self.kind = "finite" if isinstance(source, FiniteGroup) else "vector"
        if self.kind == "finite":
            self.data = tuple(data)
        else:
            self.data = [[linalg.frac(x) for x in row] for row in data]
        if validate:
            self._validate()

    def _validate(self):
        if self.kind == "finite":
            if len(self.data) != self.source.order:
                raise GroupGraphError("element map has wrong length")
            if any(not (0 <= x < self.target.order) for x in self.data):
                raise GroupGraphError("element map value out of range")
            for a in range(self.source.order):
                for b in range(self.source.order):
                    if self.data[self.source.mul(a, b)] != self.target.mul(
                        self.data[a], self.data[b]
                    ):
                        raise GroupGraphError("map is not a homomorphism")
        else:
            if len(self.data) != self.target.dim:
                raise GroupGraphError("matrix has wrong number of rows")
            if any(len(r) != self.source.dim for r in self.data):
                raise GroupGraphError("matrix has wrong number of columns")

    def apply(self, x):
        if self.kind == "finite":
            return self.data[x]
        return linalg.mat_vec(self.data, x)

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self o inner."""
        if self.kind != inner.kind or inner.target != self.source:
            raise GroupGraphError("homomorphisms do not compose")
        if self.kind == "finite":
            return GroupHom(
                inner.source, self.target,
                tuple(self.data[x] for x in inner.data), validate=False,
            )
        rows, mid, cols = self.target.dim, self.source.dim, inner.source.dim
        if mid == 0:
            data = linalg.zeros(rows, cols)  # zero-row factors lose their width
        else:
            data = linalg.mat_mul(self.data, inner.data)
        return GroupHom(inner.source, self.target, data, validate=False)

    def is_surjective(self) -> bool:
        if self.kind == "finite":
            return len(set(self.data)) == self.target.order
        return linalg.rank(self.data) == self.target.dim

    def is_injective(self) -> bool:
        if self.kind == "finite":
            return len(set(self.data)) == self.source.order
        return linalg.rank(self.data) == self.source.dim

    def is_iso(self) -> bool:
        return self.is_surjective() and self.is_injective()

    def kernel(self):
        """Finite: sorted element indices.  Vector: a basis of the null space."""
        if self.kind == "finite":
            return frozenset(x for x in range(self.source.order) if self.data[x] == 0)
        return linalg.kernel_basis(self.data, self.source.dim)

    def image(self):
        """Finite: sorted element indices.  Vector: a basis of the column space."""
        if self.kind == "finite":
            return frozenset(self.data)
        cols = linalg.transpose(self.data, self.source.dim)
        return linalg.row_space_basis(cols)

    def equal_maps(self, other: "GroupHom") -> bool:
        if self.kind != other.kind:
            return False
        return self.data == other.data

    @staticmethod
    def identity(obj) -> "GroupHom":
        if isinstance(obj, FiniteGroup):
            return GroupHom(obj, obj, tuple(range(obj.order)), validate=False)
        return GroupHom(obj, obj, linalg.identity(obj.dim), validate=False)

    @staticmethod
    def trivial(source, target) -> "GroupHom":
        """The hom killing everything (zero matrix / constant identity)."""
        if isinstance(source, FiniteGroup):
            return GroupHom(source, target, (0,) * source.order, validate=False)
        return GroupHom(source, target, linalg.zeros(target.dim, source.dim), validate=False)

    def to_json(self) -> dict:
        if self.kind == "finite":
            return {"map": list(self.data)}
        return {"matrix": linalg.matrix_to_json(self.data)}

    @staticmethod
    def from_json(source, target, data: dict) -> "GroupHom":
        if "map" in data:
            return GroupHom(source, target, data["map"])
        return GroupHom(source, target, linalg.matrix_from_json(data["matrix"]))


# ---------------------------------------------------------------------------
# group-graphs

Star = object  # str (vertex) or Edge (tuple); used for documentation only


class GroupGraph:
    def __init__(self, base: Graph, carrier: str, vobj: dict, eobj: dict, restrictions: dict):
        if carrier not in ("finite", "vector"):
            raise GroupGraphError(f"unknown carrier {carrier!r}")
        self.base = base
        self.carrier = carrier
        self.vobj = dict(vobj)
        self.eobj = {parse_edge_key(edge_key(e)): o for e, o in eobj.items()}
        self.restrictions = dict(restrictions)
        self._validate()

    def _validate(self):
        want = FiniteGroup if self.carrier == "finite" else VectorSpace
        if set(self.vobj) != set(self.base.vertices):
            raise GroupGraphError("vertex assignment is not total")
        if set(self.eobj) != set(self.base.edges):
            raise GroupGraphError("edge assignment is not total")
        for obj in list(self.vobj.values()) + list(self.eobj.values()):
            if not isinstance(obj, want):
                raise GroupGraphError("carrier is not homogeneous")
        incidences = set(self.base.incidences())
        if set(self.restrictions) != incidences:
            raise GroupGraphError("restriction assignment is not total")
        for (v, e), hom in self.restrictions.items():
            if hom.source != self.vobj[v] or hom.target != self.eobj[e]:
                raise GroupGraphError(f"restriction at {incidence_key(v, e)} has wrong endpoints")

    def obj(self, star):
        return self.vobj[star] if isinstance(star, str) else self.eobj[star]

    def restriction(self, v: str, e: Edge) -> GroupHom:
        return self.restrictions[(v, e)]

    def stars(self) -> list:
        return self.base.sorted_vertices() + self.base.sorted_edges()

    def is_trivial(self) -> bool:
        return all(obj_is_trivial(self.obj(s)) for s in self.stars())

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "carrier": self.carrier,
            "vertices": {v: obj_to_json(o) for v, o in sorted(self.vobj.items())},
            "edges": {edge_key(e): obj_to_json(o) for e, o in sorted(self.eobj.items())},
            "restrictions": {
                incidence_key(v, e): h.to_json()
                for (v, e), h in sorted(self.restrictions.items())
            },
        }

    @staticmethod
    def from_json(data: dict, order_cap: int = DEFAULT_GROUP_ORDER_CAP) -> "GroupGraph":
        base = Graph.from_json(data["base"])
        carrier = data["carrier"]
        vobj = {v: obj_from_json(carrier, o, order_cap) for v, o in data["vertices"].items()}
        eobj = {parse_edge_key(k): obj_from_json(carrier, o, order_cap) for k, o in data["edges"].items()}
        restrictions = {}
        for key, h in data["restrictions"].items():
            v, e = parse_incidence_key(key)
            restrictions[(v, e)] = GroupHom.from_json(vobj[v], eobj[e], h)
        return GroupGraph(base, carrier, vobj, eobj, restrictions)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def constant_group_graph(base: Graph, obj, carrier: str | None = None) -> GroupGraph:
    """The same object everywhere with identity restrictions."""
    carrier = carrier or ("finite" if isinstance(obj, FiniteGroup) else "vector")
    vobj = {v: obj for v in base.vertices}
    eobj = {e: obj for e in base.edges}
    restrictions = {(v, e): GroupHom.identity(obj) for v, e in base.incidences()}
    return GroupGraph(base, carrier, vobj, eobj, restrictions)


def trivial_group_graph(base: Graph, carrier: str) -> GroupGraph:
    obj = trivial_group() if carrier == "finite" else VectorSpace(0)
    return GroupGraph(
        base,
        carrier,
        {v: obj for v in base.vertices},
        {e: obj for e in base.edges},
        {(v, e): GroupHom.trivial(obj, obj) for v, e in base.incidences()},
    )


class GroupGraphMorphism:
    """Morphism of group-graphs over a graph morphism.

    Conventions: `over` maps the base of `target` into the base of `source`;
    the per-star maps go G_{over(star)} -> G'_star for stars of target's base.
    The commuting-square law (with identity restriction on collapsed edges) is
    checked at construction.
    """

    def __init__(self, over: GraphMorphism, source: GroupGraph, target: GroupGraph,
                 maps: dict, validate: bool = True):
        self.over = over
        self.source = source
        self.target = target
        self.maps = dict(maps)
        if validate:
            self._validate()

    def _validate(self):
        if self.source.base != self.over.target or self.target.base != self.over.source:
            raise GroupGraphError("morphism bases do not match the graph morphism")
        stars = set(self.target.base.vertices) | set(self.target.base.edges)
        if set(self.maps) != stars:
            raise GroupGraphError("star maps are not total")
        for star in stars:
            img = self.over.apply(star) if isinstance(star, str) else self.over.apply_edge(star)
            hom = self.maps[star]
            if hom.source != self.source.obj(img) or hom.target != self.target.obj(star):
                raise GroupGraphError("star map has wrong endpoints")
        for v, e in self.target.base.incidences():
            lhs = self.target.restriction(v, e).compose(self.maps[v])
            img_e = self.over.apply_edge(e)
            if isinstance(img_e, str):
                rhs = self.maps[e]  # collapsed edge: the upstairs restriction is the identity
            else:
                rhs = self.maps[e].compose(self.source.restriction(self.over.apply(v), img_e))
            if not lhs.equal_maps(rhs):
                raise GroupGraphError(f"square at {incidence_key(v, e)} does not commute")

    @staticmethod
    def identity(g: GroupGraph) -> "GroupGraphMorphism":
        return GroupGraphMorphism(
            GraphMorphism.identity(g.base), g, g,
            {s: GroupHom.identity(g.obj(s)) for s in g.stars()},
        )

    def compose(self, other: "GroupGraphMorphism") -> "GroupGraphMorphism":
        """other applied first: self o other, over other.over o self.over."""
        if other.target is not self.source and other.target.to_json() != self.source.to_json():
            raise GroupGraphError("group-graph morphisms do not compose")
        over = other.over.compose(self.over)
        maps = {}
        for star in self.target.stars():
            img = self.over.apply(star) if isinstance(star, str) else self.over.apply_edge(star)
            maps[star] = self.maps[star].compose(other.maps[img])
        return GroupGraphMorphism(over, other.source, self.target, maps)

    def is_over_identity(self) -> bool:
        return self.over.is_identity()


# ---------------------------------------------------------------------------
# operations


def pullback(phi: GraphMorphism, g: GroupGraph) -> tuple[GroupGraph, GroupGraphMorphism]:
    """Pull a group-graph on phi's target back to phi's source.

    Objects are copied along phi; a collapsed edge gets the identity
    restriction.  Also returns the canonical morphism given by identity maps.
    """
    if g.base != phi.target:
        raise GroupGraphError("group-graph does not live on the morphism target")
    vobj = {v: g.vobj[phi.apply(v)] for v in phi.source.vertices}
    eobj = {}
    for e in phi.source.edges:
        img = phi.apply_edge(e)
        eobj[e] = g.vobj[img] if isinstance(img, str) else g.eobj[img]
    restrictions = {}
    for v, e in phi.source.incidences():
        img = phi.apply_edge(e)
        if isinstance(img, str):
            restrictions[(v, e)] = GroupHom.identity(vobj[v])
        else:
            restrictions[(v, e)] = g.restriction(phi.apply(v), img)
    pb = GroupGraph(phi.source, g.carrier, vobj, eobj, restrictions)
    canonical = GroupGraphMorphism(
        phi, g, pb, {s: GroupHom.identity(pb.obj(s)) for s in pb.stars()}
    )
    return pb, canonical


def _h0_subgroup_finite(g: GroupGraph, sub: Graph, budget: int):
    """Compatible families over a subgraph; returns (tuples, vertex order)."""
    vs = sorted(sub.vertices)
    size = 1
    for v in vs:
        size *= g.vobj[v].order
    if size > budget:
        raise BudgetExceeded(
            f"H0 fiber enumeration of size {size} exceeds budget {budget}",
            {"candidates": size, "budget": budget},
        )
    pos = {v: i for i, v in enumerate(vs)}
    out = []
    for t in itertools.product(*(range(g.vobj[v].order) for v in vs)):
        ok = True
        for a, b in sub.sorted_edges():
            e = (a, b)
            if g.restriction(a, e).apply(t[pos[a]]) != g.restriction(b, e).apply(t[pos[b]]):
                ok = False
                break
        if ok:
            out.append(t)
    out.sort()
    return out, vs


def _h0_basis_vector(g: GroupGraph, sub: Graph):
    """Kernel basis of the difference map on a subgraph; returns (basis, vertex order, offsets)."""
    vs = sorted(sub.vertices)
    offs, total = {}, 0
    for v in vs:
        offs[v] = total
        total += g.vobj[v].dim
    rows = []
    for a, b in sub.sorted_edges():
        e = (a, b)
        ra, rb = g.restriction(a, e), g.restriction(b, e)
        for i in range(g.eobj[e].dim):
            row = [Fraction(0)] * total
            for j in range(g.vobj[a].dim):
                row[offs[a] + j] += ra.data[i][j]
            for j in range(g.vobj[b].dim):
                row[offs[b] + j] -= rb.data[i][j]
            rows.append(row)
    basis = linalg.kernel_basis(rows, total)
    return basis, vs, offs


def direct_image(
    phi: GraphMorphism, g: GroupGraph, budget: int = DEFAULT_PRODUCT_ORDER_BUDGET
) -> tuple[GroupGraph, GroupGraphMorphism]:
    """Direct image along phi plus the canonical projection morphism.

    Vertex objects are compatible families over the vertex fibers, edge objects
    are products over the edge fibers; empty fibers carry the trivial object.
    """
    if g.base != phi.source:
        raise GroupGraphError("group-graph does not live on the morphism source")
    tgt = phi.target
    carrier = g.carrier

    fiber_data = {}  # v' -> finite: (group, tuples, vs) | vector: (space, basis, vs, offs)
    for v2 in tgt.sorted_vertices():
        fiber = phi.fiber(v2)
        if carrier == "finite":
            tuples, vs = _h0_subgroup_finite(g, fiber, budget)
            pos = {t: i for i, t in enumerate(tuples)}
            table = [
                [pos[tuple(g.vobj[v].mul(a[i], b[i]) for i, v in enumerate(vs))] for b in tuples]
                for a in tuples
            ]
            fiber_data[v2] = (FiniteGroup(len(tuples), table, validate=False), tuples, vs)
        else:
            basis, vs, offs = _h0_basis_vector(g, fiber)
            fiber_data[v2] = (VectorSpace(len(basis)), basis, vs, offs)

    edge_data = {}  # e' -> finite: (group, tuples, fiber_edges) | vector: (space, fiber_edges, offs)
    for e2 in tgt.sorted_edges():
        fe = phi.edge_fiber(e2)
        if carrier == "finite":
            prod, tuples = direct_product_group([g.eobj[e] for e in fe], budget)
            edge_data[e2] = (prod, tuples, fe)
        else:
            offs, total = {}, 0
            for e in fe:
                offs[e] = total
                total += g.eobj[e].dim
            edge_data[e2] = (VectorSpace(total), fe, offs)

    vobj = {v2: fiber_data[v2][0] for v2 in tgt.vertices}
    eobj = {e2: edge_data[e2][0] for e2 in tgt.edges}

    def fiber_endpoint(e: Edge, v2: str) -> str:
        return e[0] if phi.apply(e[0]) == v2 else e[1]

    restrictions = {}
    for v2, e2 in tgt.incidences():
        if carrier == "finite":
            grp, tuples, vs = fiber_data[v2]
            prod, ptuples, fe = edge_data[e2]
            ppos = {t: i for i, t in enumerate(ptuples)}
            vpos = {v: i for i, v in enumerate(vs)}
            mapping = []
            for t in tuples:
                comps = tuple(
                    g.restriction(fiber_endpoint(e, v2), e).apply(t[vpos[fiber_endpoint(e, v2)]])
                    for e in fe
                )
                mapping.append(ppos[comps])
            restrictions[(v2, e2)] = GroupHom(grp, prod, mapping, validate=False)
        else:
            space, basis, vs, offs = fiber_data[v2]
            espace, fe, eoffs = edge_data[e2]
            m = linalg.zeros(espace.dim, space.dim)
            for col, bvec in enumerate(basis):
                for e in fe:
                    x = fiber_endpoint(e, v2)
                    part = bvec[offs[x]: offs[x] + g.vobj[x].dim]
                    img = g.restriction(x, e).apply(part)
                    for i, val in enumerate(img):
                        m[eoffs[e] + i][col] = val
            restrictions[(v2, e2)] = GroupHom(space, espace, m, validate=False)

    out = GroupGraph(tgt, carrier, vobj, eobj, restrictions)

    # canonical projection j: direct image -> g, over phi
    maps = {}
    for v in g.base.sorted_vertices():
        v2 = phi.apply(v)
        if carrier == "finite":
            grp, tuples, vs = fiber_data[v2]
            vpos = vs.index(v)
            maps[v] = GroupHom(grp, g.vobj[v], [t[vpos] for t in tuples], validate=False)
        else:
            space, basis, vs, offs = fiber_data[v2]
            d = g.vobj[v].dim
            m = [[basis[col][offs[v] + i] for col in range(space.dim)] for i in range(d)]
            maps[v] = GroupHom(space, g.vobj[v], m, validate=False)
    for e in g.base.sorted_edges():
        img = phi.apply_edge(e)
        if isinstance(img, str):
            # collapsed edge: common restriction of the compatible family
            x = min(e)
            if carrier == "finite":
                grp, tuples, vs = fiber_data[img]
                vpos = vs.index(x)
                maps[e] = GroupHom(
                    grp, g.eobj[e],
                    [g.restriction(x, e).apply(t[vpos]) for t in tuples], validate=False,
                )
            else:
                space, basis, vs, offs = fiber_data[img]
                d = g.eobj[e].dim
                m = linalg.zeros(d, space.dim)
                for col, bvec in enumerate(basis):
                    part = bvec[offs[x]: offs[x] + g.vobj[x].dim]
                    img_vec = g.restriction(x, e).apply(part)
                    for i, val in enumerate(img_vec):
                        m[i][col] = val
                maps[e] = GroupHom(space, g.eobj[e], m, validate=False)
        else:
            if carrier == "finite":
                prod, ptuples, fe = edge_data[img]
                epos = fe.index(e)
                maps[e] = GroupHom(prod, g.eobj[e], [t[epos] for t in ptuples], validate=False)
            else:
                espace, fe, eoffs = edge_data[img]
                d = g.eobj[e].dim
                m = linalg.zeros(d, espace.dim)
                for i in range(d):
                    m[i][eoffs[e] + i] = Fraction(1)
                maps[e] = GroupHom(espace, g.eobj[e], m, validate=False)

    j = GroupGraphMorphism(phi, out, g, maps)
    return out, j


class SubGroupGraph:
    """A componentwise sub-object of a group-graph, restriction-stable.

    Finite carrier: a frozenset of element indices per star.  Vector carrier:
    a list of basis vectors per star.
    """

    def __init__(self, parent: GroupGraph, subs: dict, validate: bool = True):
        self.parent = parent
        if parent.carrier == "finite":
            self.subs = {s: frozenset(x) for s, x in subs.items()}
        else:
            self.subs = {
                s: linalg.row_space_basis([[linalg.frac(c) for c in vec] for vec in x])
                for s, x in subs.items()
            }
        if validate:
            self._validate()

    def _validate(self):
        stars = set(self.parent.base.vertices) | set(self.parent.base.edges)
        if set(self.subs) != stars:
            raise GroupGraphError("sub-assignment is not total")
        for s in stars:
            obj = self.parent.obj(s)
            if self.parent.carrier == "finite":
                if not obj.is_subgroup(self.subs[s]):
                    raise GroupGraphError(f"not a subgroup at {s}")
            else:
                for vec in self.subs[s]:
                    if len(vec) != obj.dim:
                        raise GroupGraphError(f"basis vector of wrong length at {s}")
        for v, e in self.parent.base.incidences():
            rho = self.parent.restriction(v, e)
            if self.parent.carrier == "finite":
                if not all(rho.apply(x) in self.subs[e] for x in self.subs[v]):
                    raise GroupGraphError(f"restriction at {incidence_key(v, e)} leaves the sub")
            else:
                for vec in self.subs[v]:
                    if not linalg.in_span(self.subs[e], rho.apply(vec)):
                        raise GroupGraphError(f"restriction at {incidence_key(v, e)} leaves the sub")

    def is_normal(self) -> bool:
        if self.parent.carrier == "vector":
            return True
        return all(
            self.parent.obj(s).is_normal(self.subs[s])
            for s in self.subs
        )

    def size(self, star):
        if self.parent.carrier == "finite":
            return len(self.subs[star])
        return len(self.subs[star])

    def is_trivial(self) -> bool:
        if self.parent.carrier == "finite":
            return all(len(x) == 1 for x in self.subs.values())
        return all(len(x) == 0 for x in self.subs.values())

    def equals_parent(self) -> bool:
        if self.parent.carrier == "finite":
            return all(len(self.subs[s]) == self.parent.obj(s).order for s in self.subs)
        return all(len(self.subs[s]) == self.parent.obj(s).dim for s in self.subs)

    def as_group_graph(self) -> GroupGraph:
        """Materialize the sub as its own group-graph (used by verifier suites)."""
        p = self.parent
        if p.carrier == "finite":
            made = {s: p.obj(s).subgroup(self.subs[s]) for s in self.subs}
            vobj = {v: made[v][0] for v in p.base.vertices}
            eobj = {e: made[e][0] for e in p.base.edges}
            restrictions = {}
            for v, e in p.base.incidences():
                _, incl_v = made[v]
                sub_e, incl_e = made[e]
                back = {x: i for i, x in enumerate(incl_e)}
                rho = p.restriction(v, e)
                restrictions[(v, e)] = GroupHom(
                    vobj[v], eobj[e], [back[rho.apply(x)] for x in incl_v], validate=False
                )
            return GroupGraph(p.base, "finite", vobj, eobj, restrictions)
        vobj = {v: VectorSpace(len(self.subs[v])) for v in p.base.vertices}
        eobj = {e: VectorSpace(len(self.subs[e])) for e in p.base.edges}
        restrictions = {}
        for v, e in p.base.incidences():
            rho = p.restriction(v, e)
            cols = []
            for vec in self.subs[v]:
                img = rho.apply(vec)
                coords = linalg.solve(
                    linalg.transpose(self.subs[e], p.obj(e).dim), img, len(self.subs[e])
                )
                cols.append(coords)
            m = [[cols[j][i] for j in range(len(cols))] for i in range(len(self.subs[e]))]
            restrictions[(v, e)] = GroupHom(vobj[v], eobj[e], m, validate=False)
        return GroupGraph(p.base, "vector", vobj, eobj, restrictions)


def full_sub(g: GroupGraph) -> SubGroupGraph:
    if g.carrier == "finite":
        return SubGroupGraph(g, {s: frozenset(range(g.obj(s).order)) for s in g.stars()})
    return SubGroupGraph(g, {s: linalg.identity(g.obj(s).dim) for s in g.stars()})


def trivial_sub(g: GroupGraph) -> SubGroupGraph:
    if g.carrier == "finite":
        return SubGroupGraph(g, {s: frozenset({0}) for s in g.stars()})
    return SubGroupGraph(g, {s: [] for s in g.stars()})


def quotient_with_projection(g: GroupGraph, k: SubGroupGraph) -> tuple[GroupGraph, GroupGraphMorphism]:
    """Componentwise quotient G/K plus the projection morphism over the identity."""
    if k.parent is not g and k.parent.to_json() != g.to_json():
        raise GroupGraphError("sub-group-graph does not belong to this group-graph")
    if not k.is_normal():
        raise GroupGraphError("sub-group-graph is not normal")
    if g.carrier == "finite":
        made = {s: g.obj(s).quotient(k.subs[s]) for s in g.stars()}
        vobj = {v: made[v][0] for v in g.base.vertices}
        eobj = {e: made[e][0] for e in g.base.edges}
        restrictions = {}
        for v, e in g.base.incidences():
            qv, proj_v = made[v]
            qe, proj_e = made[e]
            rho = g.restriction(v, e)
            reps = [proj_v.index(c) for c in range(qv.order)]
            restrictions[(v, e)] = GroupHom(
                qv, qe, [proj_e[rho.apply(r)] for r in reps], validate=False
            )
        quo = GroupGraph(g.base, "finite", vobj, eobj, restrictions)
        maps = {s: GroupHom(g.obj(s), quo.obj(s), made[s][1], validate=False) for s in g.stars()}
    else:
        qmaps = {s: linalg.quotient_map(k.subs[s], g.obj(s).dim) for s in g.stars()}
        secs = {s: linalg.quotient_section(k.subs[s], g.obj(s).dim) for s in g.stars()}
        vobj = {v: VectorSpace(len(qmaps[v])) for v in g.base.vertices}
        eobj = {e: VectorSpace(len(qmaps[e])) for e in g.base.edges}
        restrictions = {}
        for v, e in g.base.incidences():
            rho = g.restriction(v, e)
            m = linalg.mat_mul(qmaps[e], linalg.mat_mul(rho.data, secs[v]))
            restrictions[(v, e)] = GroupHom(vobj[v], eobj[e], m, validate=False)
        quo = GroupGraph(g.base, "vector", vobj, eobj, restrictions)
        maps = {s: GroupHom(g.obj(s), quo.obj(s), qmaps[s], validate=False) for s in g.stars()}
    proj = GroupGraphMorphism(GraphMorphism.identity(g.base), g, quo, maps)
    return quo, proj


def quotient(g: GroupGraph, k: SubGroupGraph) -> GroupGraph:
    return quotient_with_projection(g, k)[0]


def tensor(t: GroupGraph, w: VectorSpace) -> GroupGraph:
    """Tensor a vector-space graph with a fixed space: dims multiply, maps Kronecker."""
    if t.carrier != "vector":
        raise GroupGraphError("tensor requires the vector carrier")
    d = w.dim
    vobj = {v: VectorSpace(o.dim * d) for v, o in t.vobj.items()}
    eobj = {e: VectorSpace(o.dim * d) for e, o in t.eobj.items()}
    restrictions = {}
    for v, e in t.base.incidences():
        rho = t.restriction(v, e)
        m = linalg.kron(
            rho.data, (t.eobj[e].dim, t.vobj[v].dim), linalg.identity(d), (d, d)
        )
        restrictions[(v, e)] = GroupHom(vobj[v], eobj[e], m, validate=False)
    return GroupGraph(t.base, "vector", vobj, eobj, restrictions)


def support(g: GroupGraph) -> list:
    """Stars with a nontrivial object, vertices first then edges, sorted."""
    return [s for s in g.stars() if not obj_is_trivial(g.obj(s))]


def support_components(g: GroupGraph) -> list[list]:
    """Path-connected components of the support, as sorted star lists."""
    supp = support(g)
    index = {s: i for i, s in enumerate(supp)}
    parent = list(range(len(supp)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v, e in g.base.incidences():
        if v in index and e in index:
            ra, rb = find(index[v]), find(index[e])
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, list] = {}
    for s in supp:
        groups.setdefault(find(index[s]), []).append(s)
    comps = [sorted(members, key=_star_sort_key) for members in groups.values()]
    comps.sort(key=lambda c: _star_sort_key(c[0]))
    return comps


def _star_sort_key(star):
    return (0, star, "") if isinstance(star, str) else (1, star[0], star[1])


def is_regular(g: GroupGraph) -> tuple[bool, list[tuple[str, Edge]]]:
    """A group-graph is regular when in-support restrictions are isomorphisms."""
    supp = set(support(g))
    violations = [
        (v, e)
        for v, e in g.base.incidences()
        if v in supp and e in supp and not g.restriction(v, e).is_iso()
    ]
    return not violations, violations


def remove_offsupport_edges(g: GroupGraph) -> tuple[GroupGraph, GraphMorphism]:
    """Drop every edge carrying a trivial group; cohomology is unchanged."""
    keep = [e for e in g.base.sorted_edges() if not obj_is_trivial(g.eobj[e])]
    smaller = Graph(g.base.vertices, frozenset(keep))
    inclusion = GraphMorphism.inclusion(smaller, g.base)
    restricted, _ = pullback(inclusion, g)
    return restricted, inclusion


def as_over_identity(m: GroupGraphMorphism) -> GroupGraphMorphism:
    """The associated morphism over the identity: pullback source, same maps."""
    if m.is_over_identity():
        return m
    pb, _ = pullback(m.over, m.source)
    return GroupGraphMorphism(
        GraphMorphism.identity(m.target.base), pb, m.target, m.maps
    )


def kernel_of(m: GroupGraphMorphism) -> SubGroupGraph:
    """Componentwise kernels; a sub of the source (of its pullback when the
    morphism is not over the identity)."""
    mm = as_over_identity(m)
    return SubGroupGraph(mm.source, {s: mm.maps[s].kernel() for s in mm.source.stars()})


def image_of(m: GroupGraphMorphism) -> SubGroupGraph:
    """Componentwise images; a sub of the target."""
    mm = as_over_identity(m)
    return SubGroupGraph(mm.target, {s: mm.maps[s].image() for s in mm.target.stars()})
