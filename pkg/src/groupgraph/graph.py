"""Finite undirected graphs and trees.

Vertices are opaque strings; edges are unordered pairs of distinct vertices,
canonicalized as sorted 2-tuples.  Every "choose one" step picks the
lexicographically smallest candidate so all outputs are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

Edge = tuple[str, str]

# '#' and '|' are reserved by the JSON key formats.
RESERVED = set("#|")


class GraphError(ValueError):
    pass


def edge(a: str, b: str) -> Edge:
    if a == b:
        raise GraphError(f"self-loop at {a!r}")
    return (a, b) if a < b else (b, a)


def edge_key(e: Edge) -> str:
    return f"{e[0]}#{e[1]}"


def parse_edge_key(key: str) -> Edge:
    a, sep, b = key.partition("#")
    if not sep:
        raise GraphError(f"bad edge key {key!r}")
    return edge(a, b)


def incidence_key(v: str, e: Edge) -> str:
    return f"{v}|{edge_key(e)}"


def parse_incidence_key(key: str) -> tuple[str, Edge]:
    v, sep, ek = key.partition("|")
    if not sep:
        raise GraphError(f"bad incidence key {key!r}")
    return v, parse_edge_key(ek)


@dataclass(frozen=True)
class Graph:
    vertices: frozenset[str]
    edges: frozenset[Edge]

    def __post_init__(self):
        for v in self.vertices:
            if not v or any(c in RESERVED for c in v):
                raise GraphError(f"bad vertex identifier {v!r}")
        for e in self.edges:
            a, b = e
            if a == b:
                raise GraphError(f"self-loop at {a!r}")
            if a > b:
                raise GraphError(f"edge {e} not canonicalized")
            if a not in self.vertices or b not in self.vertices:
                raise GraphError(f"edge {e} has endpoint outside the vertex set")

    @staticmethod
    def make(vertices, edges) -> "Graph":
        return Graph(frozenset(vertices), frozenset(edge(a, b) for a, b in edges))

    def sorted_vertices(self) -> list[str]:
        return sorted(self.vertices)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def incidences(self) -> list[tuple[str, Edge]]:
        """The oriented-edge set: every (v, e) with v an endpoint of e."""
        out = []
        for e in self.sorted_edges():
            out.append((e[0], e))
            out.append((e[1], e))
        return out

    def incident_edges(self, v: str) -> list[Edge]:
        return [e for e in self.sorted_edges() if v in e]

    def neighbors(self, v: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def has_vertex(self, v: str) -> bool:
        return v in self.vertices

    def subgraph(self, vertices, edges) -> "Graph":
        sub = Graph.make(vertices, edges)
        if not sub.vertices <= self.vertices or not sub.edges <= self.edges:
            raise GraphError("not a subgraph")
        return sub

    def induced(self, vertices) -> "Graph":
        vs = frozenset(vertices)
        return Graph(vs, frozenset(e for e in self.edges if e[0] in vs and e[1] in vs))

    def to_json(self) -> dict:
        return {
            "vertices": self.sorted_vertices(),
            "edges": [[a, b] for a, b in self.sorted_edges()],
        }

    @staticmethod
    def from_json(data: dict) -> "Graph":
        return Graph.make(data["vertices"], data["edges"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class Tree:
    """A connected acyclic Graph; construction validates tree-ness."""

    graph: Graph

    def __post_init__(self):
        if not validate_tree(self.graph):
            raise GraphError("graph is not a tree")

    @staticmethod
    def make(vertices, edges) -> "Tree":
        return Tree(Graph.make(vertices, edges))

    @property
    def vertices(self):
        return self.graph.vertices

    @property
    def edges(self):
        return self.graph.edges


@dataclass(frozen=True)
class GraphMorphism:
    """Vertex map such that every edge maps to an edge or collapses to a vertex."""

    source: Graph
    target: Graph
    vertex_map: tuple[tuple[str, str], ...]

    @staticmethod
    def make(source: Graph, target: Graph, vertex_map: dict) -> "GraphMorphism":
        return GraphMorphism(source, target, tuple(sorted(vertex_map.items())))

    def __post_init__(self):
        vm = dict(self.vertex_map)
        if set(vm) != set(self.source.vertices):
            raise GraphError("vertex_map domain is not the source vertex set")
        for v, w in vm.items():
            if w not in self.target.vertices:
                raise GraphError(f"vertex {v!r} maps outside the target")
        for a, b in self.source.edges:
            fa, fb = vm[a], vm[b]
            if fa != fb and edge(fa, fb) not in self.target.edges:
                raise GraphError(f"edge {(a, b)} maps to the non-edge {(fa, fb)}")

    def apply(self, v: str) -> str:
        return dict(self.vertex_map)[v]

    def apply_edge(self, e: Edge):
        """Image of an edge: a target Edge, or a vertex string when collapsed."""
        vm = dict(self.vertex_map)
        fa, fb = vm[e[0]], vm[e[1]]
        return vm[e[0]] if fa == fb else edge(fa, fb)

    def collapses(self, e: Edge) -> bool:
        return isinstance(self.apply_edge(e), str)

    def is_identity(self) -> bool:
        return (
            self.source == self.target
            and all(v == w for v, w in self.vertex_map)
        )

    @staticmethod
    def identity(g: Graph) -> "GraphMorphism":
        return GraphMorphism.make(g, g, {v: v for v in g.vertices})

    @staticmethod
    def inclusion(sub: Graph, ambient: Graph) -> "GraphMorphism":
        if not sub.vertices <= ambient.vertices or not sub.edges <= ambient.edges:
            raise GraphError("not a subgraph inclusion")
        return GraphMorphism.make(sub, ambient, {v: v for v in sub.vertices})

    def compose(self, inner: "GraphMorphism") -> "GraphMorphism":
        """self o inner (inner applied first)."""
        if inner.target != self.source:
            raise GraphError("morphisms do not compose")
        vm = {v: self.apply(inner.apply(v)) for v in inner.source.vertices}
        return GraphMorphism.make(inner.source, self.target, vm)

    def fiber(self, v: str) -> Graph:
        """Preimage subgraph of a target vertex: source vertices and collapsed edges."""
        vs = frozenset(u for u in self.source.vertices if self.apply(u) == v)
        es = frozenset(e for e in self.source.edges if self.apply_edge(e) == v)
        return Graph(vs, es)

    def edge_fiber(self, e: Edge) -> list[Edge]:
        return sorted(f for f in self.source.edges if self.apply_edge(f) == e)


@dataclass(frozen=True)
class Geodesic:
    """Alternating vertex/edge sequence (c0, ..., cl), minimal, elements distinct."""

    elements: tuple

    def __post_init__(self):
        els = self.elements
        if not els:
            raise GraphError("empty geodesic")
        if len(set(els)) != len(els):
            raise GraphError("geodesic repeats an element")
        for i, c in enumerate(els):
            is_vertex = i % 2 == 0
            if is_vertex != isinstance(c, str):
                raise GraphError("geodesic does not alternate vertex/edge")
            if i > 0:
                prev = els[i - 1]
                v, e = (c, prev) if is_vertex else (prev, c)
                if v not in e:
                    raise GraphError("consecutive geodesic elements not incident")

    def vertices(self) -> list[str]:
        return [c for i, c in enumerate(self.elements) if i % 2 == 0]

    def edges(self) -> list[Edge]:
        return [c for i, c in enumerate(self.elements) if i % 2 == 1]

    def contains(self, other: "Geodesic") -> bool:
        return set(other.elements) <= set(self.elements)

    def to_json(self) -> list:
        return [c if isinstance(c, str) else [c[0], c[1]] for c in self.elements]


def validate_tree(g: Graph) -> bool:
    """True iff g is connected and acyclic."""
    if not g.vertices:
        return False
    if len(g.edges) != len(g.vertices) - 1:
        return False
    return len(connected_components(g)) == 1


def connected_components(g: Graph) -> list[tuple[list[str], list[Edge]]]:
    """Vertex partition plus induced edge partition, ordered by smallest vertex."""
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, list[str]] = {}
    for v in g.vertices:
        groups.setdefault(find(v), []).append(v)
    comps = []
    for members in groups.values():
        vs = sorted(members)
        es = sorted(e for e in g.edges if find(e[0]) == find(members[0]))
        comps.append((vs, es))
    comps.sort(key=lambda c: c[0][0])
    return comps


def first_homology_rank(g: Graph) -> int:
    return len(g.edges) - len(g.vertices) + len(connected_components(g))


def _check_subtree(t: Tree, r) -> frozenset[str]:
    rset = frozenset(r)
    if not rset:
        raise GraphError("empty subtree")
    if not rset <= t.vertices:
        raise GraphError("subtree vertices not in the tree")
    induced = t.graph.induced(rset)
    if not validate_tree(induced):
        raise GraphError("vertex set does not induce a subtree")
    return rset


def geodesic_to_subtree(t: Tree, r, v: str) -> Geodesic:
    """Unique minimal path from v whose last element lies in r, avoiding r before.

    When v is in r the geodesic is the single element v.
    """
    rset = _check_subtree(t, r)
    if v not in t.vertices:
        raise GraphError(f"vertex {v!r} not in the tree")
    if v in rset:
        return Geodesic((v,))
    # BFS from v; the tree structure makes the path unique.
    prev: dict[str, tuple[str, Edge]] = {}
    queue = [v]
    seen = {v}
    hit = None
    while queue:
        cur = queue.pop(0)
        if cur in rset:
            hit = cur
            break
        for n in t.graph.neighbors(cur):
            if n not in seen:
                seen.add(n)
                prev[n] = (cur, edge(cur, n))
                queue.append(n)
    if hit is None:
        raise GraphError("subtree unreachable (tree is connected, so unreachable input)")
    path = [hit]
    cur = hit
    while cur != v:
        p, e = prev[cur]
        path.append(e)
        path.append(p)
        cur = p
    path.reverse()
    return Geodesic(tuple(path))


def precedes(t: Tree, r, v: str, w: str) -> bool:
    """The partial order: v precedes w iff the geodesic of v lies inside that of w."""
    lv = geodesic_to_subtree(t, r, v)
    lw = geodesic_to_subtree(t, r, w)
    return lw.contains(lv)


def contraction_vertex_name(sub_vertices, taken=frozenset()) -> str:
    name = "+".join(sorted(sub_vertices))
    while name in taken:
        name += "+"
    return name


def contract(t: Tree, sub) -> tuple[Tree, GraphMorphism]:
    """Contract a subtree to a fresh vertex; returns the tree and the canonical map.

    Edges inside the subtree disappear; edges adjacent to it are renamed to end
    at the fresh vertex; all other edges survive unchanged.
    """
    rset = _check_subtree(t, sub)
    fresh = contraction_vertex_name(rset, t.vertices - rset)
    vm = {v: (fresh if v in rset else v) for v in t.vertices}
    new_vertices = set(vm.values())
    new_edges = set()
    for a, b in t.edges:
        fa, fb = vm[a], vm[b]
        if fa != fb:
            new_edges.add(edge(fa, fb))
    out = Tree.make(new_vertices, new_edges)
    return out, GraphMorphism.make(t.graph, out.graph, vm)
