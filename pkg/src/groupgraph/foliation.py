"""Analysis of decorated dual trees of reduced foliations.

The input is a tree whose vertices are exceptional-divisor components
(invariant or dicritical) and whose edges are intersection points (singular,
nodal or regular), decorated with holonomy data: group order or infinite per
invariant vertex, periodic order or non-periodic per incidence, and the
transverse-symmetry dimensions (0 or 1) on red elements.

The analyzer computes cut-components, the red subgraph, the finite-type
verdict with witnesses, and the moduli dimension of the universal deformation
parameter space, the latter three ways with an exact agreement assertion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .graph import (
    Edge,
    Graph,
    GraphError,
    connected_components,
    edge,
    edge_key,
    parse_edge_key,
    validate_tree,
)
from .group_graph import GroupGraph, GroupHom, VectorSpace, is_regular
from .cohomology import h1_vector
from .theorems import VerificationError, HypothesisViolated, regular_h1, restrict, build_active_structure
from . import linalg


class FoliationError(ValueError):
    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations or []


VERTEX_KINDS = ("invariant", "dicritical")
EDGE_KINDS = ("singular", "nodal", "regular")


@dataclass
class FoliationSpec:
    graph: Graph
    vertex_kind: dict
    holonomy_finite: dict  # invariant vertex -> bool
    vertex_order: dict  # green invariant vertex -> order
    vertex_tdim: dict  # red invariant vertex -> 0 | 1
    edge_kind: dict
    edge_holonomy: dict  # (vertex, edge) -> {"periodic": bool, "order": int | None}
    edge_tdim: dict  # red edge -> 0 | 1
    cs_index: dict = field(default_factory=dict)

    # -- classification helpers ------------------------------------------

    def is_invariant(self, v: str) -> bool:
        return self.vertex_kind.get(v) == "invariant"

    def is_red_vertex(self, v: str) -> bool:
        return self.is_invariant(v) and self.holonomy_finite.get(v) is False

    def is_red_edge(self, e: Edge) -> bool:
        return any(
            not self.edge_holonomy[(v, f)]["periodic"]
            for (v, f) in self.edge_holonomy
            if f == e
        )

    def incidence(self, v: str, e: Edge) -> dict | None:
        return self.edge_holonomy.get((v, e))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        vertices = {}
        for v in self.graph.sorted_vertices():
            entry: dict = {"kind": self.vertex_kind[v]}
            if self.vertex_kind[v] == "invariant":
                if self.holonomy_finite.get(v):
                    entry["holonomy"] = {"finite": True, "order": self.vertex_order[v]}
                elif v in self.holonomy_finite:
                    entry["holonomy"] = {"finite": False, "tdim": self.vertex_tdim[v]}
            if v in self.cs_index:
                entry["cs_index"] = self.cs_index[v]
            vertices[v] = entry
        edges = {}
        for e in self.graph.sorted_edges():
            entry = {"kind": self.edge_kind[e]}
            if e in self.edge_tdim:
                entry["tdim"] = self.edge_tdim[e]
            hol = {}
            for v in e:
                inc = self.incidence(v, e)
                if inc is not None:
                    hol[v] = (
                        {"periodic": True, "order": inc["order"]}
                        if inc["periodic"]
                        else {"periodic": False}
                    )
            if hol:
                entry["holonomy"] = hol
            edges[edge_key(e)] = entry
        return {"tree": self.graph.to_json(), "vertices": vertices, "edges": edges}

    @staticmethod
    def from_json(data: dict) -> "FoliationSpec":
        try:
            graph = Graph.from_json(data["tree"])
        except (KeyError, TypeError, GraphError) as exc:
            raise FoliationError(f"bad tree: {exc}") from exc
        vertex_kind, holonomy_finite, vertex_order, vertex_tdim, cs = {}, {}, {}, {}, {}
        for v, entry in data.get("vertices", {}).items():
            kind = entry.get("kind")
            if kind not in VERTEX_KINDS:
                raise FoliationError(f"vertex {v!r} has unknown kind {kind!r}")
            vertex_kind[v] = kind
            hol = entry.get("holonomy")
            if hol is not None:
                if hol.get("finite"):
                    holonomy_finite[v] = True
                    vertex_order[v] = hol.get("order")
                else:
                    holonomy_finite[v] = False
                    vertex_tdim[v] = hol.get("tdim")
            if "cs_index" in entry:
                cs[v] = entry["cs_index"]
        edge_kind, edge_holonomy, edge_tdim = {}, {}, {}
        for key, entry in data.get("edges", {}).items():
            e = parse_edge_key(key)
            kind = entry.get("kind")
            if kind not in EDGE_KINDS:
                raise FoliationError(f"edge {key!r} has unknown kind {kind!r}")
            edge_kind[e] = kind
            if "tdim" in entry:
                edge_tdim[e] = entry["tdim"]
            for v, inc in entry.get("holonomy", {}).items():
                if inc.get("periodic"):
                    edge_holonomy[(v, e)] = {"periodic": True, "order": inc.get("order")}
                else:
                    edge_holonomy[(v, e)] = {"periodic": False, "order": None}
        return FoliationSpec(
            graph, vertex_kind, holonomy_finite, vertex_order, vertex_tdim,
            edge_kind, edge_holonomy, edge_tdim, cs,
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# validation


def validate(spec: FoliationSpec) -> list[str]:
    """All structural invariants; an empty list means the spec is valid."""
    out = []
    g = spec.graph
    if not validate_tree(g):
        out.append("dual graph is not a tree")
    for v in g.sorted_vertices():
        kind = spec.vertex_kind.get(v)
        if kind not in VERTEX_KINDS:
            out.append(f"vertex {v}: missing or unknown kind")
            continue
        if kind == "invariant":
            if v not in spec.holonomy_finite:
                out.append(f"vertex {v}: invariant vertex needs holonomy data")
            elif spec.holonomy_finite[v]:
                n = spec.vertex_order.get(v)
                if not isinstance(n, int) or n < 1:
                    out.append(f"vertex {v}: finite holonomy needs a positive order")
            else:
                t = spec.vertex_tdim.get(v)
                if t not in (0, 1):
                    out.append(f"vertex {v}: infinite holonomy needs tdim 0 or 1")
        else:
            if v in spec.holonomy_finite:
                out.append(f"vertex {v}: dicritical vertex cannot carry holonomy")
    for e in g.sorted_edges():
        key = edge_key(e)
        kind = spec.edge_kind.get(e)
        if kind not in EDGE_KINDS:
            out.append(f"edge {key}: missing or unknown kind")
            continue
        dicritical = any(spec.vertex_kind.get(v) == "dicritical" for v in e)
        if kind == "singular" and dicritical:
            out.append(f"edge {key}: dicritical-incident edge cannot be singular")
        in_cut = kind == "singular" and not dicritical
        incs = [spec.incidence(v, e) for v in e]
        if in_cut:
            if any(i is None for i in incs):
                out.append(f"edge {key}: singular edge needs holonomy at both incidences")
                continue
        else:
            if any(i is not None for i in incs):
                out.append(f"edge {key}: holonomy data outside the cut graph")
            if e in spec.edge_tdim:
                out.append(f"edge {key}: tdim outside the cut graph")
            continue
        for v in e:
            inc = spec.incidence(v, e)
            if inc["periodic"]:
                n = inc.get("order")
                if not isinstance(n, int) or n < 1:
                    out.append(f"edge {key}: periodic holonomy at {v} needs a positive order")
                elif spec.is_invariant(v) and spec.holonomy_finite.get(v) and spec.vertex_order[v] % n != 0:
                    out.append(
                        f"edge {key}: order {n} at {v} does not divide the group order "
                        f"{spec.vertex_order[v]}"
                    )
            else:
                if not spec.is_red_vertex(v):
                    out.append(
                        f"edge {key}: non-periodic holonomy at {v} forces an infinite group"
                    )
        if spec.is_red_edge(e):
            for v in e:
                if not spec.is_red_vertex(v):
                    out.append(f"edge {key}: red edge with non-red endpoint {v}")
            t = spec.edge_tdim.get(e)
            if t not in (0, 1):
                out.append(f"edge {key}: red edge needs tdim 0 or 1")
            else:
                for v in e:
                    if spec.is_red_vertex(v) and spec.vertex_tdim.get(v, 0) > t:
                        out.append(
                            f"edge {key}: tdim at {v} exceeds the edge tdim (restrictions inject)"
                        )
        else:
            if e in spec.edge_tdim:
                out.append(f"edge {key}: tdim on a green edge")
    return out


def _require_valid(spec: FoliationSpec):
    violations = validate(spec)
    if violations:
        raise FoliationError("invalid foliation spec", violations)


# ---------------------------------------------------------------------------
# cut graph and red subgraph


def cut_graph(spec: FoliationSpec) -> tuple[Graph, list[Graph]]:
    """Drop dicritical vertices, their edges, and nodal/regular edges; the
    connected pieces of what remains are the cut-components."""
    _require_valid(spec)
    vs = frozenset(v for v in spec.graph.vertices if spec.is_invariant(v))
    es = frozenset(
        e
        for e in spec.graph.edges
        if spec.edge_kind[e] == "singular" and all(v in vs for v in e)
    )
    cut = Graph(vs, es)
    comps = [
        Graph(frozenset(cvs), frozenset(ces)) for cvs, ces in connected_components(cut)
    ]
    return cut, comps


def red_subgraph(spec: FoliationSpec) -> tuple[Graph, list[Graph]]:
    """Red vertices and red edges, and the red part of each cut-component."""
    cut, comps = cut_graph(spec)
    vs = frozenset(v for v in cut.vertices if spec.is_red_vertex(v))
    es = frozenset(e for e in cut.edges if spec.is_red_edge(e))
    red = Graph(vs, es)
    per_comp = [
        Graph(
            frozenset(v for v in comp.vertices if v in vs),
            frozenset(e for e in comp.edges if e in es),
        )
        for comp in comps
    ]
    return red, per_comp


def classify_restrictions(spec: FoliationSpec) -> dict:
    """iso / not-iso per cut-graph incidence, derived from orders and tdims."""
    cut, _ = cut_graph(spec)
    out = {}
    for v, e in cut.incidences():
        red_v, red_e = spec.is_red_vertex(v), spec.is_red_edge(e)
        if red_e:
            # validation guarantees red endpoints
            out[(v, e)] = "iso" if spec.vertex_tdim[v] == spec.edge_tdim[e] else "not-iso"
        elif red_v:
            out[(v, e)] = "not-iso"  # finite-dimensional stalk inside an infinite one
        else:
            out[(v, e)] = (
                "iso"
                if spec.vertex_order[v] == spec.edge_holonomy[(v, e)]["order"]
                else "not-iso"
            )
    return out


# ---------------------------------------------------------------------------
# finite type


def _paths_from(comp: Graph, start: str):
    """All simple paths from a vertex in a tree component, as element lists."""
    out = []

    def walk(v, path, seen):
        for n in comp.neighbors(v):
            if n in seen:
                continue
            nxt = path + [edge(v, n), n]
            out.append(nxt)
            walk(n, nxt, seen | {n})

    walk(start, [start], {start})
    return out


def _classify_path(spec: FoliationSpec, classes: dict, path: list):
    """Match a path against the four forbidden geodesic shapes (or None)."""
    verts = path[0::2]
    edges = path[1::2]
    if len(verts) < 2 or not spec.is_red_vertex(verts[0]):
        return None
    if len(verts) == 2:
        v0, v1 = verts
        e0 = edges[0]
        if spec.is_red_vertex(v1):
            if not spec.is_red_edge(e0):
                return 4
            return None
        if classes[(v1, e0)] == "not-iso":
            return 2  # the red side is never an isomorphism into a green edge
        return None
    interior = verts[1:-1]
    if any(spec.is_red_vertex(v) for v in interior):
        return None
    last_v, prev_v, last_e = verts[-1], verts[-2], edges[-1]
    if spec.is_red_vertex(last_v):
        return 3
    if classes[(prev_v, last_e)] == "iso" and classes[(last_v, last_e)] == "not-iso":
        return 1
    return None


def _path_to_json(path: list) -> list:
    return [c if isinstance(c, str) else [c[0], c[1]] for c in path]


def scan_typed_geodesics(spec: FoliationSpec) -> list[dict]:
    """Exhaustive scan of every geodesic in every cut-component for the four
    forbidden shapes."""
    _, comps = cut_graph(spec)
    classes = classify_restrictions(spec)
    found = []
    for comp in comps:
        for start in comp.sorted_vertices():
            for path in _paths_from(comp, start):
                t = _classify_path(spec, classes, path)
                if t is not None:
                    found.append({"type": t, "elements": _path_to_json(path)})
    found.sort(key=lambda w: (w["type"], json.dumps(w["elements"])))
    return found


def _tree_path(comp: Graph, u: str, w: str) -> list:
    """The unique element path between two vertices of a tree component."""
    prev = {u: None}
    queue = [u]
    while queue:
        cur = queue.pop(0)
        if cur == w:
            break
        for n in comp.neighbors(cur):
            if n not in prev:
                prev[n] = cur
                queue.append(n)
    path = [w]
    cur = w
    while prev[cur] is not None:
        p = prev[cur]
        path.append(edge(p, cur))
        path.append(p)
        cur = p
    path.reverse()
    return path


def _first_edge_toward(comp: Graph, targets: frozenset, v: str) -> tuple[Edge, str]:
    """First edge and next vertex on the geodesic from v to a vertex set."""
    prev = {v: None}
    queue = [v]
    hit = None
    while queue:
        cur = queue.pop(0)
        if cur in targets:
            hit = cur
            break
        for n in comp.neighbors(cur):
            if n not in prev:
                prev[n] = cur
                queue.append(n)
    cur = hit
    while prev[prev[cur]] is not None:
        cur = prev[cur]
    return edge(v, cur), cur


def is_finite_type(spec: FoliationSpec) -> tuple[str, list[dict]]:
    """The finite-type verdict, per cut-component, with witnesses.

    A component with nonempty red part must have it connected and every
    outward holonomy group generated by the edge holonomy (equal orders); a
    component with empty red part needs a certificate vertex making the same
    condition hold along the order it induces.
    """
    _require_valid(spec)
    _, comps = cut_graph(spec)
    classes = classify_restrictions(spec)
    reports = []
    all_ok = True
    for comp in comps:
        red_vs = frozenset(v for v in comp.vertices if spec.is_red_vertex(v))
        red_es = frozenset(e for e in comp.edges if spec.is_red_edge(e))
        entry = {
            "component": comp.to_json(),
            "red": Graph(red_vs, red_es).to_json(),
            "status": "ok",
            "certificate_vertex": None,
            "witnesses": [],
        }
        if red_vs:
            red_comps = connected_components(Graph(red_vs, red_es))
            if len(red_comps) > 1:
                entry["status"] = "fail"
                entry["witnesses"].append(_disconnection_witness(spec, comp, red_comps))
            else:
                failures = []
                for v in comp.sorted_vertices():
                    if v in red_vs:
                        continue
                    e, _ = _first_edge_toward(comp, red_vs, v)
                    if spec.vertex_order[v] != spec.edge_holonomy[(v, e)]["order"]:
                        failures.append(v)
                if failures:
                    entry["status"] = "fail"
                    for v in failures:
                        entry["witnesses"].append(
                            _repulsivity_witness(spec, classes, comp, red_vs, v)
                        )
        else:
            cert = None
            for v in comp.sorted_vertices():
                if _certifies(spec, comp, v):
                    cert = v
                    break
            if cert is None:
                entry["status"] = "fail"
                entry["witnesses"].append(
                    {"type": "untyped", "reason": "no-certificate-vertex",
                     "elements": comp.sorted_vertices()}
                )
            else:
                entry["certificate_vertex"] = cert
        if entry["status"] == "fail":
            all_ok = False
        reports.append(entry)
    return ("finite" if all_ok else "not-finite"), reports


def _certifies(spec: FoliationSpec, comp: Graph, v: str) -> bool:
    """Rooted at v, every non-root vertex generates its group along the
    parent edge."""
    prev = {v: None}
    queue = [v]
    while queue:
        cur = queue.pop(0)
        for n in comp.neighbors(cur):
            if n not in prev:
                prev[n] = cur
                queue.append(n)
                e = edge(cur, n)
                if spec.vertex_order[n] != spec.edge_holonomy[(n, e)]["order"]:
                    return False
    return True


def _disconnection_witness(spec: FoliationSpec, comp: Graph, red_comps) -> dict:
    """A minimal geodesic between two red pieces: type 4 when adjacent,
    type 3 otherwise."""
    best = None
    for i, (vs1, _) in enumerate(red_comps):
        for vs2, _ in red_comps[i + 1:]:
            for u in vs1:
                for w in vs2:
                    path = _tree_path(comp, u, w)
                    if best is None or len(path) < len(best):
                        best = path
    t = 4 if len(best) == 3 else 3
    return {"type": t, "elements": _path_to_json(best)}


def _repulsivity_witness(spec, classes, comp: Graph, red_vs: frozenset, bad_vertex: str) -> dict:
    """Typed witness for a failing outward condition: the geodesic read from
    the red part toward the failing vertex, when it matches a listed shape;
    otherwise any typed geodesic found by the global scan, else untyped."""
    gpath = _tree_path(comp, bad_vertex, _nearest_red(comp, red_vs, bad_vertex))
    path = list(reversed(gpath))  # red end first
    t = _classify_path(spec, classes, path)
    if t is not None:
        return {"type": t, "elements": _path_to_json(path)}
    for w in scan_typed_geodesics(spec):
        return w
    return {"type": "untyped", "reason": "generation-failure", "elements": _path_to_json(path)}


def _nearest_red(comp: Graph, red_vs: frozenset, v: str) -> str:
    prev = {v: None}
    queue = [v]
    while queue:
        cur = queue.pop(0)
        if cur in red_vs:
            return cur
        for n in comp.neighbors(cur):
            if n not in prev:
                prev[n] = cur
                queue.append(n)
    raise FoliationError("no red vertex reachable (internal error)")


def entirely_green_check(spec: FoliationSpec) -> list[list[str]]:
    """Cut-components with no red element at all."""
    _, comps = cut_graph(spec)
    out = []
    for comp in comps:
        if not any(spec.is_red_vertex(v) for v in comp.vertices) and not any(
            spec.is_red_edge(e) for e in comp.edges
        ):
            out.append(comp.sorted_vertices())
    return out


def characterization_crosscheck(spec: FoliationSpec) -> bool:
    """Whether the finite-type verdict agrees with the exhaustive scan for
    the four forbidden geodesic shapes.  Requires no entirely-green
    cut-component."""
    greens = entirely_green_check(spec)
    if greens:
        raise HypothesisViolated("entirely green cut-components present", greens)
    verdict, _ = is_finite_type(spec)
    witnesses = scan_typed_geodesics(spec)
    if verdict == "finite":
        return not witnesses
    return bool(witnesses)


# ---------------------------------------------------------------------------
# the restricted transverse-symmetry graph and the moduli dimension


def build_tf_red(spec: FoliationSpec) -> GroupGraph:
    """The rational vector-space graph over the red subgraph: tdims as
    dimensions, identity restrictions exactly where orders make the
    restriction an isomorphism."""
    _require_valid(spec)
    red, _ = red_subgraph(spec)
    vobj = {v: VectorSpace(spec.vertex_tdim[v]) for v in red.vertices}
    eobj = {e: VectorSpace(spec.edge_tdim[e]) for e in red.edges}
    restrictions = {}
    for v, e in red.incidences():
        dv, de = vobj[v].dim, eobj[e].dim
        if dv == 1 and de == 1:
            restrictions[(v, e)] = GroupHom(vobj[v], eobj[e], linalg.identity(1), validate=False)
        else:
            restrictions[(v, e)] = GroupHom(vobj[v], eobj[e], linalg.zeros(de, dv), validate=False)
    gg = GroupGraph(red, "vector", vobj, eobj, restrictions)
    ok, violations = is_regular(gg)
    if not ok:
        raise VerificationError(f"restricted symmetry graph is not regular: {violations}")
    return gg


def _contracted_rank(tf: GroupGraph) -> int:
    """Cycle rank after collapsing the whole off-support part to one fresh
    vertex; loops and parallel edges count."""
    supp_vs = [v for v in tf.base.sorted_vertices() if tf.vobj[v].dim > 0]
    supp_es = [e for e in tf.base.sorted_edges() if tf.eobj[e].dim > 0]
    off_vs = [v for v in tf.base.sorted_vertices() if tf.vobj[v].dim == 0]
    fresh = off_vs != []
    nodes = list(supp_vs) + (["*"] if fresh else [])

    def node_of(v):
        return v if tf.vobj[v].dim > 0 else "*"

    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in supp_es:
        ra, rb = find(node_of(a)), find(node_of(b))
        if ra != rb:
            parent[ra] = rb
    comps = len({find(n) for n in nodes})
    return len(supp_es) - len(nodes) + comps


@dataclass
class ModuliReport:
    cut_components: list
    red_subgraph_json: dict
    red_components: list
    finite_type: str
    component_reports: list
    entirely_green: list
    characterization: dict
    tf_red: dict
    moduli_dim: object  # int or "infinite"
    basis_edges: list[str]
    cs_indices: dict
    active: dict | None = None

    def to_json(self) -> dict:
        return {
            "cut_components": self.cut_components,
            "red_subgraph": self.red_subgraph_json,
            "red_components": self.red_components,
            "finite_type": self.finite_type,
            "components": self.component_reports,
            "entirely_green": self.entirely_green,
            "characterization": self.characterization,
            "tf_red": self.tf_red,
            "moduli_dim": self.moduli_dim,
            "basis_edges": self.basis_edges,
            "cs_indices": self.cs_indices,
            "active": self.active,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def moduli_dimension(spec: FoliationSpec) -> ModuliReport:
    """Full analysis: verdict, and the moduli dimension computed three ways
    (active edges, cochain rank, contracted-graph cycle rank) with exact
    agreement asserted."""
    _require_valid(spec)
    _, comps = cut_graph(spec)
    red, red_per_comp = red_subgraph(spec)
    verdict, comp_reports = is_finite_type(spec)
    greens = entirely_green_check(spec)
    tf = build_tf_red(spec)

    if greens:
        characterization = {"status": "hypothesis-violated", "consistent": None}
    else:
        witnesses = scan_typed_geodesics(spec)
        consistent = (not witnesses) if verdict == "finite" else bool(witnesses)
        characterization = {"status": "ok", "consistent": consistent}

    active_json = None
    if verdict == "finite":
        st = build_active_structure(tf)
        dim_active = 0
        for comp_vs, comp_es in connected_components(red):
            comp_graph = Graph(frozenset(comp_vs), frozenset(comp_es))
            _, res = regular_h1(restrict(tf, comp_graph), crosscheck=False)
            dim_active += res.dim
        dim_rank = h1_vector(tf).dim
        dim_contracted = _contracted_rank(tf)
        if not (dim_active == dim_rank == dim_contracted == len(st.a_prime)):
            raise VerificationError(
                "moduli pipelines disagree: "
                f"active={dim_active} rank={dim_rank} contracted={dim_contracted} "
                f"basis={len(st.a_prime)}"
            )
        moduli = dim_active
        basis = [edge_key(e) for e in st.a_prime]
        active_json = st.to_json()
    else:
        moduli = "infinite"
        basis = []

    return ModuliReport(
        cut_components=[c.to_json() for c in comps],
        red_subgraph_json=red.to_json(),
        red_components=[c.to_json() for c in red_per_comp],
        finite_type=verdict,
        component_reports=comp_reports,
        entirely_green=greens,
        characterization=characterization,
        tf_red=tf.to_json(),
        moduli_dim=moduli,
        basis_edges=basis,
        cs_indices=dict(sorted(spec.cs_index.items())),
        active=active_json,
    )
