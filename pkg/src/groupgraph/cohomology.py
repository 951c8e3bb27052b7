"""H0 and H1 of group-graphs.

Vector carrier: exact linear algebra on the abelian cochain complex.
Finite carrier: exhaustive cocycle enumeration and orbit partition under the
vertex-family action (the brute-force oracle).

Cocycles are identified with one value per edge through the deterministic
orientation tail = lexicographically smaller endpoint; the partner value is
forced by antisymmetry.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .graph import edge_key, incidence_key
from .group_graph import (
    BudgetExceeded,
    GroupGraph,
    GroupGraphMorphism,
    GroupGraphError,
)

DEFAULT_ENUM_BUDGET = 10**7


def _value_to_json(carrier: str, val):
    if carrier == "finite":
        return val
    return [linalg.frac_to_json(x) for x in val]


def _value_from_json(carrier: str, data):
    if carrier == "finite":
        return data
    return [linalg.frac(x) for x in data]


class Cochain0:
    """A family (g_v), one group element per vertex."""

    def __init__(self, g: GroupGraph, values: dict):
        if set(values) != set(g.base.vertices):
            raise GroupGraphError("cochain is not total over the vertices")
        self.graph = g
        self.values = dict(values)

    def to_json(self) -> dict:
        return {v: _value_to_json(self.graph.carrier, x) for v, x in sorted(self.values.items())}

    @staticmethod
    def from_json(g: GroupGraph, data: dict) -> "Cochain0":
        return Cochain0(g, {v: _value_from_json(g.carrier, x) for v, x in data.items()})


class Cocycle1:
    """An antisymmetric family (g_{v,e}) over the oriented incidences."""

    def __init__(self, g: GroupGraph, values: dict, validate: bool = True):
        self.graph = g
        self.values = dict(values)
        if validate:
            if set(self.values) != set(g.base.incidences()):
                raise GroupGraphError("cocycle is not total over the incidences")
            for e in g.base.sorted_edges():
                a, b = e
                if g.carrier == "finite":
                    grp = g.eobj[e]
                    if grp.mul(self.values[(a, e)], self.values[(b, e)]) != 0:
                        raise GroupGraphError(f"antisymmetry fails at {edge_key(e)}")
                else:
                    s = linalg.vec_add(self.values[(a, e)], self.values[(b, e)])
                    if any(x != 0 for x in s):
                        raise GroupGraphError(f"antisymmetry fails at {edge_key(e)}")

    @staticmethod
    def from_tail_values(g: GroupGraph, tail: dict) -> "Cocycle1":
        """Build a cocycle from one value per edge at the tail incidence."""
        values = {}
        for e in g.base.sorted_edges():
            a, b = e  # a < b is the tail
            x = tail[e]
            values[(a, e)] = x
            if g.carrier == "finite":
                values[(b, e)] = g.eobj[e].inv(x)
            else:
                values[(b, e)] = linalg.vec_neg(x)
        return Cocycle1(g, values, validate=False)

    @staticmethod
    def trivial(g: GroupGraph) -> "Cocycle1":
        tail = {}
        for e in g.base.sorted_edges():
            tail[e] = 0 if g.carrier == "finite" else [Fraction(0)] * g.eobj[e].dim
        return Cocycle1.from_tail_values(g, tail)

    def tail_tuple(self) -> tuple:
        """Canonical form: tail values over sorted edges (finite carrier)."""
        return tuple(self.values[(e[0], e)] for e in self.graph.base.sorted_edges())

    def tail_vector(self) -> list[Fraction]:
        """Concatenated tail values over sorted edges (vector carrier)."""
        out: list[Fraction] = []
        for e in self.graph.base.sorted_edges():
            out.extend(self.values[(e[0], e)])
        return out

    def is_trivial(self) -> bool:
        if self.graph.carrier == "finite":
            return all(x == 0 for x in self.tail_tuple())
        return all(x == 0 for x in self.tail_vector())

    def to_json(self) -> dict:
        return {
            incidence_key(v, e): _value_to_json(self.graph.carrier, x)
            for (v, e), x in sorted(self.values.items())
        }

    @staticmethod
    def from_json(g: GroupGraph, data: dict) -> "Cocycle1":
        from .graph import parse_incidence_key

        values = {}
        for key, x in data.items():
            v, e = parse_incidence_key(key)
            values[(v, e)] = _value_from_json(g.carrier, x)
        return Cocycle1(g, values)


def coboundary_action(c: Cochain0, z: Cocycle1, g: GroupGraph) -> Cocycle1:
    """Act by a vertex family: conjugate-translate each incidence value.

    The output is built per incidence and its antisymmetry is asserted.
    """
    if c.graph is not g or z.graph is not g:
        if c.graph.to_json() != g.to_json() or z.graph.to_json() != g.to_json():
            raise GroupGraphError("shape mismatch between cochain, cocycle and group-graph")
    values = {}
    for e in g.base.sorted_edges():
        for v, w in (e, (e[1], e[0])):
            rv = g.restriction(v, e).apply(c.values[v])
            rw = g.restriction(w, e).apply(c.values[w])
            if g.carrier == "finite":
                grp = g.eobj[e]
                values[(v, e)] = grp.mul(grp.mul(grp.inv(rv), z.values[(v, e)]), rw)
            else:
                values[(v, e)] = linalg.vec_add(
                    linalg.vec_sub(z.values[(v, e)], rv), rw
                )
    return Cocycle1(g, values)  # validation asserts antisymmetry on every output


@dataclass
class CohomologyResult:
    kind: str  # "h0" | "h1"
    carrier: str
    dim: int | None = None  # vector carrier
    basis: list | None = None  # vector carrier: Cocycle1 (h1) or Cochain0 (h0)
    count: int | None = None  # finite carrier h1: number of classes
    representatives: list | None = None  # finite h1: canonical orbit minima
    order: int | None = None  # finite h0: subgroup order
    elements: list | None = None  # finite h0: compatible families
    # internal cross-referencing state (not serialized)
    _graph: GroupGraph | None = field(default=None, repr=False)
    _class_index: dict | None = field(default=None, repr=False)
    _im_basis: list | None = field(default=None, repr=False)

    def size(self):
        """Uniform handle on the result size: dimension or class count."""
        return self.dim if self.carrier == "vector" else self.count

    def to_json(self) -> dict:
        out = {"kind": self.kind, "carrier": self.carrier}
        if self.dim is not None:
            out["dim"] = self.dim
        if self.basis is not None:
            out["basis"] = [b.to_json() for b in self.basis]
        if self.count is not None:
            out["count"] = self.count
        if self.representatives is not None:
            out["representatives"] = [r.to_json() for r in self.representatives]
        if self.order is not None:
            out["order"] = self.order
        if self.elements is not None:
            out["elements"] = [c.to_json() for c in self.elements]
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _vertex_blocks(g: GroupGraph):
    offs, total = {}, 0
    for v in g.base.sorted_vertices():
        offs[v] = total
        total += g.vobj[v].dim
    return offs, total


def h0(g: GroupGraph, budget: int = DEFAULT_ENUM_BUDGET) -> CohomologyResult:
    """Compatible vertex families: kernel linear algebra or exhaustive filter."""
    if g.carrier == "vector":
        offs, total = _vertex_blocks(g)
        rows = []
        for e in g.base.sorted_edges():
            a, b = e
            ra, rb = g.restriction(a, e), g.restriction(b, e)
            for i in range(g.eobj[e].dim):
                row = [Fraction(0)] * total
                for j in range(g.vobj[a].dim):
                    row[offs[a] + j] += ra.data[i][j]
                for j in range(g.vobj[b].dim):
                    row[offs[b] + j] -= rb.data[i][j]
                rows.append(row)
        basis = linalg.kernel_basis(rows, total)
        vs = g.base.sorted_vertices()
        cochains = []
        for vec in basis:
            values = {
                v: vec[offs[v]: offs[v] + g.vobj[v].dim] for v in vs
            }
            cochains.append(Cochain0(g, values))
        return CohomologyResult("h0", "vector", dim=len(basis), basis=cochains, _graph=g)

    size = 1
    for v in g.base.vertices:
        size *= g.vobj[v].order
    if size > budget:
        raise BudgetExceeded(
            f"H0 enumeration of {size} families exceeds budget {budget}",
            {"candidates": size, "budget": budget},
        )
    vs = g.base.sorted_vertices()
    found = []
    for t in itertools.product(*(range(g.vobj[v].order) for v in vs)):
        fam = dict(zip(vs, t))
        ok = all(
            g.restriction(e[0], e).apply(fam[e[0]]) == g.restriction(e[1], e).apply(fam[e[1]])
            for e in g.base.sorted_edges()
        )
        if ok:
            found.append(Cochain0(g, fam))
    return CohomologyResult("h0", "finite", order=len(found), elements=found, _graph=g)


def _coboundary_matrix(g: GroupGraph) -> tuple[list[list[Fraction]], dict, int]:
    """Matrix of the coboundary into tail coordinates of Z1 (vector carrier)."""
    voffs, vtotal = _vertex_blocks(g)
    eoffs, etotal = {}, 0
    for e in g.base.sorted_edges():
        eoffs[e] = etotal
        etotal += g.eobj[e].dim
    m = linalg.zeros(etotal, vtotal)
    for e in g.base.sorted_edges():
        a, b = e  # tail a: value rho_b(c_b) - rho_a(c_a)
        ra, rb = g.restriction(a, e), g.restriction(b, e)
        for i in range(g.eobj[e].dim):
            for j in range(g.vobj[b].dim):
                m[eoffs[e] + i][voffs[b] + j] += rb.data[i][j]
            for j in range(g.vobj[a].dim):
                m[eoffs[e] + i][voffs[a] + j] -= ra.data[i][j]
    return m, eoffs, etotal


def _tail_vector_to_cocycle(g: GroupGraph, vec, eoffs) -> Cocycle1:
    tail = {}
    for e in g.base.sorted_edges():
        tail[e] = list(vec[eoffs[e]: eoffs[e] + g.eobj[e].dim])
    return Cocycle1.from_tail_values(g, tail)


def h1_vector(g: GroupGraph) -> CohomologyResult:
    """dim H1 = dim Z1 - rank of the coboundary; basis lifted through the
    tail-coordinate identification."""
    if g.carrier != "vector":
        raise GroupGraphError("h1_vector requires the vector carrier")
    m, eoffs, etotal = _coboundary_matrix(g)
    cols = linalg.transpose(m, None) if m else []
    im_basis = linalg.row_space_basis(cols) if cols else []
    im_basis = [v for v in im_basis if any(x != 0 for x in v)]
    free = linalg.extend_to_basis(im_basis, etotal)
    basis = []
    for i in free:
        vec = [Fraction(1 if j == i else 0) for j in range(etotal)]
        basis.append(_tail_vector_to_cocycle(g, vec, eoffs))
    return CohomologyResult(
        "h1", "vector", dim=etotal - len(im_basis), basis=basis,
        _graph=g, _im_basis=im_basis,
    )


def h1_class_coordinates(result: CohomologyResult, z: Cocycle1) -> list[Fraction]:
    """Coordinates of a cocycle class in the chosen H1 basis (vector carrier)."""
    g = result._graph
    vec = z.tail_vector()
    basis_vecs = [b.tail_vector() for b in result.basis]
    span = basis_vecs + result._im_basis
    if not span:
        return []
    cols = linalg.transpose(span)
    sol = linalg.solve(cols, vec, len(span))
    if sol is None:
        raise GroupGraphError("cocycle does not lie in Z1 span (internal error)")
    return sol[: len(basis_vecs)]


def _enumerate_z1(g: GroupGraph, budget: int):
    edges = g.base.sorted_edges()
    size = 1
    for e in edges:
        size *= g.eobj[e].order
    if size > budget:
        raise BudgetExceeded(
            f"Z1 enumeration of {size} cocycles exceeds budget {budget}",
            {"candidates": size, "budget": budget},
        )
    return [t for t in itertools.product(*(range(g.eobj[e].order) for e in edges))]


def _act_tail(g: GroupGraph, fam: dict, tail: tuple) -> tuple:
    """Action of a vertex family on a tail tuple, without building objects."""
    out = []
    for idx, e in enumerate(g.base.sorted_edges()):
        a, b = e
        grp = g.eobj[e]
        ra = g.restriction(a, e).apply(fam[a])
        rb = g.restriction(b, e).apply(fam[b])
        out.append(grp.mul(grp.mul(grp.inv(ra), tail[idx]), rb))
    return tuple(out)


def h1_finite_bruteforce(g: GroupGraph, budget: int = DEFAULT_ENUM_BUDGET) -> CohomologyResult:
    """Enumerate Z1 and partition into orbits of the vertex-family action.

    Orbits are explored with single-vertex families (they generate the acting
    group); representatives are the minimal tuples in a fixed total order and
    the privileged class comes first.
    """
    if g.carrier != "finite":
        raise GroupGraphError("h1_finite_bruteforce requires the finite carrier")
    all_tails = _enumerate_z1(g, budget)
    vs = g.base.sorted_vertices()
    c0_size = 1
    for v in vs:
        c0_size *= g.vobj[v].order
    if c0_size > budget:
        raise BudgetExceeded(
            f"C0 of size {c0_size} exceeds budget {budget}",
            {"candidates": c0_size, "budget": budget},
        )
    identity_fam = {v: 0 for v in vs}
    single_moves = []
    for v in vs:
        for x in range(1, g.vobj[v].order):
            fam = dict(identity_fam)
            fam[v] = x
            single_moves.append(fam)

    seen: dict[tuple, int] = {}
    orbits: list[list[tuple]] = []
    for start in all_tails:
        if start in seen:
            continue
        cls = len(orbits)
        queue = [start]
        seen[start] = cls
        members = [start]
        while queue:
            cur = queue.pop()
            for fam in single_moves:
                nxt = _act_tail(g, fam, cur)
                if nxt not in seen:
                    seen[nxt] = cls
                    members.append(nxt)
                    queue.append(nxt)
        orbits.append(members)

    reps = [min(members) for members in orbits]
    trivial = tuple(0 for _ in g.base.sorted_edges())
    order = sorted(range(len(reps)), key=lambda i: (reps[i] != reps[seen[trivial]], reps[i]))
    reps_sorted = [reps[i] for i in order]
    renum = {old: new for new, old in enumerate(order)}
    class_index = {t: renum[c] for t, c in seen.items()}

    edges = g.base.sorted_edges()
    rep_cocycles = [
        Cocycle1.from_tail_values(g, dict(zip(edges, rep))) for rep in reps_sorted
    ]
    return CohomologyResult(
        "h1", "finite", count=len(orbits), representatives=rep_cocycles,
        _graph=g, _class_index=class_index,
    )


def h1_class_of(result: CohomologyResult, z: Cocycle1) -> int:
    if result._class_index is None:
        raise GroupGraphError("result carries no class index")
    return result._class_index[z.tail_tuple()]


def push_cocycle(m: GroupGraphMorphism, z: Cocycle1) -> Cocycle1:
    """Push a cocycle on the source through the morphism; collapsed edges get 1."""
    g2 = m.target
    values = {}
    for v, e in g2.base.incidences():
        img_e = m.over.apply_edge(e)
        if isinstance(img_e, str):
            if g2.carrier == "finite":
                values[(v, e)] = 0
            else:
                values[(v, e)] = [Fraction(0)] * g2.eobj[e].dim
        else:
            img_v = m.over.apply(v)
            values[(v, e)] = m.maps[e].apply(z.values[(img_v, img_e)])
    return Cocycle1(g2, values)


@dataclass
class H1Map:
    """The induced map on H1, with both sides' results attached."""

    morphism: GroupGraphMorphism
    source_result: CohomologyResult
    target_result: CohomologyResult
    carrier: str
    mapping: list | None = None  # finite: class index per source class
    matrix: list | None = None  # vector: target-basis coordinates, one column per source basis class

    def is_injective(self) -> bool:
        if self.carrier == "finite":
            return len(set(self.mapping)) == len(self.mapping)
        return linalg.rank(self.matrix) == (self.source_result.dim or 0)

    def is_surjective(self) -> bool:
        if self.carrier == "finite":
            return set(self.mapping) == set(range(self.target_result.count))
        return linalg.rank(self.matrix) == (self.target_result.dim or 0)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def to_json(self) -> dict:
        out = {
            "carrier": self.carrier,
            "source": self.source_result.to_json(),
            "target": self.target_result.to_json(),
            "injective": self.is_injective(),
            "surjective": self.is_surjective(),
        }
        if self.mapping is not None:
            out["mapping"] = self.mapping
        if self.matrix is not None:
            out["matrix"] = linalg.matrix_to_json(self.matrix)
        return out


def h1_map(m: GroupGraphMorphism, budget: int = DEFAULT_ENUM_BUDGET) -> H1Map:
    """Compute H1 on both sides and the induced map on classes."""
    if m.source.carrier == "finite":
        src = h1_finite_bruteforce(m.source, budget)
        tgt = h1_finite_bruteforce(m.target, budget)
        mapping = [
            h1_class_of(tgt, push_cocycle(m, rep)) for rep in src.representatives
        ]
        return H1Map(m, src, tgt, "finite", mapping=mapping)
    src = h1_vector(m.source)
    tgt = h1_vector(m.target)
    cols = [
        h1_class_coordinates(tgt, push_cocycle(m, b)) for b in src.basis
    ]
    matrix = [[cols[j][i] for j in range(len(cols))] for i in range(tgt.dim or 0)]
    return H1Map(m, src, tgt, "vector", matrix=matrix)


def h1_auto(g: GroupGraph, budget: int = DEFAULT_ENUM_BUDGET) -> CohomologyResult:
    return h1_vector(g) if g.carrier == "vector" else h1_finite_bruteforce(g, budget)
