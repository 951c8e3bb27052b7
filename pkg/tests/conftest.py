
import pytest

from groupgraph import linalg
from groupgraph.graph import Graph
from groupgraph.group_graph import (
    GroupGraph,
    GroupHom,
    VectorSpace,
)


def vector_gg(vertices, edges, vdims, edims, mats=None):
    """Build a vector-carrier group-graph.

    mats maps (vertex, edge-pair) to a matrix; missing supported incidences
    with equal dims default to the identity, everything else to zero.
    """
    g = Graph.make(vertices, edges)
    mats = {} if mats is None else {
        (v, tuple(sorted(e))): m for (v, e), m in mats.items()
    }
    vobj = {v: VectorSpace(vdims[v]) for v in g.vertices}
    eobj = {e: VectorSpace(edims[tuple(sorted(e))]) for e in g.edges}
    restrictions = {}
    for v, e in g.incidences():
        key = (v, e)
        if key in mats:
            m = linalg.mat(mats[key])
        elif vobj[v].dim == eobj[e].dim:
            m = linalg.identity(vobj[v].dim)
        else:
            m = linalg.zeros(eobj[e].dim, vobj[v].dim)
        restrictions[key] = GroupHom(vobj[v], eobj[e], m, validate=False)
    return GroupGraph(g, "vector", vobj, eobj, restrictions)


def finite_gg(vertices, edges, vgroups, egroups, homs=None):
    """Build a finite-carrier group-graph; missing incidences default to the
    identity when the groups coincide, else to the trivial hom."""
    g = Graph.make(vertices, edges)
    homs = {} if homs is None else {
        (v, tuple(sorted(e))): h for (v, e), h in homs.items()
    }
    vobj = {v: vgroups[v] for v in g.vertices}
    eobj = {e: egroups[tuple(sorted(e))] for e in g.edges}
    restrictions = {}
    for v, e in g.incidences():
        key = (v, e)
        if key in homs:
            restrictions[key] = GroupHom(vobj[v], eobj[e], homs[key])
        elif vobj[v] == eobj[e]:
            restrictions[key] = GroupHom.identity(vobj[v])
        else:
            restrictions[key] = GroupHom.trivial(vobj[v], eobj[e])
    return GroupGraph(g, "finite", vobj, eobj, restrictions)


@pytest.fixture
def segment_010():
    """Segment a--b with trivial vertex spaces and a line on the edge."""
    return vector_gg(
        ["a", "b"], [("a", "b")], {"a": 0, "b": 0}, {("a", "b"): 1}
    )
