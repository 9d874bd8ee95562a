"""Prestable twisted graphs with A-valuations.

A :class:`TwistedGraph` is the dual graph of an A-valued twisted curve: vertices
carry a genus and a semigroup value, half-edges carry a vertex and a twist
(the order of the cyclic stabilizer), an involution pairs half-edges into edges
and its fixed points are the legs, labelled by marking labels.

Canonical forms are computed by colour refinement on vertices followed by an
exhaustive search over colour-respecting vertex orders; the key is the
lexicographically least serialization.  Legs are fixed by isomorphisms.
"""
from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Sequence

from .decoration import Decoration
from .semigroup import AValue, SemigroupSpec, total


class GraphError(ValueError):
    """A graph or ambient space violates one of its invariants."""


@dataclass(frozen=True)
class Vertex:
    g: int
    a: AValue


@dataclass(frozen=True)
class HalfEdge:
    v: int
    m: int


@dataclass(frozen=True)
class AmbientSpace:
    """The space M^{tw,triv}_{g,I,m,a}: genus, ordered markings with twists, total value."""

    g: int
    markings: tuple  # ((label, twist), ...) in the order of I
    a: AValue

    def __post_init__(self):
        object.__setattr__(self, "markings", tuple((str(l), int(m)) for l, m in self.markings))
        labels = [l for l, _ in self.markings]
        if len(set(labels)) != len(labels):
            raise GraphError(f"duplicate marking labels in {labels}")
        for l, m in self.markings:
            if m < 1:
                raise GraphError(f"marking {l!r} has twist {m}; twists must be >= 1")
        if self.g < 0:
            raise GraphError("genus must be nonnegative")

    @property
    def spec(self) -> SemigroupSpec:
        return self.a.spec

    @property
    def labels(self) -> tuple:
        return tuple(l for l, _ in self.markings)

    def twist(self, label: str) -> int:
        for l, m in self.markings:
            if l == label:
                return m
        raise KeyError(label)

    def with_marking(self, label: str, twist: int = 1) -> AmbientSpace:
        if label in self.labels:
            raise GraphError(f"marking {label!r} already present")
        return AmbientSpace(self.g, self.markings + ((label, twist),), self.a)

    def without_marking(self, label: str) -> AmbientSpace:
        if label not in self.labels:
            raise GraphError(f"marking {label!r} not in ambient")
        return AmbientSpace(self.g, tuple(p for p in self.markings if p[0] != label), self.a)

    def __str__(self):
        legs = ",".join(f"{l}:{m}" for l, m in self.markings)
        return f"(g={self.g}, I={{{legs}}}, a={self.a}, {self.spec})"


@dataclass(frozen=True)
class TwistedGraph:
    vertices: tuple
    half_edges: tuple
    iota: tuple
    legs: tuple  # ((label, half_edge), ...) sorted by label

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "half_edges", tuple(self.half_edges))
        object.__setattr__(self, "iota", tuple(self.iota))
        object.__setattr__(self, "legs", tuple(sorted((str(l), h) for l, h in self.legs)))

    @classmethod
    def build(cls, vertices: Sequence[tuple[int, AValue]], legs: dict,
              edges: Sequence[tuple[int, int, int]], leg_twists: dict | None = None) -> TwistedGraph:
        """Convenience constructor.

        ``vertices`` is a list of (genus, value); ``legs`` maps label -> vertex;
        ``edges`` is a list of (u, w, twist).  Leg half-edges come first, in label
        order, followed by two half-edges per edge.
        """
        leg_twists = leg_twists or {}
        hes, iota, leg_pairs = [], [], []
        for label in sorted(legs, key=str):
            leg_pairs.append((str(label), len(hes)))
            hes.append(HalfEdge(legs[label], leg_twists.get(label, 1)))
            iota.append(len(iota))
        for u, w, m in edges:
            h = len(hes)
            hes += [HalfEdge(u, m), HalfEdge(w, m)]
            iota += [h + 1, h]
        return cls(tuple(Vertex(g, a) for g, a in vertices), tuple(hes), tuple(iota), tuple(leg_pairs))

    @classmethod
    def trivial(cls, ambient: AmbientSpace) -> TwistedGraph:
        hes = tuple(HalfEdge(0, m) for _, m in ambient.markings)
        return cls((Vertex(ambient.g, ambient.a),), hes, tuple(range(len(hes))),
                   tuple((l, i) for i, (l, _) in enumerate(ambient.markings)))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return sum(1 for h, k in enumerate(self.iota) if h < k)

    def edges(self) -> list[tuple[int, int]]:
        return [(h, k) for h, k in enumerate(self.iota) if h < k]

    @property
    def leg_map(self) -> dict[str, int]:
        return dict(self.legs)

    def leg_label(self, h: int) -> str | None:
        for l, k in self.legs:
            if k == h:
                return l
        return None

    def half_edges_at(self, v: int) -> list[int]:
        return [h for h, he in enumerate(self.half_edges) if he.v == v]

    def is_trivial(self) -> bool:
        return self.n_vertices == 1 and self.n_edges == 0

    def __str__(self):
        vs = " ".join(f"v{i}(g={x.g},a={x.a})" for i, x in enumerate(self.vertices))
        es = " ".join(f"{self.half_edges[h].v}-{self.half_edges[k].v}[{self.half_edges[h].m}]"
                      for h, k in self.edges())
        ls = " ".join(f"{l}@{self.half_edges[h].v}" for l, h in self.legs)
        return f"<{vs} | {es} | {ls}>"


# -- validation ---------------------------------------------------------------

@dataclass
class Violation:
    code: str
    message: str
    where: str = ""

    def __str__(self):
        return f"{self.code}: {self.message}" + (f" ({self.where})" if self.where else "")


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def raise_if_bad(self):
        if self.violations:
            raise GraphError("; ".join(str(v) for v in self.violations))

    def __str__(self):
        return "ok" if self.ok else "\n".join(str(v) for v in self.violations)


def _structural_problems(graph: TwistedGraph) -> list[Violation]:
    out = []
    nv, nh = graph.n_vertices, len(graph.half_edges)
    if nv == 0:
        out.append(Violation("malformed", "graph has no vertices"))
    if len(graph.iota) != nh:
        out.append(Violation("malformed", "involution length differs from number of half-edges"))
        return out
    for h, he in enumerate(graph.half_edges):
        if not 0 <= he.v < nv:
            out.append(Violation("malformed", f"vertex index {he.v} out of range", f"half-edge {h}"))
    for h, k in enumerate(graph.iota):
        if not 0 <= k < nh:
            out.append(Violation("malformed", f"involution image {k} out of range", f"half-edge {h}"))
    for l, h in graph.legs:
        if not 0 <= h < nh:
            out.append(Violation("malformed", f"leg {l!r} points to missing half-edge {h}"))
    return out


def _connected(nv: int, adjacency: Iterable[tuple[int, int]]) -> bool:
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, w in adjacency:
        parent[find(u)] = find(w)
    return len({find(x) for x in range(nv)}) <= 1


def validate(graph: TwistedGraph, ambient: AmbientSpace) -> ValidationReport:
    problems = _structural_problems(graph)
    if problems:
        return ValidationReport(problems)
    hes, iota = graph.half_edges, graph.iota
    spec = ambient.spec

    for h, k in enumerate(iota):
        if iota[k] != h:
            problems.append(Violation("involution", "iota is not an involution", f"half-edge {h}"))
    for h, he in enumerate(hes):
        if he.m < 1:
            problems.append(Violation("twist", f"twist {he.m} is not positive", f"half-edge {h}"))
    for h, k in graph.edges():
        if iota[k] == h and hes[h].m != hes[k].m:
            problems.append(Violation("unbalanced node",
                                      f"twists {hes[h].m} and {hes[k].m} differ across the node",
                                      f"edge ({h},{k})"))

    fixed = {h for h, k in enumerate(iota) if h == k}
    leg_hes = [h for _, h in graph.legs]
    if len(set(leg_hes)) != len(leg_hes):
        problems.append(Violation("legs", "two labels share a half-edge"))
    if set(leg_hes) != fixed:
        problems.append(Violation("legs", "legs are not exactly the fixed points of iota",
                                  f"fixed={sorted(fixed)} legs={sorted(leg_hes)}"))
    labels = {l for l, _ in graph.legs}
    if labels != set(ambient.labels):
        problems.append(Violation("legs", "leg labels differ from the ambient markings",
                                  f"graph={sorted(labels)} ambient={sorted(ambient.labels)}"))
    for l, h in graph.legs:
        if l in ambient.labels and hes[h].m != ambient.twist(l):
            problems.append(Violation("twist", f"leg {l!r} has twist {hes[h].m}, "
                                               f"ambient requires {ambient.twist(l)}", f"half-edge {h}"))

    for i, vx in enumerate(graph.vertices):
        if vx.g < 0:
            problems.append(Violation("genus", "negative vertex genus", f"vertex {i}"))
        if vx.a.spec != spec:
            problems.append(Violation("semigroup", "vertex value in the wrong semigroup", f"vertex {i}"))

    edges = [(hes[h].v, hes[k].v) for h, k in graph.edges()]
    if not _connected(graph.n_vertices, edges):
        problems.append(Violation("disconnected", "the graph (V,E) is not connected"))
    else:
        h1 = len(edges) - graph.n_vertices + 1
        gsum = sum(vx.g for vx in graph.vertices) + h1
        if gsum != ambient.g:
            problems.append(Violation("genus", f"sum of vertex genera + h1 = {gsum}, ambient genus {ambient.g}"))

    valence = [0] * graph.n_vertices
    for he in hes:
        valence[he.v] += 1
    for i, vx in enumerate(graph.vertices):
        if vx.a.spec == spec and vx.a.is_zero and 2 * vx.g - 2 + valence[i] <= 0:
            problems.append(Violation("unstable vertex",
                                      f"value 0 with g={vx.g} and {valence[i]} half-edges", f"vertex {i}"))
    if all(vx.a.spec == spec for vx in graph.vertices):
        s = total((vx.a for vx in graph.vertices), spec)
        if s != ambient.a:
            problems.append(Violation("value sum", f"vertex values sum to {s}, ambient value is {ambient.a}"))
    return ValidationReport(problems)


def check_decoration(graph: TwistedGraph, deco: Decoration) -> None:
    nh, nv = len(graph.half_edges), graph.n_vertices
    for h in deco.half_edges():
        if not 0 <= h < nh:
            raise GraphError(f"decoration refers to missing half-edge {h}")
    for v in deco.vertices():
        if not 0 <= v < nv:
            raise GraphError(f"decoration refers to missing vertex {v}")


def first_betti(graph: TwistedGraph) -> int:
    problems = _structural_problems(graph)
    if problems:
        raise GraphError(str(problems[0]))
    edges = [(graph.half_edges[h].v, graph.half_edges[k].v) for h, k in graph.edges()]
    if not _connected(graph.n_vertices, edges):
        raise GraphError("first_betti: graph is disconnected")
    return len(edges) - graph.n_vertices + 1


# -- canonical forms ----------------------------------------------------------

@dataclass(frozen=True)
class CanonicalForm:
    graph: TwistedGraph
    decoration: Decoration
    key: bytes
    automorphisms: int
    vertex_order: tuple  # canonical position -> original vertex
    half_edge_map: tuple  # original half-edge -> canonical half-edge


def _vertex_signatures(graph: TwistedGraph, deco: Decoration) -> list[tuple]:
    psi = deco.psi_map
    kap: dict[int, list] = {}
    for (v, j), e in deco.kappa:
        kap.setdefault(v, []).append((j, e))
    k0 = deco.kappa0_map
    legs_at: dict[int, list] = {}
    for l, h in graph.legs:
        legs_at.setdefault(graph.half_edges[h].v, []).append((l, graph.half_edges[h].m, psi.get(h, 0)))
    return [(vx.g, vx.a.sort_key(), tuple(sorted(kap.get(i, ()))), k0.get(i, 0),
             tuple(sorted(legs_at.get(i, ()))))
            for i, vx in enumerate(graph.vertices)]


def _refine(graph: TwistedGraph, deco: Decoration, sigs: list[tuple]) -> list[int]:
    psi = deco.psi_map
    hes, iota = graph.half_edges, graph.iota
    ranks = _rank(sigs)
    while True:
        nbr: list[list] = [[] for _ in graph.vertices]
        for h, k in enumerate(iota):
            if h != k:
                nbr[hes[h].v].append((hes[h].m, psi.get(h, 0), psi.get(k, 0), ranks[hes[k].v]))
        new = _rank([(ranks[i], tuple(sorted(nbr[i]))) for i in range(len(ranks))])
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def _rank(items: list) -> list[int]:
    order = {s: i for i, s in enumerate(sorted(set(items)))}
    return [order[s] for s in items]


def _serialize(graph: TwistedGraph, deco: Decoration, sigs, order) -> tuple:
    pos = {v: i for i, v in enumerate(order)}
    psi = deco.psi_map
    hes = graph.half_edges
    edges = []
    for h, k in graph.edges():
        i, j = pos[hes[h].v], pos[hes[k].v]
        ei, ej = psi.get(h, 0), psi.get(k, 0)
        if i > j or (i == j and ei > ej):
            i, j, ei, ej = j, i, ej, ei
        edges.append((i, j, hes[h].m, ei, ej))
    return (tuple(sigs[v] for v in order), tuple(sorted(edges)))


def _orderings(ranks: list[int]):
    classes: dict[int, list[int]] = {}
    for v, r in enumerate(ranks):
        classes.setdefault(r, []).append(v)
    blocks = [classes[r] for r in sorted(classes)]
    for perms in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield tuple(v for p in perms for v in p)


def _key_bytes(ser: tuple) -> bytes:
    verts, edges = ser
    payload = {"v": [[g, list(a), [list(k) for k in kap], k0, [list(l) for l in legs]]
                     for g, a, kap, k0, legs in verts],
               "e": [list(e) for e in edges]}
    return json.dumps(payload, separators=(",", ":"), sort_keys=True).encode()


@functools.lru_cache(maxsize=200_000)
def canonical_form(graph: TwistedGraph, deco: Decoration = Decoration()) -> CanonicalForm:
    """Canonical representative, key and automorphism count of a decorated graph."""
    sigs = _vertex_signatures(graph, deco)
    ranks = _refine(graph, deco, sigs)
    best, best_order, hits = None, None, 0
    for order in _orderings(ranks):
        ser = _serialize(graph, deco, sigs, order)
        if best is None or ser < best:
            best, best_order, hits = ser, order, 1
        elif ser == best:
            hits += 1
    verts, edges = best
    aut = hits
    for _, group in itertools.groupby(edges):
        n = len(list(group))
        aut *= factorial(n)
    for i, j, _, ei, ej in edges:
        if i == j and ei == ej:
            aut *= 2

    # rebuild the graph in canonical labelling
    pos = {v: i for i, v in enumerate(best_order)}
    new_vertices = tuple(graph.vertices[v] for v in best_order)
    hes, psi = graph.half_edges, deco.psi_map
    hmap: dict[int, int] = {}
    new_hes: list[HalfEdge] = []
    new_legs = []
    for l, h in sorted(graph.legs, key=lambda p: (pos[hes[p[1]].v], p[0])):
        hmap[h] = len(new_hes)
        new_legs.append((l, len(new_hes)))
        new_hes.append(HalfEdge(pos[hes[h].v], hes[h].m))
    new_iota = list(range(len(new_hes)))
    # match original edges to the sorted edge list
    remaining = {}
    for h, k in graph.edges():
        i, j = pos[hes[h].v], pos[hes[k].v]
        ei, ej = psi.get(h, 0), psi.get(k, 0)
        if i > j or (i == j and ei > ej):
            h, k, i, j, ei, ej = k, h, j, i, ej, ei
        remaining.setdefault((i, j, hes[h].m, ei, ej), []).append((h, k))
    for e in edges:
        h, k = remaining[e].pop()
        a, b = len(new_hes), len(new_hes) + 1
        hmap[h], hmap[k] = a, b
        new_hes += [HalfEdge(e[0], e[2]), HalfEdge(e[1], e[2])]
        new_iota += [b, a]
    cgraph = TwistedGraph(new_vertices, tuple(new_hes), tuple(new_iota), tuple(new_legs))
    cdeco = deco.relabel(pos, hmap)
    return CanonicalForm(cgraph, cdeco, _key_bytes(best), aut, tuple(best_order),
                         tuple(hmap[h] for h in range(len(hes))))


def canonicalize(graph: TwistedGraph, deco: Decoration = Decoration()) -> tuple[bytes, int]:
    cf = canonical_form(graph, deco)
    return cf.key, cf.automorphisms


def relabel(graph: TwistedGraph, deco: Decoration, vperm: Sequence[int], hperm: Sequence[int]):
    """Apply a relabelling: vertex ``v`` becomes ``vperm[v]``, half-edge ``h`` becomes ``hperm[h]``."""
    nv, nh = graph.n_vertices, len(graph.half_edges)
    verts = [None] * nv
    for v in range(nv):
        verts[vperm[v]] = graph.vertices[v]
    hes = [None] * nh
    iota = [0] * nh
    for h in range(nh):
        he = graph.half_edges[h]
        hes[hperm[h]] = HalfEdge(vperm[he.v], he.m)
        iota[hperm[h]] = hperm[graph.iota[h]]
    legs = tuple((l, hperm[h]) for l, h in graph.legs)
    return (TwistedGraph(tuple(verts), tuple(hes), tuple(iota), legs),
            deco.relabel(dict(enumerate(vperm)), dict(enumerate(hperm))))


# -- local data ---------------------------------------------------------------

INTERNAL_PREFIX = "~"


def half_edge_label(graph: TwistedGraph, h: int) -> str:
    """Marking label of half-edge ``h`` in its vertex's own moduli space."""
    l = graph.leg_label(h)
    return l if l is not None else f"{INTERNAL_PREFIX}{h}"


def vertex_ambient(graph: TwistedGraph, v: int) -> AmbientSpace:
    """The ambient M_{g(v), H(v), m|H(v), a(v)} of the vertex ``v``.

    Legs keep their marking labels; half-edges of edges are labelled ``~h``.
    """
    vx = graph.vertices[v]
    return AmbientSpace(vx.g, tuple((half_edge_label(graph, h), graph.half_edges[h].m)
                                    for h in graph.half_edges_at(v)), vx.a)


# -- JSON ---------------------------------------------------------------------

def graph_to_json(graph: TwistedGraph) -> dict:
    return {"vertices": [{"g": vx.g, "a": vx.a.to_json()} for vx in graph.vertices],
            "half_edges": [{"v": he.v, "m": he.m} for he in graph.half_edges],
            "edges": [[h, k] for h, k in graph.edges()],
            "legs": {l: h for l, h in graph.legs}}


def graph_from_json(obj: dict, spec: SemigroupSpec) -> TwistedGraph:
    from .semigroup import value_from_json
    try:
        verts = tuple(Vertex(int(x["g"]), value_from_json(x["a"], spec)) for x in obj["vertices"])
        hes = tuple(HalfEdge(int(x["v"]), int(x["m"])) for x in obj["half_edges"])
        iota = list(range(len(hes)))
        for h, k in obj.get("edges", []):
            h, k = int(h), int(k)
            if not (0 <= h < len(hes) and 0 <= k < len(hes)) or h == k:
                raise GraphError(f"bad edge [{h},{k}]")
            if iota[h] != h or iota[k] != k:
                raise GraphError(f"half-edge used by two edges in [{h},{k}]")
            iota[h], iota[k] = k, h
        legs = tuple((str(l), int(h)) for l, h in obj.get("legs", {}).items())
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    return TwistedGraph(verts, hes, tuple(iota), legs)


def ambient_to_json(ambient: AmbientSpace) -> dict:
    return {"g": ambient.g, "markings": [[l, m] for l, m in ambient.markings],
            "a": ambient.a.to_json(), "semigroup": str(ambient.spec)}


def ambient_from_json(obj: dict) -> AmbientSpace:
    from .semigroup import value_from_json
    spec = SemigroupSpec.parse(obj.get("semigroup", "a0"))
    markings = obj.get("markings", [])
    if isinstance(markings, dict):
        markings = list(markings.items())
    return AmbientSpace(int(obj["g"]), tuple((str(l), int(m)) for l, m in markings),
                        value_from_json(obj["a"], spec))
