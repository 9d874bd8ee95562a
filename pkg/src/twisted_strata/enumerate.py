"""Bounded exhaustive generation of twisted graphs and decorated strata."""
from __future__ import annotations

import functools
import itertools
import json
import random
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .decoration import Decoration
from .graph import (AmbientSpace, GraphError, HalfEdge, TwistedGraph, Vertex, _connected,
                    canonical_form, graph_to_json, validate)
from .semigroup import decompose
from .strata import DecoratedStratum, decoration_to_json


@dataclass(frozen=True)
class EnumBounds:
    max_edges: int
    twist_bound: int
    max_decoration_degree: int = 0

    def __post_init__(self):
        if self.max_edges < 0 or self.max_decoration_degree < 0:
            raise ValueError("bounds must be nonnegative")
        if self.twist_bound < 1:
            raise ValueError("twist_bound must be positive")

    def check(self, ambient: AmbientSpace) -> None:
        top = max((m for _, m in ambient.markings), default=1)
        if top > self.twist_bound:
            raise ValueError(f"twist_bound {self.twist_bound} is below the marking twist {top}")


def _weak_compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    if k == 0:
        if n == 0:
            yield ()
        return
    for head in range(n + 1):
        for tail in _weak_compositions(n - head, k - 1):
            yield (head,) + tail


def _raw_graphs(ambient: AmbientSpace, n_vertices: int, n_edges: int,
                twists: Iterable[int], edge_ok=None) -> Iterator[TwistedGraph]:
    h1 = n_edges - n_vertices + 1
    if h1 < 0 or h1 > ambient.g:
        return
    slots = [(i, j, m) for i in range(n_vertices) for j in range(i, n_vertices) for m in twists]
    labels = ambient.labels
    tw = dict(ambient.markings)
    values = decompose(ambient.a, n_vertices)
    for edges in itertools.combinations_with_replacement(slots, n_edges):
        if edge_ok is not None and not edge_ok(tuple(sorted(m for _, _, m in edges))):
            continue
        if not _connected(n_vertices, [(u, w) for u, w, _ in edges]):
            continue
        valence = [0] * n_vertices
        for u, w, _ in edges:
            valence[u] += 1
            valence[w] += 1
        for place in itertools.product(range(n_vertices), repeat=len(labels)):
            legs = dict(zip(labels, place))
            val = list(valence)
            for v in place:
                val[v] += 1
            for genera in _weak_compositions(ambient.g - h1, n_vertices):
                for vals in values:
                    # value-0 vertices must be stable
                    if any(a.is_zero and 2 * g + val[v] <= 2 for v, (g, a) in enumerate(zip(genera, vals))):
                        continue
                    yield TwistedGraph.build(list(zip(genera, vals)), legs, edges, leg_twists=tw)


@functools.lru_cache(maxsize=256)
def _graphs(ambient: AmbientSpace, max_edges: int, twists: tuple, edge_ok=None,
            min_edges: int = 0) -> tuple[TwistedGraph, ...]:
    found: dict[bytes, TwistedGraph] = {}
    for ne in range(min_edges, max_edges + 1):
        for nv in range(1, ne + 2):
            for g in _raw_graphs(ambient, nv, ne, twists, edge_ok):
                if not validate(g, ambient).ok:
                    continue
                cf = canonical_form(g)
                found.setdefault(cf.key, cf.graph)
    return tuple(found[k] for k in sorted(found))


def enumerate_graphs(ambient: AmbientSpace, bounds: EnumBounds,
                     twists: Iterable[int] | None = None) -> list[TwistedGraph]:
    """All valid graphs up to isomorphism, sorted by canonical key.

    ``twists`` restricts the node twists to a subset of 1..twist_bound.
    """
    bounds.check(ambient)
    allowed = range(1, bounds.twist_bound + 1) if twists is None else sorted(
        t for t in set(twists) if 1 <= t <= bounds.twist_bound)
    return list(_graphs(ambient, bounds.max_edges, tuple(allowed)))


def _decorations(graph: TwistedGraph, degree: int) -> Iterator[Decoration]:
    """All psi/kappa monomials of the given degree on ``graph`` (no kappa_0)."""
    slots = [("psi", h, 1) for h in range(len(graph.half_edges))]
    slots += [("kappa", (v, j), j) for v in range(graph.n_vertices) for j in range(1, degree + 1)]

    def rec(i, left, chosen):
        if left == 0:
            psi = {k: e for kind, k, e in chosen if kind == "psi"}
            kappa = {k: e for kind, k, e in chosen if kind == "kappa"}
            yield Decoration.make(psi, kappa)
            return
        if i == len(slots):
            return
        kind, k, w = slots[i]
        for e in range(left // w, -1, -1):
            yield from rec(i + 1, left - e * w, chosen + [(kind, k, e)] if e else chosen)

    yield from rec(0, degree, [])


def enumerate_strata(ambient: AmbientSpace, bounds: EnumBounds, codim: int) -> list[DecoratedStratum]:
    """Decorated strata of the given codimension, up to decorated isomorphism."""
    if codim < 0:
        raise ValueError("codimension must be nonnegative")
    found: dict[bytes, DecoratedStratum] = {}
    for g in enumerate_graphs(ambient, EnumBounds(min(bounds.max_edges, codim), bounds.twist_bound)):
        d = codim - g.n_edges
        if d > bounds.max_decoration_degree:
            continue
        for deco in _decorations(g, d):
            s = DecoratedStratum.of(g, deco)
            found.setdefault(s.key, s)
    return [found[k] for k in sorted(found)]


def _replace_vertex(graph: TwistedGraph, v: int, parts: list[tuple[int, object]],
                    side: dict[int, int], new_edges: list[tuple[int, int, int]]) -> TwistedGraph:
    """Replace vertex v by ``parts`` (genus, value); half-edge h at v goes to part side[h]."""
    vertices = list(graph.vertices)
    vertices[v] = Vertex(*parts[0])
    index = {0: v}
    for i, p in enumerate(parts[1:], start=1):
        index[i] = len(vertices)
        vertices.append(Vertex(*p))
    hes = [HalfEdge(index[side[h]] if he.v == v else he.v, he.m) for h, he in enumerate(graph.half_edges)]
    iota = list(graph.iota)
    for a, b, m in new_edges:
        h = len(hes)
        hes += [HalfEdge(index[a], m), HalfEdge(index[b], m)]
        iota += [h + 1, h]
    return TwistedGraph(tuple(vertices), tuple(hes), tuple(iota), graph.legs)


def degenerations(graph: TwistedGraph, ambient: AmbientSpace, twists) -> list[TwistedGraph]:
    """All valid graphs with one more edge that contract onto ``graph``."""
    out = []
    for v, vx in enumerate(graph.vertices):
        at = graph.half_edges_at(v)
        for m in twists:
            if vx.g >= 1:
                out.append(_replace_vertex(graph, v, [(vx.g - 1, vx.a)], {h: 0 for h in at}, [(0, 0, m)]))
            for mask in range(2 ** len(at)):
                side = {h: (mask >> i) & 1 for i, h in enumerate(at)}
                for g1 in range(vx.g + 1):
                    for a0, a1 in decompose(vx.a, 2):
                        out.append(_replace_vertex(graph, v, [(g1, a0), (vx.g - g1, a1)], side, [(0, 1, m)]))
    return [g for g in out if validate(g, ambient).ok]


def random_graph(ambient: AmbientSpace, rng: random.Random, n_edges: int, twist_bound: int) -> TwistedGraph:
    """A valid graph with up to ``n_edges`` edges, grown by random degenerations."""
    g = TwistedGraph.trivial(ambient)
    if not validate(g, ambient).ok:
        raise GraphError(f"the trivial graph of {ambient} is not valid")
    for _ in range(n_edges):
        options = degenerations(g, ambient, range(1, twist_bound + 1))
        if not options:
            break
        g = rng.choice(options)
    return canonical_form(g).graph


def random_decoration(graph: TwistedGraph, rng: random.Random, degree: int) -> Decoration:
    return rng.choice(list(_decorations(graph, degree)))


def write_json_lines(items: Iterable, out: IO[str]) -> int:
    """Stream graphs or strata, one JSON object per line; returns the count."""
    n = 0
    for item in items:
        if isinstance(item, DecoratedStratum):
            obj = {"graph": graph_to_json(item.graph), "decoration": decoration_to_json(item.decoration),
                   "codim": item.codim, "automorphisms": item.automorphisms}
        else:
            obj = graph_to_json(item)
        out.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")
        n += 1
    return n
