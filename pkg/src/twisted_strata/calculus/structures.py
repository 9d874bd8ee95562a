"""A-structures, generic (A,B)-structures and pullbacks of decorations.

A generic (A,B)-structure is built from the half-edges of A and B directly:
legs are shared by label, some edges of A are identified with edges of B (the
common edges, each with an orientation), and the remaining edges of each graph
are contracted by the other structure.  The vertex set of the common
degeneration is then a partition of the half-edges refining the cells
(A-vertex, B-vertex).  Since every half-edge of the result is named by its
origin, two outcomes of this construction are isomorphic as triples only if
they coincide, so no deduplication pass is needed.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator

from ..decoration import ONE, Decoration, poly_add, poly_mul
from ..graph import AmbientSpace, HalfEdge, TwistedGraph, Vertex, _connected, validate
from ..semigroup import add, decompose


@dataclass(frozen=True)
class AStructure:
    source: TwistedGraph        # the degeneration Gamma
    target: TwistedGraph        # the graph A
    vertex_map: tuple           # V(Gamma) -> V(A)
    half_edge_map: tuple        # H(A) -> H(Gamma)

    def fiber(self, v: int) -> list[int]:
        return [w for w, u in enumerate(self.vertex_map) if u == v]


@dataclass(frozen=True)
class GenericPair:
    graph: TwistedGraph
    f_a: AStructure
    f_b: AStructure
    common_edges: tuple  # ((h, h'), ...) edges of Gamma coming from both A and B


def structure_problems(f: AStructure) -> list[str]:
    """Check the five A-structure conditions; returns a list of violations."""
    G, A = f.source, f.target
    vmap, hmap = f.vertex_map, f.half_edge_map
    out = []
    if len(vmap) != G.n_vertices or len(hmap) != len(A.half_edges):
        return ["structure maps have the wrong length"]
    if set(vmap) != set(range(A.n_vertices)):
        out.append("vertex map is not surjective")
    if len(set(hmap)) != len(hmap):
        out.append("half-edge map is not injective")
    for ha, hg in enumerate(hmap):
        if vmap[G.half_edges[hg].v] != A.half_edges[ha].v:
            out.append(f"half-edge {ha} of A lands over the wrong vertex")
        if G.half_edges[hg].m != A.half_edges[ha].m:
            out.append(f"twist of half-edge {ha} is not preserved")
        ia = A.iota[ha]
        if ia != ha:
            if G.iota[hg] != hmap[ia]:
                out.append(f"edge at half-edge {ha} is not preserved")
        else:
            if G.iota[hg] != hg or G.leg_label(hg) != A.leg_label(ha):
                out.append(f"leg {A.leg_label(ha)!r} is not sent to the same leg")
    image = set(hmap)
    internal = [(h, k) for h, k in G.edges() if h not in image]
    for h, k in internal:
        if k in image or vmap[G.half_edges[h].v] != vmap[G.half_edges[k].v]:
            out.append(f"contracted edge ({h},{k}) joins different fibres")
    for v in range(A.n_vertices):
        fib = f.fiber(v)
        if not fib:
            continue
        idx = {w: i for i, w in enumerate(fib)}
        sub = [(idx[G.half_edges[h].v], idx[G.half_edges[k].v]) for h, k in internal
               if G.half_edges[h].v in idx and G.half_edges[k].v in idx]
        if not _connected(len(fib), sub):
            out.append(f"fibre over vertex {v} is disconnected")
            continue
        genus = sum(G.vertices[w].g for w in fib) + len(sub) - len(fib) + 1
        if genus != A.vertices[v].g:
            out.append(f"fibre over vertex {v} has genus {genus}, expected {A.vertices[v].g}")
        val = A.vertices[v].a.spec.zero
        for w in fib:
            val = add(val, G.vertices[w].a)
        if val != A.vertices[v].a:
            out.append(f"fibre over vertex {v} has value {val}, expected {A.vertices[v].a}")
        legs = {h for w in fib for h in G.half_edges_at(w)} - {x for e in internal for x in e}
        expected = {hmap[ha] for ha in A.half_edges_at(v)}
        if legs != expected:
            out.append(f"legs of the fibre over vertex {v} are not the half-edges of A there")
    return out


def identity_structure(graph: TwistedGraph) -> AStructure:
    return AStructure(graph, graph, tuple(range(graph.n_vertices)), tuple(range(len(graph.half_edges))))


# -- pullbacks ----------------------------------------------------------------

def _multinomial_power(vertices: list[int], j: int, e: int) -> Iterator[tuple[Decoration, int]]:
    """Expand (sum_w kappa_{w,j})^e with multinomial coefficients."""
    n = len(vertices)
    for exps in _weak_compositions(e, n):
        coeff = factorial(e)
        for x in exps:
            coeff //= factorial(x)
        if j == 0:
            d = Decoration.make(kappa0={w: x for w, x in zip(vertices, exps)})
        else:
            d = Decoration.make(kappa={(w, j): x for w, x in zip(vertices, exps)})
        yield d, coeff


def _weak_compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _weak_compositions(n - first, k - 1):
            yield (first,) + rest


def pullback_gluing(f: AStructure, deco: Decoration) -> dict[Decoration, int]:
    """Pull a decoration on A back along Gamma -> A.

    psi at a half-edge of A becomes psi at its image; kappa_l at a vertex v of A
    becomes the sum of kappa_l over the vertices of the fibre over v.
    """
    poly = {Decoration.make({f.half_edge_map[h]: e for h, e in deco.psi}): 1}
    for (v, j), e in deco.kappa:
        poly = poly_mul(poly, dict(_multinomial_power(f.fiber(v), j, e)))
    for v, e in deco.kappa0:
        poly = poly_mul(poly, dict(_multinomial_power(f.fiber(v), 0, e)))
    return poly


def excess(pair: GenericPair) -> dict[Decoration, Fraction]:
    """Top Chern class of the excess bundle: prod over common edges of (-psi_h - psi_h')/m."""
    poly = {ONE: Fraction(1)}
    G = pair.graph
    for h, k in pair.common_edges:
        m = G.half_edges[h].m
        poly = poly_mul(poly, {Decoration.make({h: 1}): Fraction(-1, m),
                               Decoration.make({k: 1}): Fraction(-1, m)})
    return poly


# -- generic pairs ------------------------------------------------------------

def triple_key(pair: GenericPair) -> tuple:
    """Complete invariant of a generic structure up to isomorphism of triples."""
    G = pair.graph
    inv_a = {hg: ha for ha, hg in enumerate(pair.f_a.half_edge_map)}
    inv_b = {hg: hb for hb, hg in enumerate(pair.f_b.half_edge_map)}
    verts = []
    for w, vx in enumerate(G.vertices):
        names = tuple(sorted((inv_a.get(h, -1), inv_b.get(h, -1)) for h in G.half_edges_at(w)))
        verts.append((vx.g, vx.a.sort_key(), pair.f_a.vertex_map[w], pair.f_b.vertex_map[w], names))
    return tuple(sorted(verts))


def _matchings(A: TwistedGraph, B: TwistedGraph):
    """Partial matchings of E(A) with E(B) by equal twist, each with an orientation."""
    ea, eb = A.edges(), B.edges()

    def rec(i, used):
        if i == len(ea):
            yield ()
            return
        yield from rec(i + 1, used)
        h, k = ea[i]
        for j, (p, q) in enumerate(eb):
            if j in used or B.half_edges[p].m != A.half_edges[h].m:
                continue
            for orient in ((p, q), (q, p)):
                for rest in rec(i + 1, used | {j}):
                    yield ((h, k, orient[0], orient[1]),) + rest

    yield from rec(0, frozenset())


def _set_partitions(items: list, max_blocks: int):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, max_blocks):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        if len(part) < max_blocks:
            yield [[first]] + part


@functools.lru_cache(maxsize=20_000)
def generic_pairs(A: TwistedGraph, B: TwistedGraph, ambient: AmbientSpace) -> tuple[GenericPair, ...]:
    """All generic (A,B)-structures, one per isomorphism class of triples."""
    out = []
    for matching in _matchings(A, B):
        out.extend(_pairs_for_matching(A, B, ambient, matching))
    return tuple(out)


def _pairs_for_matching(A, B, ambient, matching):
    # items: half-edges of Gamma as (A half-edge or None, B half-edge or None)
    a_to_b = {}
    for h, k, p, q in matching:
        a_to_b[h], a_to_b[k] = p, q
    bleg = B.leg_map
    for l, ha in A.legs:
        a_to_b[ha] = bleg[l]
    items = [(ha, a_to_b.get(ha)) for ha in range(len(A.half_edges))]
    b_used = set(a_to_b.values())
    b_only_edges = [(p, q) for p, q in B.edges() if p not in b_used]
    for p, q in b_only_edges:
        items += [(None, p), (None, q)]
    index = {it: i for i, it in enumerate(items)}
    n = len(items)
    iota = [0] * n
    twist = [0] * n
    for i, (ha, hb) in enumerate(items):
        if ha is not None:
            iota[i] = index[(A.iota[ha], a_to_b.get(A.iota[ha]))]
            twist[i] = A.half_edges[ha].m
        else:
            iota[i] = index[(None, B.iota[hb])]
            twist[i] = B.half_edges[hb].m
    a_only = sorted({tuple(sorted((i, iota[i]))) for i, (ha, hb) in enumerate(items)
                     if ha is not None and hb is None})
    b_only = sorted({tuple(sorted((i, iota[i]))) for i, (ha, hb) in enumerate(items) if ha is None})
    leg_pairs = tuple((l, index[(ha, a_to_b[ha])]) for l, ha in A.legs)

    if n == 0:
        # both graphs are a single vertex without half-edges
        G = TwistedGraph((Vertex(ambient.g, ambient.a),), (), (), ())
        if validate(G, ambient).ok:
            yield GenericPair(G, AStructure(G, A, (0,), ()), AStructure(G, B, (0,), ()), ())
        return

    for assign_a in itertools.product(range(B.n_vertices), repeat=len(a_only)):
        for assign_b in itertools.product(range(A.n_vertices), repeat=len(b_only)):
            va = [None] * n
            vb = [None] * n
            for i, (ha, hb) in enumerate(items):
                if ha is not None:
                    va[i] = A.half_edges[ha].v
                if hb is not None:
                    vb[i] = B.half_edges[hb].v
            for (i, j), u in zip(a_only, assign_a):
                vb[i] = vb[j] = u
            for (i, j), u in zip(b_only, assign_b):
                va[i] = va[j] = u
            yield from _pairs_for_cells(A, B, ambient, items, iota, twist, va, vb,
                                        a_only, b_only, assign_a, assign_b, leg_pairs)


def _pairs_for_cells(A, B, ambient, items, iota, twist, va, vb, a_only, b_only,
                     assign_a, assign_b, leg_pairs):
    n = len(items)
    # every vertex of A and of B needs at least one half-edge in its fibre,
    # except a graph consisting of one bare vertex
    for u in range(A.n_vertices):
        if u not in va and A.n_vertices > 1:
            return
    for u in range(B.n_vertices):
        if u not in vb and B.n_vertices > 1:
            return
    bound_a = [1 + sum(1 for x in assign_b if x == u) for u in range(A.n_vertices)]
    bound_b = [1 + sum(1 for x in assign_a if x == u) for u in range(B.n_vertices)]
    cells: dict[tuple[int, int], list[int]] = {}
    for i in range(n):
        cells.setdefault((va[i], vb[i]), []).append(i)
    cell_keys = sorted(cells)
    options = [list(_set_partitions(cells[c], min(bound_a[c[0]], bound_b[c[1]]))) for c in cell_keys]
    for choice in itertools.product(*options):
        blocks = [sorted(b) for part in choice for b in part]
        count_a = [0] * A.n_vertices
        count_b = [0] * B.n_vertices
        for b in blocks:
            count_a[va[b[0]]] += 1
            count_b[vb[b[0]]] += 1
        if any(c > m for c, m in zip(count_a, bound_a)) or any(c > m for c, m in zip(count_b, bound_b)):
            continue
        if A.n_vertices > 1 and 0 in count_a or B.n_vertices > 1 and 0 in count_b:
            continue
        blocks.sort()
        vert_of = {}
        for w, b in enumerate(blocks):
            for i in b:
                vert_of[i] = w
        wa = [va[b[0]] for b in blocks]
        wb = [vb[b[0]] for b in blocks]
        # fibres must be connected; collect the genus left for their vertices
        free_a = _fibre_genus(A, wa, [(vert_of[i], vert_of[j]) for i, j in b_only])
        if free_a is None:
            continue
        free_b = _fibre_genus(B, wb, [(vert_of[i], vert_of[j]) for i, j in a_only])
        if free_b is None:
            continue
        hes = tuple(HalfEdge(vert_of[i], twist[i]) for i in range(n))
        for genera in _distribute_genus(wa, wb, free_a, free_b):
            for values in _distribute_values(A, B, wa, wb):
                G = TwistedGraph(tuple(Vertex(g, a) for g, a in zip(genera, values)),
                                 hes, tuple(iota), leg_pairs)
                if not validate(G, ambient).ok:
                    continue
                hmap_a = [0] * len(A.half_edges)
                hmap_b = [0] * len(B.half_edges)
                for i, (ha, hb) in enumerate(items):
                    if ha is not None:
                        hmap_a[ha] = i
                    if hb is not None:
                        hmap_b[hb] = i
                common = tuple((i, iota[i]) for i, (ha, hb) in enumerate(items)
                               if ha is not None and hb is not None and iota[i] > i)
                yield GenericPair(G, AStructure(G, A, tuple(wa), tuple(hmap_a)),
                                  AStructure(G, B, tuple(wb), tuple(hmap_b)), common)


def _fibre_genus(A, wa, contracted):
    """Genus left for the vertices of each fibre, or None if a fibre is disconnected."""
    out = []
    for u in range(A.n_vertices):
        fib = [w for w, x in enumerate(wa) if x == u]
        idx = {w: i for i, w in enumerate(fib)}
        sub = [(idx[p], idx[q]) for p, q in contracted if p in idx and q in idx]
        if not fib:
            out.append(A.vertices[u].g)
            continue
        if not _connected(len(fib), sub):
            return None
        rest = A.vertices[u].g - (len(sub) - len(fib) + 1)
        if rest < 0:
            return None
        out.append(rest)
    return out


def _distribute_genus(wa, wb, free_a, free_b):
    nw = len(wa)
    fibres = [[w for w in range(nw) if wa[w] == u] for u in range(len(free_a))]

    def rec(u, genera):
        if u == len(fibres):
            sums = [0] * len(free_b)
            for w, g in enumerate(genera):
                sums[wb[w]] += g
            if sums == list(free_b):
                yield tuple(genera)
            return
        fib = fibres[u]
        if not fib:
            yield from rec(u + 1, genera)
            return
        for comp in _weak_compositions(free_a[u], len(fib)):
            for w, g in zip(fib, comp):
                genera[w] = g
            yield from rec(u + 1, genera)

    yield from rec(0, [0] * nw)


def _distribute_values(A, B, wa, wb):
    nw = len(wa)
    fibres = [[w for w in range(nw) if wa[w] == u] for u in range(A.n_vertices)]
    spec = A.vertices[0].a.spec

    def rec(u, values):
        if u == len(fibres):
            sums = [spec.zero] * B.n_vertices
            for w, a in enumerate(values):
                sums[wb[w]] = add(sums[wb[w]], a)
            if all(s == B.vertices[x].a for x, s in enumerate(sums)):
                yield tuple(values)
            return
        fib = fibres[u]
        if not fib:
            yield from rec(u + 1, values)
            return
        for parts in decompose(A.vertices[u].a, len(fib)):
            for w, a in zip(fib, parts):
                values[w] = a
            yield from rec(u + 1, values)

    yield from rec(0, [None] * nw)
