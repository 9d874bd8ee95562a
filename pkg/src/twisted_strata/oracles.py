"""Slow reference implementations used to cross-check the fast code paths.

Nothing here is used by the calculus itself; the self-check and the test
suite compare against these.
"""
from __future__ import annotations

import functools
import itertools
from fractions import Fraction

from .decoration import Decoration, poly_mul
from .graph import AmbientSpace, TwistedGraph, canonical_form, validate
from .enumerate import degenerations
from .strata import TautClass


# -- automorphisms --------------------------------------------------------------

def automorphisms(graph: TwistedGraph, deco: Decoration = Decoration()) -> list[tuple[tuple, tuple]]:
    """Every (vertex permutation, half-edge permutation) preserving the decorated graph."""
    nv, hes, iota = graph.n_vertices, graph.half_edges, graph.iota
    psi = deco.psi_map
    kap = {v: sorted((j, e) for (u, j), e in deco.kappa if u == v) for v in range(nv)}
    k0 = deco.kappa0_map
    label = {h: l for l, h in graph.legs}
    at = [graph.half_edges_at(v) for v in range(nv)]
    out = []
    for sigma in itertools.permutations(range(nv)):
        if any(graph.vertices[v] != graph.vertices[sigma[v]] or kap[v] != kap[sigma[v]]
               or k0.get(v, 0) != k0.get(sigma[v], 0) or len(at[v]) != len(at[sigma[v]])
               for v in range(nv)):
            continue
        order = [h for v in range(nv) for h in at[v]]
        pi: dict[int, int] = {}

        def ok(h, t):
            if hes[h].m != hes[t].m or psi.get(h, 0) != psi.get(t, 0) or label.get(h) != label.get(t):
                return False
            k = iota[h]
            if k == h:
                return iota[t] == t
            if iota[t] == t:
                return False
            if k in pi and pi[k] != iota[t]:
                return False
            return True

        def rec(i, used):
            if i == len(order):
                if all(pi[iota[h]] == iota[pi[h]] for h in pi):
                    out.append((sigma, tuple(pi[h] for h in range(len(hes)))))
                return
            h = order[i]
            for t in at[sigma[hes[h].v]]:
                if t in used or not ok(h, t):
                    continue
                pi[h] = t
                rec(i + 1, used | {t})
                del pi[h]

        rec(0, frozenset())
    return out


# -- degeneration closure ---------------------------------------------------------

def graphs_by_degeneration(ambient: AmbientSpace, max_edges: int, twist_bound: int,
                           start: TwistedGraph | None = None, twists=None) -> list[TwistedGraph]:
    """Closure of ``start`` (default: the trivial graph) under degeneration, sorted by key.

    New edges get twists from ``twists`` (default 1..twist_bound).
    """
    start = start or TwistedGraph.trivial(ambient)
    if not validate(start, ambient).ok:
        return []
    twists = tuple(range(1, twist_bound + 1) if twists is None else sorted(set(twists)))
    return list(_closure(ambient, max_edges, canonical_form(start).graph, twists))


@functools.lru_cache(maxsize=4096)
def _closure(ambient, max_edges, start, twists) -> tuple:
    layer = {canonical_form(start).key: canonical_form(start).graph}
    found = dict(layer)
    while layer:
        nxt = {}
        for g in layer.values():
            if g.n_edges >= max_edges:
                continue
            for d in degenerations(g, ambient, twists):
                cf = canonical_form(d)
                if cf.key not in found:
                    found[cf.key] = nxt[cf.key] = cf.graph
        layer = nxt
    return tuple(found[k] for k in sorted(found))


# -- structures and generic pairs ----------------------------------------------------

def _is_structure(G: TwistedGraph, A: TwistedGraph, vmap: tuple, hmap: tuple) -> bool:
    if set(vmap) != set(range(A.n_vertices)):
        return False
    image = set(hmap)
    for ha, hg in enumerate(hmap):
        if vmap[G.half_edges[hg].v] != A.half_edges[ha].v:
            return False
    contracted = [(h, k) for h, k in G.edges() if h not in image and k not in image]
    if any((h in image) != (k in image) for h, k in G.edges()):
        return False
    for h, k in contracted:
        if vmap[G.half_edges[h].v] != vmap[G.half_edges[k].v]:
            return False
    for v in range(A.n_vertices):
        fib = [w for w in range(G.n_vertices) if vmap[w] == v]
        inner = [(G.half_edges[h].v, G.half_edges[k].v) for h, k in contracted
                 if vmap[G.half_edges[h].v] == v]
        # connectivity by flood fill
        seen, stack = {fib[0]}, [fib[0]]
        while stack:
            x = stack.pop()
            for a, b in inner:
                for p, q in ((a, b), (b, a)):
                    if p == x and q not in seen:
                        seen.add(q)
                        stack.append(q)
        if len(seen) != len(fib):
            return False
        if sum(G.vertices[w].g for w in fib) + len(inner) - len(fib) + 1 != A.vertices[v].g:
            return False
        val = A.vertices[v].a.spec.zero
        for w in fib:
            val = val + G.vertices[w].a
        if val != A.vertices[v].a:
            return False
        outer = {h for w in fib for h in G.half_edges_at(w)} - {x for e in contracted for x in e}
        if outer != {hmap[ha] for ha in A.half_edges_at(v)}:
            return False
    return True


def structures(G: TwistedGraph, A: TwistedGraph) -> list[tuple[tuple, tuple]]:
    """All A-structures on G as (vertex map, half-edge map), by exhaustive search."""
    label_g = {l: h for l, h in G.legs}
    ea, eg = A.edges(), G.edges()
    base = [None] * len(A.half_edges)
    for l, h in A.legs:
        base[h] = label_g[l]
    out = []
    oriented = [(h, k) for h, k in eg] + [(k, h) for h, k in eg]
    for choice in itertools.permutations(oriented, len(ea)):
        used = [x for e in choice for x in e]
        if len(set(used)) != len(used):
            continue
        hmap = list(base)
        good = True
        for (ha, ka), (hg, kg) in zip(ea, choice):
            if G.half_edges[hg].m != A.half_edges[ha].m:
                good = False
                break
            hmap[ha], hmap[ka] = hg, kg
        if not good:
            continue
        for vmap in itertools.product(range(A.n_vertices), repeat=G.n_vertices):
            if _is_structure(G, A, vmap, tuple(hmap)):
                out.append((vmap, tuple(hmap)))
    return sorted(set(out))


def _orbit_key(auts, va, ha, vb, hb) -> tuple:
    best = None
    for sigma, pi in auts:
        inv = {s: v for v, s in enumerate(sigma)}
        key = (tuple(va[inv[w]] for w in range(len(sigma))), tuple(pi[h] for h in ha),
               tuple(vb[inv[w]] for w in range(len(sigma))), tuple(pi[h] for h in hb))
        if best is None or key < best:
            best = key
    return best


def generic_pairs(A: TwistedGraph, B: TwistedGraph, ambient: AmbientSpace) -> list[tuple]:
    """Isomorphism classes of generic (A,B)-structures as (graph key, orbit key), sorted.

    Candidates are all degenerations of A whose new edges carry twists of B's
    edges, with at most #E(A) + #E(B) edges.
    """
    # edges of Gamma not coming from A come from B
    twists = sorted({B.half_edges[h].m for h, _ in B.edges()})
    cands = graphs_by_degeneration(ambient, A.n_edges + B.n_edges, 1, start=A, twists=twists)
    out = set()
    for G in cands:
        if G.n_edges < max(A.n_edges, B.n_edges):
            continue
        sa, sb = structures(G, A), structures(G, B)
        if not sa or not sb:
            continue
        auts = automorphisms(G)
        key = canonical_form(G).key
        for (va, ha), (vb, hb) in itertools.product(sa, sb):
            if set(ha) | set(hb) == set(range(len(G.half_edges))):
                out.add((key, _orbit_key(auts, va, ha, vb, hb)))
    return sorted(out)


def implementation_keys(pairs) -> list[tuple]:
    """Map generic pairs from the calculus onto the keys used by :func:`generic_pairs`."""
    out = []
    for p in pairs:
        cf = canonical_form(p.graph)
        G = cf.graph
        order = cf.vertex_order
        hm = cf.half_edge_map
        va = tuple(p.f_a.vertex_map[order[i]] for i in range(G.n_vertices))
        vb = tuple(p.f_b.vertex_map[order[i]] for i in range(G.n_vertices))
        ha = tuple(hm[h] for h in p.f_a.half_edge_map)
        hb = tuple(hm[h] for h in p.f_b.half_edge_map)
        out.append((cf.key, _orbit_key(automorphisms(G), va, ha, vb, hb)))
    return sorted(out)


# -- untwisted product ------------------------------------------------------------

def untwisted_product(x: TautClass, y: TautClass) -> TautClass:
    """The product for an ambient whose twists are all 1, with excess -psi_h - psi_h'."""
    from .calculus.structures import generic_pairs as gp, pullback_gluing
    amb = x.ambient
    if any(m != 1 for _, m in amb.markings):
        raise ValueError("untwisted product needs trivial marking twists")
    out = TautClass(amb)
    for sa, ca in x:
        for sb, cb in y:
            if any(he.m != 1 for he in sa.graph.half_edges + sb.graph.half_edges):
                raise ValueError("untwisted product needs trivial node twists")
            for pair in gp(sa.graph, sb.graph, amb):
                top = {Decoration(): Fraction(1)}
                for h, k in pair.common_edges:
                    top = poly_mul(top, {Decoration.make({h: 1}): Fraction(-1), Decoration.make({k: 1}): Fraction(-1)})
                poly = poly_mul(poly_mul(pullback_gluing(pair.f_a, sa.decoration),
                                         pullback_gluing(pair.f_b, sb.decoration)), top)
                for d, c in poly.items():
                    out.add_term(pair.graph, d, ca * cb * c)
    return out
