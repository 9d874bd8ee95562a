"""Pushforward along the map forgetting a marking with trivial twist.

The map is the universal curve.  For a stratum whose forgotten point sits on a
vertex that stays stable, the pushforward is computed vertex-locally: the
decoration there is compared with the pullback of its psi/kappa part,

    psi_i   = pi^* psi_i   + m(i) D_i
    kappa_j = pi^* kappa_j + psi_p^j        (j >= 0, psi_p^0 = 1)

where D_i is the stratum with a rational value-0 bubble carrying i and the
point, so that  pi_*(pi^*(P) psi_p^l) = P kappa_{l-1}  and the difference,
made of boundary strata and monomials with fewer psi/kappa factors, is pushed
recursively.  A vertex that becomes unstable is contracted if it carries no
decoration and gives zero otherwise.
"""
from __future__ import annotations

import functools

from ..decoration import Decoration
from ..graph import (AmbientSpace, GraphError, HalfEdge, TwistedGraph, Vertex, half_edge_label,
                     validate, vertex_ambient)
from ..strata import TautClass, fundamental_class, make_class, psi_class, substitute_kappa0
from .gluing import substitute
from .product import product

MAX_DEPTH = 64


class ForgetfulError(ValueError):
    pass


def _check_point(ambient: AmbientSpace, point: str) -> None:
    if point not in ambient.labels:
        raise ForgetfulError(f"marking {point!r} is not in the ambient {ambient}")
    if ambient.twist(point) != 1:
        raise ForgetfulError(f"forgotten marking {point!r} must have twist 1, has {ambient.twist(point)}")


def _space_is_empty(ambient: AmbientSpace) -> bool:
    # with total value zero every vertex must be stable, so the trivial graph
    # being unstable means no graph at all is admissible
    return ambient.a.is_zero and 2 * ambient.g - 2 + len(ambient.markings) <= 0


def boundary_divisor(ambient: AmbientSpace, label: str, point: str) -> TautClass:
    """D_{label,point}: value-0 genus-0 bubble carrying ``label`` and ``point``.

    Its node has the twist of ``label``.  Returns the zero class when the other
    vertex would be unstable.
    """
    _check_point(ambient, point)
    spec = ambient.spec
    rest = {l: 0 for l in ambient.labels if l not in (label, point)}
    twists = dict(ambient.markings)
    G = TwistedGraph.build([(ambient.g, ambient.a), (0, spec.zero)],
                           {**rest, label: 1, point: 1},
                           [(0, 1, twists[label])], leg_twists=twists)
    if not validate(G, ambient).ok:
        return TautClass(ambient)
    return make_class(G, Decoration(), ambient)


def forgetful_comparison(ambient: AmbientSpace, generator: tuple, point: str) -> TautClass:
    """The pullback pi_p^* of a generator, as a class on ``ambient`` (which contains ``point``).

    ``generator`` is ("psi", label) or ("kappa", j).
    """
    _check_point(ambient, point)
    kind, arg = generator
    if kind == "psi":
        label = str(arg)
        if label == point or label not in ambient.labels:
            raise ForgetfulError(f"psi({label}) is not a class pulled back along forgetting {point!r}")
        return psi_class(ambient, label) - boundary_divisor(ambient, label, point).scale(ambient.twist(label))
    if kind == "kappa":
        j = int(arg)
        if j < 0:
            raise ForgetfulError("kappa index must be nonnegative")
        from ..strata import kappa_class
        return kappa_class(ambient, j) - psi_class(ambient, point, j)
    raise ForgetfulError(f"unknown generator {generator!r}")


def pushforward_forgetful(x: TautClass, point: str, kappa0: str = "formal") -> TautClass:
    _check_point(x.ambient, point)
    if kappa0 not in ("formal", "substitute"):
        raise ForgetfulError(f"kappa0 mode must be 'formal' or 'substitute', got {kappa0!r}")
    out = _push_class(x, point, 0)
    return substitute_kappa0(out) if kappa0 == "substitute" else out


def _push_class(x: TautClass, point: str, depth: int) -> TautClass:
    target = x.ambient.without_marking(point)
    out = TautClass(target)
    if _space_is_empty(target):
        return out
    for s, c in x:
        out.iadd(_push_stratum(s.graph, s.decoration, x.ambient, point, depth), c)
    return out


@functools.lru_cache(maxsize=50_000)
def _push_stratum(graph: TwistedGraph, deco: Decoration, ambient: AmbientSpace,
                  point: str, depth: int) -> TautClass:
    if depth > MAX_DEPTH:
        raise RecursionError("forgetful pushforward did not terminate")
    target = ambient.without_marking(point)
    hp = graph.leg_map[point]
    v = graph.half_edges[hp].v
    vx = graph.vertices[v]
    at_v = graph.half_edges_at(v)
    if vx.g == 0 and vx.a.is_zero and len(at_v) == 3:
        return _contract(graph, deco, target, v, hp)
    if graph.is_trivial():
        return _push_trivial(graph, deco, ambient, point, depth)

    # push the decoration at v in the vertex's own space, then glue back
    local = vertex_ambient(graph, v)
    local_triv = TwistedGraph.trivial(local)
    local_index = local_triv.leg_map
    local_deco = Decoration.make(
        {local_index[half_edge_label(graph, h)]: e for h, e in deco.psi if h in at_v},
        {(0, j): e for (u, j), e in deco.kappa if u == v},
        {0: e for u, e in deco.kappa0 if u == v})
    pushed = _push_stratum(local_triv, local_deco, local, point, depth + 1)

    # Gamma': drop the point, keep everything else
    keep = [h for h in range(len(graph.half_edges)) if h != hp]
    new_index = {h: i for i, h in enumerate(keep)}
    skeleton = TwistedGraph(graph.vertices, tuple(graph.half_edges[h] for h in keep),
                            tuple(new_index[graph.iota[h]] for h in keep),
                            tuple((l, new_index[h]) for l, h in graph.legs if l != point))
    rest = Decoration.make({new_index[h]: e for h, e in deco.psi if h not in at_v},
                           {(u, j): e for (u, j), e in deco.kappa if u != v},
                           {u: e for u, e in deco.kappa0 if u != v})
    # local labels of the pushed classes refer to half-edges of Gamma by old index
    rename = {f"~{h}": f"~{new_index[h]}" for h in at_v if graph.leg_label(h) is None}
    out = TautClass(target)
    for s, c in pushed:
        piece = TwistedGraph(s.graph.vertices, s.graph.half_edges, s.graph.iota,
                             tuple((rename.get(l, l), h) for l, h in s.graph.legs))
        g, d = substitute(skeleton, {v: (piece, s.decoration)}, rest)
        out.add_term(g, d, c)
    return out


def _contract(graph, deco, target, v, hp) -> TautClass:
    """The forgotten point sits on a value-0 rational vertex with two other half-edges."""
    out = TautClass(target)
    at_v = graph.half_edges_at(v)
    if any(deco.psi_map.get(h) for h in at_v) or any(u == v for (u, _), _ in deco.kappa):
        return out
    # kappa_0 on a stable three-pointed rational component equals 1
    h1, h2 = [h for h in at_v if h != hp]
    iota = graph.iota
    if iota[h1] == h2 or (iota[h1] == h1 and iota[h2] == h2):
        return out  # the whole curve is the contracted component
    if graph.half_edges[h1].m != graph.half_edges[h2].m:
        raise GraphError(f"cannot contract vertex {v}: twists {graph.half_edges[h1].m} and "
                         f"{graph.half_edges[h2].m} of the remaining half-edges differ")
    drop = {hp, h1, h2}
    keep = [h for h in range(len(graph.half_edges)) if h not in drop]
    vkeep = [u for u in range(graph.n_vertices) if u != v]
    vidx = {u: i for i, u in enumerate(vkeep)}
    hidx = {h: i for i, h in enumerate(keep)}
    new_iota = []
    legs = [(l, hidx[h]) for l, h in graph.legs if h not in drop]
    for h in keep:
        k = iota[h]
        if k in (h1, h2):
            other = h2 if k == h1 else h1
            if iota[other] == other:
                new_iota.append(hidx[h])
                legs.append((graph.leg_label(other), hidx[h]))
            else:
                new_iota.append(hidx[iota[other]])
        else:
            new_iota.append(hidx[k])
    G = TwistedGraph(tuple(graph.vertices[u] for u in vkeep),
                     tuple(HalfEdge(vidx[graph.half_edges[h].v], graph.half_edges[h].m) for h in keep),
                     tuple(new_iota), tuple(legs))
    d = Decoration.make({hidx[h]: e for h, e in deco.psi if h in hidx},
                        {(vidx[u], j): e for (u, j), e in deco.kappa},
                        {vidx[u]: e for u, e in deco.kappa0 if u != v})
    out.add_term(G, d, 1)
    return out


def _push_trivial(graph, deco, ambient, point, depth) -> TautClass:
    target = ambient.without_marking(point)
    hp = graph.leg_map[point]
    l = deco.psi_map.get(hp, 0)
    tgt_graph = TwistedGraph.trivial(target)
    tgt_index = tgt_graph.leg_map
    out = TautClass(target)

    # leading term  P * kappa_{l-1}
    if l >= 1:
        psi = {tgt_index[graph.leg_label(h)]: e for h, e in deco.psi if h != hp}
        kappa = dict(deco.kappa)
        k0 = dict(deco.kappa0)
        if l == 1:
            k0[0] = k0.get(0, 0) + 1
        else:
            kappa[(0, l - 1)] = kappa.get((0, l - 1), 0) + 1
        out.add_term(tgt_graph, Decoration.make(psi, kappa, k0), 1)

    # pi^*(P) * psi_p^l, expanded as a class upstairs
    pulled = psi_class(ambient, point, l) if l else fundamental_class(ambient)
    for h, e in deco.psi:
        if h != hp:
            pulled = _times_power(pulled, forgetful_comparison(ambient, ("psi", graph.leg_label(h)), point), e)
    for (_, j), e in deco.kappa:
        pulled = _times_power(pulled, forgetful_comparison(ambient, ("kappa", j), point), e)
    for _, e in deco.kappa0:
        pulled = _times_power(pulled, forgetful_comparison(ambient, ("kappa", 0), point), e)

    remainder = TautClass(ambient)
    remainder.add_term(graph, deco, 1)
    remainder = remainder - pulled
    out.iadd(_push_class_depth(remainder, point, depth + 1))
    return out


def _push_class_depth(x: TautClass, point: str, depth: int) -> TautClass:
    target = x.ambient.without_marking(point)
    out = TautClass(target)
    if _space_is_empty(target):
        return out
    for s, c in x:
        out.iadd(_push_stratum(s.graph, s.decoration, x.ambient, point, depth), c)
    return out


def _times_power(x: TautClass, y: TautClass, e: int) -> TautClass:
    for _ in range(e):
        x = product(x, y)
    return x
