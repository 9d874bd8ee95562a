from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Sequence

from ..decoration import Decoration
from ..graph import (INTERNAL_PREFIX, AmbientSpace, GraphError, HalfEdge, TwistedGraph,
                     validate, vertex_ambient)
from ..strata import TautClass


def substitute(skeleton: TwistedGraph, pieces: Mapping[int, tuple[TwistedGraph, Decoration]],
               base: Decoration = Decoration()) -> tuple[TwistedGraph, Decoration]:
    """Replace vertices of ``skeleton`` by graphs.

    ``pieces[v]`` is a graph on the vertex ambient of ``v`` (see
    :func:`vertex_ambient`) with a decoration; its legs named ``~h`` are glued to
    the skeleton half-edge ``h``, the others are skeleton legs with the same
    label.  Vertices not in ``pieces`` are kept, together with the part of
    ``base`` living on them.
    """
    vertices, hes = [], []
    h_image: dict[int, int] = {}          # skeleton half-edge -> new half-edge
    pairs: list[tuple[int, int]] = []     # internal edges of the pieces
    psi, kappa, k0 = {}, {}, {}
    base_psi = base.psi_map
    for v in range(skeleton.n_vertices):
        if v not in pieces:
            w = len(vertices)
            vertices.append(skeleton.vertices[v])
            for h in skeleton.half_edges_at(v):
                h_image[h] = len(hes)
                hes.append(HalfEdge(w, skeleton.half_edges[h].m))
                if base_psi.get(h):
                    psi[h_image[h]] = base_psi[h]
            for (u, j), e in base.kappa:
                if u == v:
                    kappa[(w, j)] = e
            for u, e in base.kappa0:
                if u == v:
                    k0[w] = e
            continue
        piece, deco = pieces[v]
        offset_v, offset_h = len(vertices), len(hes)
        vertices.extend(piece.vertices)
        for he in piece.half_edges:
            hes.append(HalfEdge(he.v + offset_v, he.m))
        for h, k in piece.edges():
            pairs.append((h + offset_h, k + offset_h))
        legs = piece.leg_map
        for h in skeleton.half_edges_at(v):
            lbl = skeleton.leg_label(h)
            name = lbl if lbl is not None else f"{INTERNAL_PREFIX}{h}"
            if name not in legs:
                raise GraphError(f"piece at vertex {v} has no leg {name!r}")
            h_image[h] = legs[name] + offset_h
            if piece.half_edges[legs[name]].m != skeleton.half_edges[h].m:
                raise GraphError(f"twist mismatch at half-edge {h}: piece has "
                                 f"{piece.half_edges[legs[name]].m}, skeleton {skeleton.half_edges[h].m}")
        if len(legs) != len(skeleton.half_edges_at(v)):
            raise GraphError(f"piece at vertex {v} has {len(legs)} legs, vertex has "
                             f"{len(skeleton.half_edges_at(v))} half-edges")
        for h, e in deco.psi:
            psi[h + offset_h] = psi.get(h + offset_h, 0) + e
        for (u, j), e in deco.kappa:
            kappa[(u + offset_v, j)] = e
        for u, e in deco.kappa0:
            k0[u + offset_v] = e
    iota = list(range(len(hes)))
    for h, k in pairs:
        iota[h], iota[k] = k, h
    for h, k in skeleton.edges():
        iota[h_image[h]], iota[h_image[k]] = h_image[k], h_image[h]
    legs = tuple((l, h_image[h]) for l, h in skeleton.legs)
    return (TwistedGraph(tuple(vertices), tuple(hes), tuple(iota), legs),
            Decoration.make(psi, kappa, k0))


def _same_space(a: AmbientSpace, b: AmbientSpace) -> bool:
    return a.g == b.g and a.a == b.a and sorted(a.markings) == sorted(b.markings)


def pushforward_gluing(skeleton: TwistedGraph, ambient: AmbientSpace,
                       classes: Sequence[TautClass]) -> TautClass:
    """Push a product of vertex classes forward along the gluing map of ``skeleton``.

    ``classes[v]`` lives on ``vertex_ambient(skeleton, v)``.  The result carries
    the factor 1 / prod of the twists over the skeleton edges.
    """
    validate(skeleton, ambient).raise_if_bad()
    if len(classes) != skeleton.n_vertices:
        raise GraphError(f"need {skeleton.n_vertices} vertex classes, got {len(classes)}")
    for v, x in enumerate(classes):
        want = vertex_ambient(skeleton, v)
        if not _same_space(x.ambient, want):
            raise GraphError(f"class for vertex {v} lives on {x.ambient}, expected {want}")
    factor = Fraction(1)
    for h, _ in skeleton.edges():
        factor /= skeleton.half_edges[h].m
    out = TautClass(ambient)
    for combo in itertools.product(*(list(x) for x in classes)):
        coeff = factor
        pieces = {}
        for v, (s, c) in enumerate(combo):
            coeff *= c
            pieces[v] = (s.graph, s.decoration)
        g, d = substitute(skeleton, pieces)
        out.add_term(g, d, coeff)
    return out
