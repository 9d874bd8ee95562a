"""Monomials in psi and kappa classes attached to a graph.

A decoration lives on the product of vertex moduli spaces of a graph: a psi
exponent per half-edge, kappa_j exponents (j >= 1) per vertex, and an exponent
of the formal degree-zero symbol kappa_0 per vertex.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping


def _clean(items) -> tuple:
    return tuple(sorted((k, e) for k, e in items if e))


@dataclass(frozen=True)
class Decoration:
    psi: tuple = ()       # ((half_edge, exponent), ...)
    kappa: tuple = ()     # (((vertex, j), exponent), ...) with j >= 1
    kappa0: tuple = ()    # ((vertex, exponent), ...)

    def __post_init__(self):
        for h, e in self.psi:
            if e < 0:
                raise ValueError(f"negative psi exponent on half-edge {h}")
        for (v, j), e in self.kappa:
            if j < 1:
                raise ValueError(f"kappa index must be >= 1 (use kappa0), got {j} at vertex {v}")
            if e < 0:
                raise ValueError(f"negative kappa exponent at vertex {v}")
        for v, e in self.kappa0:
            if e < 0:
                raise ValueError(f"negative kappa0 exponent at vertex {v}")

    @classmethod
    def make(cls, psi: Mapping[int, int] | None = None,
             kappa: Mapping[tuple[int, int], int] | None = None,
             kappa0: Mapping[int, int] | None = None) -> Decoration:
        return cls(_clean((psi or {}).items()),
                   _clean((kappa or {}).items()),
                   _clean((kappa0 or {}).items()))

    @property
    def psi_map(self) -> dict[int, int]:
        return dict(self.psi)

    @property
    def kappa_map(self) -> dict[tuple[int, int], int]:
        return dict(self.kappa)

    @property
    def kappa0_map(self) -> dict[int, int]:
        return dict(self.kappa0)

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.psi) + sum(j * e for (_, j), e in self.kappa)

    @property
    def is_unit(self) -> bool:
        return not (self.psi or self.kappa or self.kappa0)

    def __mul__(self, other: Decoration) -> Decoration:
        psi = self.psi_map
        for h, e in other.psi:
            psi[h] = psi.get(h, 0) + e
        kappa = self.kappa_map
        for k, e in other.kappa:
            kappa[k] = kappa.get(k, 0) + e
        k0 = self.kappa0_map
        for v, e in other.kappa0:
            k0[v] = k0.get(v, 0) + e
        return Decoration.make(psi, kappa, k0)

    def at_vertex(self, v: int, half_edges: Iterable[int]) -> Decoration:
        """The factor of the decoration living on vertex ``v``."""
        hs = set(half_edges)
        return Decoration(tuple((h, e) for h, e in self.psi if h in hs),
                          tuple((k, e) for k, e in self.kappa if k[0] == v),
                          tuple((w, e) for w, e in self.kappa0 if w == v))

    def relabel(self, vmap: Mapping[int, int], hmap: Mapping[int, int]) -> Decoration:
        return Decoration.make({hmap[h]: e for h, e in self.psi},
                               {(vmap[v], j): e for (v, j), e in self.kappa},
                               {vmap[v]: e for v, e in self.kappa0})

    def vertices(self) -> set[int]:
        return {v for (v, _), _ in self.kappa} | {v for v, _ in self.kappa0}

    def half_edges(self) -> set[int]:
        return {h for h, _ in self.psi}

    def __str__(self):
        parts = [f"psi[{h}]^{e}" if e > 1 else f"psi[{h}]" for h, e in self.psi]
        parts += [f"kappa{j}[{v}]^{e}" if e > 1 else f"kappa{j}[{v}]" for (v, j), e in self.kappa]
        parts += [f"kappa0[{v}]^{e}" if e > 1 else f"kappa0[{v}]" for v, e in self.kappa0]
        return "*".join(parts) if parts else "1"


ONE = Decoration()

# A decoration polynomial: Decoration -> rational coefficient, zeros dropped.
DecoPoly = dict


def poly_add(target: dict, deco: Decoration, coeff) -> None:
    c = target.get(deco, 0) + coeff
    if c:
        target[deco] = c
    else:
        target.pop(deco, None)


def poly_mul(p: Mapping[Decoration, Fraction], q: Mapping[Decoration, Fraction]) -> dict:
    out: dict = {}
    for d1, c1 in p.items():
        for d2, c2 in q.items():
            poly_add(out, d1 * d2, c1 * c2)
    return out


def poly_pow(p: Mapping[Decoration, Fraction], n: int) -> dict:
    out = {ONE: Fraction(1)}
    for _ in range(n):
        out = poly_mul(out, p)
    return out
