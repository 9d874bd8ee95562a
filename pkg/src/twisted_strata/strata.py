"""Decorated stratum classes and their finite rational combinations."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .decoration import Decoration
from .graph import (AmbientSpace, GraphError, TwistedGraph, canonical_form, check_decoration,
                    graph_from_json, graph_to_json, validate, ambient_from_json, ambient_to_json)
from .semigroup import A0


class AmbientMismatch(ValueError):
    pass


@dataclass(frozen=True)
class DecoratedStratum:
    graph: TwistedGraph
    decoration: Decoration
    key: bytes
    automorphisms: int

    @classmethod
    def of(cls, graph: TwistedGraph, deco: Decoration = Decoration()) -> DecoratedStratum:
        cf = canonical_form(graph, deco)
        return cls(cf.graph, cf.decoration, cf.key, cf.automorphisms)

    @property
    def codim(self) -> int:
        return self.graph.n_edges + self.decoration.degree

    def __str__(self):
        return f"[{self.graph}, {self.decoration}]"


def codim(s: DecoratedStratum) -> int:
    return s.codim


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, str):
        return Fraction(c.strip())
    return Fraction(c)


class TautClass:
    """A finite Q-linear combination of decorated strata on one ambient space.

    Terms are keyed by canonical key, so isomorphic strata merge on insertion and
    zero coefficients are never stored.
    """

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: AmbientSpace, terms: dict | None = None):
        self.ambient = ambient
        self.terms: dict[bytes, tuple[DecoratedStratum, Fraction]] = dict(terms or {})

    # construction
    @classmethod
    def zero(cls, ambient: AmbientSpace) -> TautClass:
        return cls(ambient)

    def add_term(self, graph: TwistedGraph, deco: Decoration, coeff) -> None:
        """In-place accumulation of ``coeff * [graph, deco]`` (no validation)."""
        coeff = _as_fraction(coeff)
        if not coeff:
            return
        s = DecoratedStratum.of(graph, deco)
        self.add_stratum(s, coeff)

    def add_stratum(self, s: DecoratedStratum, coeff) -> None:
        old = self.terms.get(s.key)
        c = (old[1] if old else 0) + coeff
        if c:
            self.terms[s.key] = (s, Fraction(c))
        elif old:
            del self.terms[s.key]

    def iadd(self, other: TautClass, scale=1) -> TautClass:
        self._check(other)
        for s, c in other.terms.values():
            self.add_stratum(s, c * scale)
        return self

    def copy(self) -> TautClass:
        return TautClass(self.ambient, self.terms)

    # arithmetic
    def _check(self, other: TautClass):
        if not isinstance(other, TautClass):
            raise TypeError(f"expected TautClass, got {type(other).__name__}")
        if other.ambient != self.ambient:
            raise AmbientMismatch(f"ambient mismatch: {self.ambient} vs {other.ambient}")

    def __add__(self, other: TautClass) -> TautClass:
        return self.copy().iadd(other)

    def __sub__(self, other: TautClass) -> TautClass:
        return self.copy().iadd(other, -1)

    def __neg__(self) -> TautClass:
        return self.scale(-1)

    def scale(self, c) -> TautClass:
        c = _as_fraction(c)
        if not c:
            return TautClass(self.ambient)
        return TautClass(self.ambient, {k: (s, v * c) for k, (s, v) in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, TautClass):
            from .calculus import product
            return product(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(1 / _as_fraction(other))

    def __pow__(self, n: int) -> TautClass:
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = fundamental_class(self.ambient)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, TautClass):
            return NotImplemented
        return (self.ambient == other.ambient and self.terms.keys() == other.terms.keys()
                and all(self.terms[k][1] == other.terms[k][1] for k in self.terms))

    __hash__ = None

    # queries
    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[DecoratedStratum, Fraction]]:
        for k in sorted(self.terms):
            yield self.terms[k]

    def coefficient(self, graph: TwistedGraph, deco: Decoration = Decoration()) -> Fraction:
        key = canonical_form(graph, deco).key
        return self.terms[key][1] if key in self.terms else Fraction(0)

    def codims(self) -> set[int]:
        return {s.codim for s, _ in self.terms.values()}

    @property
    def codim(self) -> int:
        cs = self.codims()
        if len(cs) != 1:
            raise ValueError(f"class is not of pure codimension: {sorted(cs)}")
        return cs.pop()

    def graded(self, d: int) -> TautClass:
        return TautClass(self.ambient, {k: t for k, t in self.terms.items() if t[0].codim == d})

    def __repr__(self):
        return f"TautClass({self.ambient}, {len(self)} terms)"

    def __str__(self):
        if not self.terms:
            return "0"
        return "\n".join(f"{c} * {s}" for s, c in self)


def make_class(graph: TwistedGraph, deco: Decoration, ambient: AmbientSpace, coeff=1) -> TautClass:
    validate(graph, ambient).raise_if_bad()
    check_decoration(graph, deco)
    out = TautClass(ambient)
    out.add_term(graph, deco, coeff)
    return out


def normalize(summands: Iterable, ambient: AmbientSpace | None = None) -> TautClass:
    """Fold (graph, decoration, coeff) triples or TautClasses into one class.

    All summands must live on one ambient space.  The fold is by canonical key,
    so the result does not depend on the order of the summands.
    """
    out = None if ambient is None else TautClass(ambient)
    for item in summands:
        if isinstance(item, TautClass):
            if out is None:
                out = TautClass(item.ambient)
            out.iadd(item)
        else:
            if out is None:
                raise AmbientMismatch("normalize needs an ambient for raw summands")
            graph, deco, coeff = item
            out.add_term(graph, deco, coeff)
    if out is None:
        raise AmbientMismatch("normalize of an empty sum needs an ambient")
    return out


def fundamental_class(ambient: AmbientSpace) -> TautClass:
    return make_class(TwistedGraph.trivial(ambient), Decoration(), ambient)


def psi_class(ambient: AmbientSpace, label: str, exponent: int = 1) -> TautClass:
    g = TwistedGraph.trivial(ambient)
    h = g.leg_map[str(label)]
    return make_class(g, Decoration.make({h: exponent}), ambient)


def kappa_class(ambient: AmbientSpace, j: int, exponent: int = 1) -> TautClass:
    g = TwistedGraph.trivial(ambient)
    if j == 0:
        return make_class(g, Decoration.make(kappa0={0: exponent}), ambient)
    return make_class(g, Decoration.make(kappa={(0, j): exponent}), ambient)


def check_well_formed(x: TautClass) -> None:
    """Raise unless every term validates and is stored in canonical form."""
    for key, (s, c) in x.terms.items():
        if not c:
            raise GraphError("zero coefficient stored")
        validate(s.graph, x.ambient).raise_if_bad()
        check_decoration(s.graph, s.decoration)
        cf = canonical_form(s.graph, s.decoration)
        if cf.key != key or cf.graph != s.graph or cf.decoration != s.decoration:
            raise GraphError(f"term not in canonical form: {s}")


def restrict_to_unvalued(x: TautClass) -> TautClass:
    """Restriction to the open locus where every component has value 1.

    Strata with a vertex valued 0 are supported on the closed complement and
    restrict to zero.  The surviving terms, all of whose vertices carry value 1,
    are read as classes on the unvalued stack M_{g,I,m}.
    """
    amb = x.ambient
    if amb.spec != A0 or amb.a != A0.one:
        raise AmbientMismatch(f"restriction needs semigroup a0 with total value 1, got {amb}")
    return TautClass(amb, {k: (s, c) for k, (s, c) in x.terms.items()
                           if all(not vx.a.is_zero for vx in s.graph.vertices)})


def substitute_kappa0(x: TautClass) -> TautClass:
    """Replace each kappa_0 at a vertex by 2g(v) - 2 + #H(v)."""
    out = TautClass(x.ambient)
    for s, c in x:
        g = s.graph
        factor = Fraction(1)
        for v, e in s.decoration.kappa0:
            factor *= (2 * g.vertices[v].g - 2 + len(g.half_edges_at(v))) ** e
        d = Decoration(s.decoration.psi, s.decoration.kappa, ())
        out.add_term(g, d, c * factor)
    return out


# -- JSON ---------------------------------------------------------------------

def decoration_to_json(d: Decoration) -> dict:
    kappa: dict[str, dict[str, int]] = {}
    for (v, j), e in d.kappa:
        kappa.setdefault(str(v), {})[str(j)] = e
    return {"psi": {str(h): e for h, e in d.psi}, "kappa": kappa,
            "kappa0": {str(v): e for v, e in d.kappa0}}


def decoration_from_json(obj: dict | None) -> Decoration:
    obj = obj or {}
    psi = {int(h): int(e) for h, e in obj.get("psi", {}).items()}
    kappa, k0 = {}, {int(v): int(e) for v, e in obj.get("kappa0", {}).items()}
    for v, js in obj.get("kappa", {}).items():
        for j, e in js.items():
            if int(j) == 0:
                k0[int(v)] = k0.get(int(v), 0) + int(e)
            else:
                kappa[(int(v), int(j))] = int(e)
    return Decoration.make(psi, kappa, k0)


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def class_to_json(x: TautClass) -> dict:
    return {"ambient": ambient_to_json(x.ambient),
            "terms": [{"coeff": _frac_str(c), "graph": graph_to_json(s.graph),
                       "decoration": decoration_to_json(s.decoration)} for s, c in x]}


def class_from_json(obj: dict, ambient: AmbientSpace | None = None) -> TautClass:
    """Read a class; if ``ambient`` is given it must equal the file's ambient."""
    file_amb = ambient_from_json(obj["ambient"]) if "ambient" in obj else None
    if ambient is None:
        if file_amb is None:
            raise AmbientMismatch("class JSON carries no ambient and none was given")
        ambient = file_amb
    elif file_amb is not None and file_amb != ambient:
        raise AmbientMismatch(f"class file ambient {file_amb} differs from {ambient}")
    out = TautClass(ambient)
    for t in obj.get("terms", []):
        g = graph_from_json(t["graph"], ambient.spec)
        d = decoration_from_json(t.get("decoration"))
        validate(g, ambient).raise_if_bad()
        check_decoration(g, d)
        out.add_term(g, d, _as_fraction(t.get("coeff", "1")))
    return out
