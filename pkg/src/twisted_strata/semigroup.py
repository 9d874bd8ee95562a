"""Valuation semigroups for A-valued twisted curves.

Two kinds are supported:

* ``A0`` -- the two-element semigroup {0, 1} where every sum involving 1 is 1.
* ``FreeMonoid(k)`` -- k-tuples of nonnegative integers under componentwise
  addition.

Both have an indecomposable zero and finite decomposition, which is what the
graph enumeration and the product formula rely on.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Union


class SemigroupError(ValueError):
    """Raised on malformed values or mismatched semigroups."""


@dataclass(frozen=True, order=True)
class SemigroupSpec:
    kind: str  # "A0" or "free"
    rank: int = 0

    def __post_init__(self):
        if self.kind == "A0":
            if self.rank != 0:
                raise SemigroupError("A0 takes no rank")
        elif self.kind == "free":
            if self.rank < 1:
                raise SemigroupError("free monoid rank must be positive")
        else:
            raise SemigroupError(f"unknown semigroup kind {self.kind!r}")

    @property
    def zero(self) -> AValue:
        if self.kind == "A0":
            return AValue(self, 0)
        return AValue(self, (0,) * self.rank)

    @property
    def one(self) -> AValue:
        if self.kind != "A0":
            raise SemigroupError("only A0 has a distinguished element 1")
        return AValue(self, 1)

    def value(self, payload) -> AValue:
        return AValue(self, payload)

    def elements_up_to(self, bound: int) -> list[AValue]:
        """All elements with every coordinate <= bound (A0: both elements)."""
        if self.kind == "A0":
            return [self.zero, self.one]
        return [AValue(self, t) for t in itertools.product(range(bound + 1), repeat=self.rank)]

    def __str__(self):
        return "a0" if self.kind == "A0" else f"free:{self.rank}"

    @classmethod
    def parse(cls, text: str) -> SemigroupSpec:
        text = text.strip().lower()
        if text == "a0":
            return A0
        if text.startswith("free:"):
            try:
                return cls("free", int(text[5:]))
            except ValueError:
                pass
        raise SemigroupError(f"cannot parse semigroup {text!r}; expected 'a0' or 'free:k'")


A0 = SemigroupSpec("A0")


def FreeMonoid(rank: int) -> SemigroupSpec:
    return SemigroupSpec("free", rank)


Payload = Union[int, tuple]


@dataclass(frozen=True)
class AValue:
    spec: SemigroupSpec
    payload: Payload

    def __post_init__(self):
        p = self.payload
        if self.spec.kind == "A0":
            if p not in (0, 1) or isinstance(p, bool):
                raise SemigroupError(f"A0 payload must be 0 or 1, got {p!r}")
        else:
            if isinstance(p, list):
                object.__setattr__(self, "payload", tuple(p))
                p = self.payload
            if (not isinstance(p, tuple) or len(p) != self.spec.rank
                    or any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for x in p)):
                raise SemigroupError(
                    f"free:{self.spec.rank} payload must be a {self.spec.rank}-tuple "
                    f"of nonnegative integers, got {p!r}")

    def __add__(self, other: AValue) -> AValue:
        return add(self, other)

    @property
    def is_zero(self) -> bool:
        return self == self.spec.zero

    def sort_key(self) -> tuple:
        if self.spec.kind == "A0":
            return (self.payload,)
        return self.payload

    def to_json(self):
        if self.spec.kind == "A0":
            return str(self.payload)
        return list(self.payload)

    def __str__(self):
        return json.dumps(self.to_json())

    def __repr__(self):
        return f"AValue({self.spec}, {self.payload!r})"


def add(a: AValue, b: AValue) -> AValue:
    if a.spec != b.spec:
        raise SemigroupError(f"spec mismatch: {a.spec} vs {b.spec}")
    if a.spec.kind == "A0":
        return AValue(a.spec, a.payload | b.payload)
    return AValue(a.spec, tuple(x + y for x, y in zip(a.payload, b.payload)))


def total(values, spec: SemigroupSpec) -> AValue:
    out = spec.zero
    for v in values:
        out = add(out, v)
    return out


def decompose(a: AValue, k: int) -> list[tuple[AValue, ...]]:
    """All ordered k-tuples summing to ``a``, in a deterministic order."""
    if k < 1:
        raise SemigroupError("decompose needs k >= 1")
    return list(_decompose(a, k))


def _decompose(a: AValue, k: int) -> Iterator[tuple[AValue, ...]]:
    spec = a.spec
    if k == 1:
        yield (a,)
        return
    if spec.kind == "A0":
        if a.payload == 0:
            yield (spec.zero,) * k
            return
        for bits in itertools.product((0, 1), repeat=k):
            if any(bits):
                yield tuple(AValue(spec, b) for b in bits)
        return
    # each coordinate is an independent weak composition into k parts
    per_coord = [list(_compositions(x, k)) for x in a.payload]
    for choice in itertools.product(*per_coord):
        yield tuple(AValue(spec, tuple(c[i] for c in choice)) for i in range(k))


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def value_from_json(obj, spec: SemigroupSpec) -> AValue:
    if spec.kind == "A0":
        if isinstance(obj, str):
            key = obj.strip().lower()
            if key in ("0", "zero"):
                return spec.zero
            if key in ("1", "one"):
                return spec.one
        elif isinstance(obj, int) and not isinstance(obj, bool) and obj in (0, 1):
            return AValue(spec, obj)
        raise SemigroupError(f"cannot read A0 value from {obj!r}")
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, list):
        raise SemigroupError(f"free monoid value must be a JSON array, got {obj!r}")
    return AValue(spec, tuple(obj))
