from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from ..decoration import poly_mul
from ..strata import AmbientMismatch, TautClass
from .structures import excess, generic_pairs, pullback_gluing


def _term_product(amb, sa, ca, sb, cb, out: TautClass) -> None:
    for pair in generic_pairs(sa.graph, sb.graph, amb):
        poly = poly_mul(poly_mul(pullback_gluing(pair.f_a, sa.decoration),
                                 pullback_gluing(pair.f_b, sb.decoration)),
                        excess(pair))
        for deco, c in poly.items():
            out.add_term(pair.graph, deco, ca * cb * Fraction(c))


def _row(args) -> TautClass:
    amb, sa, ca, others = args
    out = TautClass(amb)
    for sb, cb in others:
        _term_product(amb, sa, ca, sb, cb, out)
    return out


def product(x: TautClass, y: TautClass, jobs: int = 1) -> TautClass:
    """Intersection product of two classes.

    For each pair of terms [A, alpha], [B, beta] this sums, over generic
    (A,B)-structures Gamma, the stratum on Gamma decorated by the pullbacks of
    alpha and beta times the excess class of the common edges.  With
    ``jobs > 1`` the rows of the term table are computed in worker processes
    and folded in a fixed order, so the result does not depend on ``jobs``.
    """
    if x.ambient != y.ambient:
        raise AmbientMismatch(f"ambient mismatch: {x.ambient} vs {y.ambient}")
    amb = x.ambient
    rows = [(amb, sa, ca, list(y)) for sa, ca in x]
    if jobs > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_row, rows))
    else:
        parts = [_row(r) for r in rows]
    out = TautClass(amb)
    for part in parts:
        out.iadd(part)
    return out
