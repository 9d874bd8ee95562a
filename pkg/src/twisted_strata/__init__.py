"""Tautological classes on moduli of twisted curves with A-valuations.

Classes are finite rational combinations of decorated strata (twisted stable
graphs with psi/kappa monomials); the package implements their product and
the gluing and forgetful pushforwards with exact arithmetic.
"""
from .semigroup import A0, AValue, FreeMonoid, SemigroupError, SemigroupSpec, decompose
from .decoration import Decoration
from .graph import (AmbientSpace, GraphError, HalfEdge, TwistedGraph, Vertex, canonical_form,
                    canonicalize, validate, vertex_ambient)
from .strata import (AmbientMismatch, DecoratedStratum, TautClass, fundamental_class, kappa_class,
                     make_class, normalize, psi_class, restrict_to_unvalued)
from .calculus import (excess, forgetful_comparison, generic_pairs, product, pullback_gluing,
                       pushforward_forgetful, pushforward_gluing)
from .enumerate import EnumBounds, enumerate_graphs, enumerate_strata
from .expr import parse_class_expr

__version__ = "0.1.0"
