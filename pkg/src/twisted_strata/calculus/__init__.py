"""Intersection product and pushforwards of tautological classes."""
from .structures import (AStructure, GenericPair, excess, generic_pairs, identity_structure,
                         pullback_gluing, structure_problems, triple_key)
from .product import product
from .gluing import pushforward_gluing, substitute
from .forgetful import (ForgetfulError, boundary_divisor, forgetful_comparison,
                        pushforward_forgetful)

__all__ = ["AStructure", "GenericPair", "excess", "generic_pairs", "identity_structure",
           "pullback_gluing", "structure_problems", "triple_key", "product",
           "pushforward_gluing", "substitute", "ForgetfulError", "boundary_divisor",
           "forgetful_comparison", "pushforward_forgetful"]
