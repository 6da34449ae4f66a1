"""Order-decreasing oriented partial transformation semigroups on a chain.

chainsemi enumerates the semigroups PORD(n, r) and IORD(n, r), builds their
named generators, and checks generation, rank and maximal subsemigroups
by brute force on small chains.
"""

from .closure import SemigroupSet, is_generating, undecomposables
from .exceptions import (
    ChainsemiError,
    DomainError,
    InconsistencyError,
    ParameterError,
    RegimeError,
    ResourceCapError,
    SizeMismatchError,
)
from .families import FamilyLabel, Side, claimed_generators, family
from .settings import ChainsemiSettings, get_settings
from .transforms import ChainMap, SemigroupClass, classify, compose, restrict

__all__ = [
    "ChainMap",
    "ChainsemiError",
    "ChainsemiSettings",
    "DomainError",
    "FamilyLabel",
    "InconsistencyError",
    "ParameterError",
    "RegimeError",
    "ResourceCapError",
    "SemigroupClass",
    "SemigroupSet",
    "Side",
    "SizeMismatchError",
    "claimed_generators",
    "classify",
    "compose",
    "family",
    "get_settings",
    "is_generating",
    "restrict",
    "undecomposables",
]
