"""Partial transformations of the chain 1 < 2 < ... < n

A `ChainMap` is stored as its image word: position ``x - 1`` holds the
image of ``x``, or 0 if ``x`` is not in the domain. Maps compose left to
right, so ``compose(a, b)`` applies ``a`` first (the right action ``x(ab)
= (xa)b``).

The predicates here decide membership of the classes the rest of the
package works with. Orientation is decided by counting cyclic descents
and ascents of the image sequence taken over the sorted domain, with the
pair (last, first) included.
"""

from __future__ import annotations

import enum
import re
from functools import total_ordering
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    Mapping,
    NamedTuple,
    Optional,
    Tuple,
)

import numpy as np
from pydantic import BaseModel, ConfigDict

from .exceptions import DomainError, InconsistencyError, SizeMismatchError

_TEXT_FORM = re.compile(r"^\s*n\s*=\s*(\d+)\s*:\s*\[([^\]]*)\]\s*$")


@total_ordering
class ChainMap:
    """An immutable partial transformation of the chain ``{1, ..., n}``."""

    __slots__ = ("_n", "_img", "_hash")

    def __init__(self, n: int, img: Iterable[int]):
        word = tuple(int(v) for v in img)
        if n < 1:
            raise DomainError(f"Chain size must be at least 1, got {n}")
        if len(word) != n:
            raise SizeMismatchError(
                f"Image word has {len(word)} entries but the chain has {n} points"
            )
        for x, v in enumerate(word, start=1):
            if v < 0 or v > n:
                raise DomainError(f"Image of {x} is {v}, which is not in [0, {n}]")
        self._n = n
        self._img = word
        self._hash = hash((n, word))

    @property
    def n(self) -> int:
        return self._n

    @property
    def img(self) -> Tuple[int, ...]:
        return self._img

    @classmethod
    def parse(cls, text: str) -> ChainMap:
        """Read the canonical text form, e.g. ``n=4:[1,0,3,2]``."""
        match = _TEXT_FORM.match(text)
        if match is None:
            raise DomainError(f"'{text}' is not of the form n=<n>:[i1,...,in]")
        n = int(match.group(1))
        body = match.group(2).strip()
        values = [int(v) for v in body.split(",")] if body else []
        return cls(n, values)

    @classmethod
    def identity(cls, n: int) -> ChainMap:
        return cls(n, range(1, n + 1))

    @classmethod
    def empty(cls, n: int) -> ChainMap:
        return cls(n, [0] * n)

    @classmethod
    def partial_identity(cls, n: int, points: Iterable[int]) -> ChainMap:
        """The identity restricted to ``points`` (``1_Y``)."""
        return restrict(cls.identity(n), points)

    @classmethod
    def from_pairs(cls, n: int, pairs: Mapping[int, int]) -> ChainMap:
        word = [0] * n
        for x, v in pairs.items():
            _check_point(n, x)
            word[x - 1] = v
        return cls(n, word)

    def __call__(self, x: int) -> int:
        """The image of ``x``, or 0 if ``x`` is outside the domain."""
        _check_point(self._n, x)
        return self._img[x - 1]

    @property
    def dom(self) -> Tuple[int, ...]:
        return tuple(x for x, v in enumerate(self._img, start=1) if v)

    @property
    def im(self) -> FrozenSet[int]:
        return frozenset(v for v in self._img if v)

    @property
    def rank(self) -> int:
        """The size of the image."""
        return len(self.im)

    def values(self) -> Tuple[int, ...]:
        """The image sequence over the sorted domain."""
        return tuple(v for v in self._img if v)

    def preimage(self, value: int) -> Tuple[int, ...]:
        return tuple(x for x, v in enumerate(self._img, start=1) if v == value and v)

    def items(self) -> Iterator[Tuple[int, int]]:
        return ((x, v) for x, v in enumerate(self._img, start=1) if v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        return self._n == other._n and self._img == other._img

    def __lt__(self, other: ChainMap) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self._n, self._img) < (other._n, other._img)

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return f"n={self._n}:[{','.join(str(v) for v in self._img)}]"

    def __repr__(self) -> str:
        return f"ChainMap('{self}')"

    def __reduce__(self):
        return (ChainMap, (self._n, self._img))


def _check_point(n: int, x: int) -> None:
    if x < 1 or x > n:
        raise DomainError(f"Point {x} is not on the chain 1..{n}")


def compose(a: ChainMap, b: ChainMap) -> ChainMap:
    """Apply ``a`` then ``b``."""
    if a.n != b.n:
        raise SizeMismatchError(f"Cannot compose maps on chains {a.n} and {b.n}")
    bimg = b.img
    return ChainMap(a.n, (bimg[v - 1] if v else 0 for v in a.img))


def restrict(a: ChainMap, points: Iterable[int]) -> ChainMap:
    """The restriction of ``a`` to ``points`` (intersected with its domain)."""
    keep = set(points)
    for x in keep:
        _check_point(a.n, x)
    return ChainMap(a.n, (v if x in keep else 0 for x, v in enumerate(a.img, 1)))


class SemigroupClass(str, enum.Enum):
    """Classes of order-decreasing partial maps, by their usual names."""

    PD = "PD"
    PC = "PC"
    PMD = "PMD"
    POPD = "POPD"
    PORD = "PORD"
    IC = "IC"
    IOPD = "IOPD"
    IORD = "IORD"
    PORD_STAR = "PORD*"
    PRD_STAR = "PRD*"
    IORD_STAR = "IORD*"
    POPD_STAR = "POPD*"
    PMD_STAR = "PMD*"


# Each predicate takes anything carrying the profile flags as attributes,
# either plain booleans or numpy boolean arrays.
def _monotone(f: Any) -> Any:
    return np.logical_or(f.order_preserving, f.order_reversing)


def _oriented(f: Any) -> Any:
    return np.logical_or(f.orientation_preserving, f.orientation_reversing)


def _pc(f: Any) -> Any:
    return np.logical_and(f.order_decreasing, f.order_preserving)


def _popd(f: Any) -> Any:
    return np.logical_and(f.order_decreasing, f.orientation_preserving)


def _pord(f: Any) -> Any:
    return np.logical_and(f.order_decreasing, _oriented(f))


def _pord_star(f: Any) -> Any:
    return np.logical_and(_pord(f), np.logical_not(f.orientation_preserving))


CLASS_PREDICATES: Dict[SemigroupClass, Callable[[Any], Any]] = {
    SemigroupClass.PD: lambda f: np.asarray(f.order_decreasing),
    SemigroupClass.PC: _pc,
    SemigroupClass.PMD: lambda f: np.logical_and(f.order_decreasing, _monotone(f)),
    SemigroupClass.POPD: _popd,
    SemigroupClass.PORD: _pord,
    SemigroupClass.IC: lambda f: np.logical_and(_pc(f), f.injective),
    SemigroupClass.IOPD: lambda f: np.logical_and(_popd(f), f.injective),
    SemigroupClass.IORD: lambda f: np.logical_and(_pord(f), f.injective),
    SemigroupClass.PORD_STAR: _pord_star,
    SemigroupClass.PRD_STAR: lambda f: np.logical_and(
        _pord_star(f), np.logical_not(_monotone(f))
    ),
    SemigroupClass.IORD_STAR: lambda f: np.logical_and(_pord_star(f), f.injective),
    SemigroupClass.POPD_STAR: lambda f: np.logical_and(
        _popd(f), np.logical_not(f.order_preserving)
    ),
    SemigroupClass.PMD_STAR: lambda f: np.logical_and(
        np.logical_and(f.order_decreasing, _monotone(f)),
        np.logical_not(f.order_preserving),
    ),
}


class ClassProfile(BaseModel):
    """The predicate results that place a map in the classes above."""

    model_config = ConfigDict(frozen=True)

    order_preserving: bool
    order_reversing: bool
    orientation_preserving: bool
    orientation_reversing: bool
    order_decreasing: bool
    injective: bool
    idempotent: bool
    image_size: int

    @property
    def monotone(self) -> bool:
        return self.order_preserving or self.order_reversing

    @property
    def oriented(self) -> bool:
        return self.orientation_preserving or self.orientation_reversing

    def member_of(self, label: SemigroupClass) -> bool:
        return bool(CLASS_PREDICATES[SemigroupClass(label)](self))


class SequenceCounts(NamedTuple):
    descents: int
    ascents: int
    cyclic_descents: int
    cyclic_ascents: int


def sequence_counts(values: Tuple[int, ...]) -> SequenceCounts:
    """Count strict descents and ascents, then add the wraparound pair."""
    pairs = list(zip(values, values[1:]))
    descents = sum(1 for u, v in pairs if v < u)
    ascents = sum(1 for u, v in pairs if v > u)
    wrap_descent = len(values) >= 2 and values[0] < values[-1]
    wrap_ascent = len(values) >= 2 and values[0] > values[-1]
    return SequenceCounts(
        descents, ascents, descents + wrap_descent, ascents + wrap_ascent
    )


def classify(a: ChainMap) -> ClassProfile:
    values = a.values()
    counts = sequence_counts(values)
    image_size = len(set(values))
    return ClassProfile(
        order_preserving=counts.descents == 0,
        order_reversing=counts.ascents == 0,
        orientation_preserving=counts.cyclic_descents <= 1,
        orientation_reversing=counts.cyclic_ascents <= 1,
        order_decreasing=all(v <= x for x, v in a.items()),
        injective=image_size == len(values),
        idempotent=compose(a, a) == a,
        image_size=image_size,
    )


def member_of(a: ChainMap, label: SemigroupClass) -> bool:
    return classify(a).member_of(label)


class EndpointOrder(NamedTuple):
    order_preserving: Optional[bool]
    order_reversing: Optional[bool]


def endpoint_order(a: ChainMap) -> EndpointOrder:
    """Monotonicity of an oriented map, read off its two endpoint values.

    A non-constant orientation-preserving map is order-preserving exactly
    when (min dom)a < (max dom)a, and a non-constant orientation-reversing
    map is order-reversing exactly when (max dom)a < (min dom)a. Entries are
    None where the test does not apply.
    """
    profile = classify(a)
    if profile.image_size < 2:
        return EndpointOrder(None, None)
    values = a.values()
    first, last = values[0], values[-1]
    return EndpointOrder(
        first < last if profile.orientation_preserving else None,
        last < first if profile.orientation_reversing else None,
    )


class FixKernel(NamedTuple):
    fix: FrozenSet[int]
    kernel: Tuple[Tuple[int, ...], ...]


def fix_and_kernel(a: ChainMap) -> FixKernel:
    """The fixed points of ``a`` and its kernel, blocks ordered by least point.

    For a monotone map the blocks are intervals of the domain, so this
    order is the convex, ordered form of the partition.
    """
    fix = frozenset(x for x, v in a.items() if x == v)
    blocks: Dict[int, list] = {}
    for x, v in a.items():
        blocks.setdefault(v, []).append(x)
    kernel = tuple(sorted((tuple(b) for b in blocks.values()), key=lambda b: b[0]))
    return FixKernel(fix, kernel)


def opd(a: ChainMap) -> int:
    """The largest m such that ``a`` restricted to ``[1, m]`` is order-preserving."""
    if not member_of(a, SemigroupClass.POPD):
        raise DomainError(f"opd is only defined on POPD_n, not for {a}")
    if a.rank == 0:
        raise DomainError("opd is not defined for the empty map")
    for m in range(a.n, 0, -1):
        if sequence_counts(restrict(a, range(1, m + 1)).values()).descents == 0:
            return m
    raise InconsistencyError(f"No order-preserving prefix found for {a}")


def _require_pord_star(a: ChainMap, name: str) -> None:
    if not member_of(a, SemigroupClass.PORD_STAR):
        raise DomainError(f"{name} is only defined on PORD_n*, not for {a}")


def ord_candidates(a: ChainMap) -> Tuple[int, ...]:
    """Every m with a monotone restriction to ``[1, m]`` and ``(m+1)a = max im(a)``."""
    _require_pord_star(a, "ord")
    top = max(a.im)
    found = []
    for m in range(0, a.n):
        if a.img[m] != top:
            continue
        counts = sequence_counts(restrict(a, range(1, m + 1)).values())
        if counts.descents == 0 or counts.ascents == 0:
            found.append(m)
    return tuple(found)


def ord_degree(a: ChainMap) -> int:
    """The order-reversing degree of ``a``.

    ``m + 1`` is the least point sent to the largest image value, which is
    the point after the single cyclic ascent. Later candidates can sit
    inside a constant block and do not split the kernel as a staircase.
    """
    candidates = ord_candidates(a)
    if not candidates:
        raise InconsistencyError(f"{a} has no order-reversing degree")
    m = min(a.preimage(max(a.im))) - 1
    if m not in candidates:
        raise InconsistencyError(
            f"Least preimage of the maximum of {a} gives m={m}, "
            f"which is not among the candidates {candidates}"
        )
    return m
