"""Semigroup closure, generation tests and undecomposable elements

`closure` saturates a set of maps under composition. Each round multiplies
the frontier (elements found in the previous round) by everything known,
on both sides, so every product is formed exactly once. Products are
computed on whole blocks of image words: if ``L`` and ``R`` are word
arrays, ``R_ext[:, L[:, x]]`` gives the images of every ``x`` under every
product, and packing them with `code_powers` gives one integer code per
product.

Membership of codes is a dense bitmap when ``(n + 1) ** n`` is small
enough, and a sorted array otherwise. New codes found in a round are
ordered by value, and each takes the first product (in block order) that
produced it as its provenance, so the result does not depend on how the
blocks were scheduled.
"""

from __future__ import annotations

import logging
import time
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel

from . import enumeration
from .exceptions import (
    DomainError,
    InconsistencyError,
    ParameterError,
    ResourceCapError,
    SizeMismatchError,
)
from .families import gamma
from .settings import ChainsemiSettings, get_settings, resolve
from .transforms import ChainMap, SemigroupClass, classify, compose
from .types.chainmap import (
    code_powers,
    decode_codes,
    encode_map,
    encode_words,
    maps_to_words,
    words_to_maps,
)
from .workers import run_jobs

logger = logging.getLogger(__name__)

DENSE_CODE_LIMIT = 2**25


def _extended(words: np.ndarray) -> np.ndarray:
    """Prepend a zero column, so that column v holds the image of v."""
    return np.concatenate([np.zeros((len(words), 1), dtype=np.int64), words], axis=1)


def product_codes(
    left: np.ndarray, right_extended: np.ndarray, powers: np.ndarray
) -> np.ndarray:
    """Codes of every product ``left[i] * right[j]``.

    The result has shape ``(len(left), len(right))``.
    """
    out = np.zeros((len(left), len(right_extended)), dtype=np.int64)
    for x in range(left.shape[1]):
        out += right_extended[:, left[:, x]].T * powers[x]
    return out


class CodeSet:
    """A growing set of word codes with fast bulk membership tests."""

    def __init__(self, n: int):
        self.dense = (n + 1) ** n <= DENSE_CODE_LIMIT
        if self.dense:
            self._bits = np.zeros((n + 1) ** n, dtype=bool)
        else:
            self._sorted = np.empty(0, dtype=np.int64)

    def add(self, codes: np.ndarray) -> None:
        if self.dense:
            self._bits[codes] = True
        else:
            self._sorted = np.union1d(self._sorted, codes)

    def contains(self, codes: np.ndarray) -> np.ndarray:
        if self.dense:
            return self._bits[codes]
        if len(self._sorted) == 0:
            return np.zeros(np.shape(codes), dtype=bool)
        idx = np.minimum(np.searchsorted(self._sorted, codes), len(self._sorted) - 1)
        return self._sorted[idx] == codes


class SemigroupSet:
    """A finite set of maps closed under composition, with provenance.

    Elements are held as sorted word codes with their words alongside;
    `ChainMap` objects are only built when asked for. For an element that
    is not a generator, `provenance` gives two elements found earlier whose
    product it is.
    """

    def __init__(
        self,
        n: int,
        words: np.ndarray,
        generator_codes: np.ndarray,
        provenance: Optional[Dict[int, Tuple[int, int]]] = None,
        discovery: Optional[np.ndarray] = None,
    ):
        codes = encode_words(words)
        order = np.argsort(codes, kind="stable")
        self.n = n
        self.codes = codes[order]
        self.words = words[order]
        self.generator_codes = np.unique(generator_codes)
        self._provenance = provenance if provenance is not None else {}
        self.discovery = discovery[order] if discovery is not None else None
        self._elements: Optional[List[ChainMap]] = None

    @classmethod
    def from_words(
        cls, words: np.ndarray, generator_codes: Optional[np.ndarray] = None
    ) -> SemigroupSet:
        """Wrap a set that is already known to be closed, e.g. an enumerated class."""
        words = np.asarray(words, dtype=np.int64)
        codes, first = np.unique(encode_words(words), return_index=True)
        words = words[first]
        gens = codes if generator_codes is None else generator_codes
        return cls(words.shape[1], words, gens)

    @classmethod
    def from_elements(cls, elements: Sequence[ChainMap]) -> SemigroupSet:
        """Wrap maps that are already known to form a closed set."""
        _, words = _canonical_words(elements)
        return cls.from_words(words)

    @classmethod
    def from_class(
        cls,
        label: SemigroupClass,
        n: int,
        r: Optional[int] = None,
        settings: Optional[ChainsemiSettings] = None,
    ) -> SemigroupSet:
        return cls.from_words(enumeration.enumerate_words(n, label, r, settings))

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self) -> Iterator[ChainMap]:
        return iter(self.elements)

    def __contains__(self, a: object) -> bool:
        if not isinstance(a, ChainMap) or a.n != self.n:
            return False
        return bool(self.contains_codes(np.array([encode_map(a)]))[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SemigroupSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.codes, other.codes)

    def __repr__(self) -> str:
        return f"SemigroupSet(n={self.n}, size={len(self)})"

    def contains_codes(self, codes: np.ndarray) -> np.ndarray:
        if len(self.codes) == 0:
            return np.zeros(np.shape(codes), dtype=bool)
        idx = np.minimum(np.searchsorted(self.codes, codes), len(self.codes) - 1)
        return self.codes[idx] == codes

    def index_codes(self, codes: np.ndarray) -> np.ndarray:
        """Positions of ``codes`` in canonical order; every code must be present."""
        idx = np.searchsorted(self.codes, codes)
        inside = idx < len(self.codes)
        found = np.zeros(np.shape(codes), dtype=bool)
        found[inside] = self.codes[idx[inside]] == np.asarray(codes)[inside]
        if not found.all():
            raise InconsistencyError(
                f"{np.count_nonzero(~found)} products fall outside the set"
            )
        return idx

    def issubset(self, other: SemigroupSet) -> bool:
        return bool(other.contains_codes(self.codes).all())

    @property
    def elements(self) -> List[ChainMap]:
        if self._elements is None:
            self._elements = words_to_maps(self.words)
        return self._elements

    @property
    def generators(self) -> List[ChainMap]:
        return words_to_maps(decode_codes(self.generator_codes, self.n))

    @property
    def provenance(self) -> Dict[ChainMap, Tuple[ChainMap, ChainMap]]:
        decode = {
            c: ChainMap(self.n, w)
            for c, w in zip(self.codes.tolist(), self.words.tolist())
        }
        return {
            decode[c]: (decode[left], decode[right])
            for c, (left, right) in self._provenance.items()
        }

    def replay(self, a: ChainMap) -> ChainMap:
        """Rebuild ``a`` by multiplying out its provenance down to generators."""
        target = encode_map(a)
        if not self.contains_codes(np.array([target]))[0]:
            raise DomainError(f"{a} is not in this semigroup")
        gens = set(self.generator_codes.tolist())
        built: Dict[int, ChainMap] = {}
        stack = [target]
        while stack:
            code = stack[-1]
            if code in built:
                stack.pop()
                continue
            if code in gens:
                built[code] = words_to_maps(decode_codes(np.array([code]), self.n))[0]
                stack.pop()
                continue
            if code not in self._provenance:
                raise InconsistencyError(f"Element with code {code} has no provenance")
            left, right = self._provenance[code]
            pending = [c for c in (left, right) if c not in built]
            if pending:
                stack.extend(pending)
            else:
                built[code] = compose(built[left], built[right])
                stack.pop()
        return built[target]

    def factor_chain(self, a: ChainMap, limit: int = 10_000) -> List[ChainMap]:
        """Generators whose product, left to right, is ``a``.

        Words can grow exponentially with the number of rounds, so expansion
        stops with `ResourceCapError` beyond ``limit`` letters.
        """
        self.replay(a)
        gens = set(self.generator_codes.tolist())
        word: List[int] = []
        stack = [encode_map(a)]
        while stack:
            code = stack.pop()
            if code in gens:
                word.append(code)
                if len(word) > limit:
                    raise ResourceCapError(f"Factor of {a} is longer than {limit}")
                continue
            left, right = self._provenance[code]
            stack.extend([right, left])
        return words_to_maps(decode_codes(np.array(word), self.n))


def _canonical_words(gens: Sequence[ChainMap]) -> Tuple[int, np.ndarray]:
    if not gens:
        raise DomainError("At least one generator is needed")
    sizes = {g.n for g in gens}
    if len(sizes) != 1:
        raise SizeMismatchError(f"Generators live on chains of sizes {sorted(sizes)}")
    n = sizes.pop()
    words = maps_to_words(gens, n)
    _, first = np.unique(encode_words(words), return_index=True)
    return n, words[first]


def _blocks(
    left: np.ndarray, right: np.ndarray, chunk_cells: int
) -> List[Tuple[np.ndarray, np.ndarray]]:
    rows = max(1, chunk_cells // max(1, len(right)))
    return [(left[i : i + rows], right) for i in range(0, len(left), rows)]


def closure(
    gens: Sequence[ChainMap],
    base: Optional[SemigroupSet] = None,
    settings: Optional[ChainsemiSettings] = None,
) -> SemigroupSet:
    """The subsemigroup generated by ``gens`` (together with ``base``, if given).

    ``base`` must already be closed; only products involving something new
    are formed.
    """
    settings = resolve(settings)
    start = time.time()
    n, gen_words = _canonical_words(gens)
    powers = code_powers(n)
    known = CodeSet(n)

    if base is not None:
        if base.n != n:
            raise SizeMismatchError(f"Base lives on {base.n} points, generators on {n}")
        fresh = ~base.contains_codes(encode_words(gen_words))
        stored = [base.words, gen_words[fresh]]
        frontier = np.arange(len(base), len(base) + int(fresh.sum()))
        generator_codes = np.concatenate([base.codes, encode_words(gen_words)])
    else:
        stored = [gen_words]
        frontier = np.arange(len(gen_words))
        generator_codes = encode_words(gen_words)

    words = np.concatenate(stored, axis=0)
    known.add(encode_words(words))
    provenance: Dict[int, Tuple[int, int]] = {}
    rounds = 0

    while len(frontier):
        rounds += 1
        all_codes = encode_words(words)
        extended = _extended(words)
        everything = np.arange(len(words))
        jobs = _blocks(frontier, everything, settings.chunk_cells) + _blocks(
            everything, frontier, settings.chunk_cells
        )

        def multiply(job: Tuple[np.ndarray, np.ndarray]):
            left_idx, right_idx = job
            codes = product_codes(words[left_idx], extended[right_idx], powers)
            rows, cols = np.nonzero(~known.contains(codes))
            found, first = np.unique(codes[rows, cols], return_index=True)
            return found, left_idx[rows[first]], right_idx[cols[first]]

        results = run_jobs(multiply, jobs, settings.workers)
        found = np.concatenate([res[0] for res in results])
        lefts = np.concatenate([res[1] for res in results])
        rights = np.concatenate([res[2] for res in results])
        new_codes, first = np.unique(found, return_index=True)
        if len(words) + len(new_codes) > settings.element_cap:
            raise ResourceCapError(
                f"Closure passed the element cap of {settings.element_cap} "
                f"after {rounds} rounds"
            )
        for code, left, right in zip(
            new_codes.tolist(), lefts[first].tolist(), rights[first].tolist()
        ):
            provenance[code] = (int(all_codes[left]), int(all_codes[right]))
        known.add(new_codes)
        frontier = np.arange(len(words), len(words) + len(new_codes))
        words = np.concatenate([words, decode_codes(new_codes, n)], axis=0)
        logger.debug(
            f"Closure round {rounds}: {len(new_codes)} new, {len(words)} total"
        )

    logger.info(
        f"Closure of {len(gen_words)} generators on n={n}: {len(words)} elements "
        f"in {rounds} rounds, {time.time() - start:.2f}s"
    )
    return SemigroupSet(
        n, words, generator_codes, provenance, discovery=np.arange(len(words))
    )


class ClassSpec(BaseModel):
    """A class of maps named by label, chain size and image bound."""

    label: SemigroupClass
    n: int
    r: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> ClassSpec:
        """Read ``LABEL:n`` or ``LABEL:n:r``, e.g. ``PORD:5:3``."""
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ParameterError(f"'{text}' is not of the form LABEL:n[:r]")
        try:
            label = SemigroupClass(parts[0])
            numbers = [int(p) for p in parts[1:]]
        except ValueError as e:
            raise ParameterError(f"Cannot read class spec '{text}': {e}") from e
        r = numbers[1] if len(numbers) > 1 else None
        return cls(label=label, n=numbers[0], r=r)

    def __str__(self) -> str:
        tail = f":{self.r}" if self.r is not None else ""
        return f"{self.label.value}:{self.n}{tail}"

    def semigroup(self, settings: Optional[ChainsemiSettings] = None) -> SemigroupSet:
        return ambient_semigroup(self.label, self.n, self.r, settings)


def ambient_semigroup(
    label: SemigroupClass,
    n: int,
    r: Optional[int] = None,
    settings: Optional[ChainsemiSettings] = None,
) -> SemigroupSet:
    """An enumerated class as a `SemigroupSet`, shared between callers."""
    settings = resolve(settings)
    # enumerate_words checks the cap on every call, cached or not
    enumeration.enumerate_words(n, label, r, settings)
    return _ambient(SemigroupClass(label), n, r, settings.workers)


@lru_cache(maxsize=16)
def _ambient(
    label: SemigroupClass, n: int, r: Optional[int], workers: int
) -> SemigroupSet:
    settings = get_settings(cap=max(n, 1), workers=workers)
    return SemigroupSet.from_words(enumeration.enumerate_words(n, label, r, settings))


def is_generating(
    gens: Sequence[ChainMap],
    target: Union[SemigroupSet, ClassSpec],
    settings: Optional[ChainsemiSettings] = None,
) -> bool:
    if isinstance(target, ClassSpec):
        target = target.semigroup(settings)
    gens = list(gens)
    if not gens:
        return False
    return closure(gens, settings=settings) == target


class ProductTable:
    """The multiplication table of a closed set, in canonical index space.

    ``table[i, j]`` is the index of ``elements[i] * elements[j]``.
    """

    def __init__(
        self, semigroup: SemigroupSet, settings: Optional[ChainsemiSettings] = None
    ):
        settings = resolve(settings)
        size = len(semigroup)
        if size > settings.table_limit:
            raise ResourceCapError(
                f"A product table for {size} elements exceeds the limit of "
                f"{settings.table_limit}"
            )
        self.semigroup = semigroup
        self.size = size
        self.table = np.empty((size, size), dtype=np.int32)
        powers = code_powers(semigroup.n)
        extended = _extended(semigroup.words)
        rows = max(1, settings.chunk_cells // max(1, size))
        for i in range(0, size, rows):
            codes = product_codes(semigroup.words[i : i + rows], extended, powers)
            self.table[i : i + rows] = semigroup.index_codes(codes)

    def mask_of(self, maps: Sequence[ChainMap]) -> np.ndarray:
        mask = np.zeros(self.size, dtype=bool)
        if maps:
            codes = encode_words(maps_to_words(maps, self.semigroup.n))
            mask[self.semigroup.index_codes(codes)] = True
        return mask

    def closure_mask(
        self, mask: np.ndarray, frontier: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """The subsemigroup generated by the elements selected by ``mask``.

        If the selected set is a closed set plus a few extra elements, pass
        the indices of the extras as ``frontier``.
        """
        known = mask.copy()
        if frontier is None:
            frontier = np.flatnonzero(known)
        while len(frontier):
            members = np.flatnonzero(known)
            products = np.concatenate(
                [
                    self.table[np.ix_(frontier, members)].ravel(),
                    self.table[np.ix_(members, frontier)].ravel(),
                ]
            )
            fresh = np.unique(products)
            fresh = fresh[~known[fresh]]
            known[fresh] = True
            frontier = fresh
        return known

    def escaping_product(self, mask: np.ndarray) -> Optional[Tuple[int, int]]:
        """A pair inside ``mask`` whose product leaves it, or None if closed."""
        members = np.flatnonzero(mask)
        inside = mask[self.table[np.ix_(members, members)]]
        if inside.all():
            return None
        i, j = np.argwhere(~inside)[0]
        return int(members[i]), int(members[j])

    def is_closed(self, mask: np.ndarray) -> bool:
        return self.escaping_product(mask) is None

    def undecomposable_mask(self) -> np.ndarray:
        indices = np.arange(self.size)
        table = self.table
        nontrivial = (table != indices[:, None]) & (table != indices[None, :])
        witnessed = np.zeros(self.size, dtype=bool)
        witnessed[table[nontrivial]] = True
        return ~witnessed


def product_table(
    label: SemigroupClass,
    n: int,
    r: Optional[int] = None,
    settings: Optional[ChainsemiSettings] = None,
) -> ProductTable:
    """The product table of an enumerated class, shared between callers."""
    settings = resolve(settings)
    semigroup = ambient_semigroup(label, n, r, settings)
    if len(semigroup) > settings.table_limit:
        raise ResourceCapError(
            f"A product table for {len(semigroup)} elements exceeds the limit of "
            f"{settings.table_limit}"
        )
    return _table(SemigroupClass(label), n, r, settings.workers, settings.chunk_cells)


@lru_cache(maxsize=8)
def _table(
    label: SemigroupClass, n: int, r: Optional[int], workers: int, chunk_cells: int
) -> ProductTable:
    semigroup = _ambient(label, n, r, workers)
    settings = get_settings(
        cap=max(n, 1),
        workers=workers,
        chunk_cells=chunk_cells,
        table_limit=max(len(semigroup), 1),
    )
    return ProductTable(semigroup, settings)


def undecomposables(
    semigroup: SemigroupSet, settings: Optional[ChainsemiSettings] = None
) -> List[ChainMap]:
    """Elements z with no product z = xy where x != z and y != z."""
    settings = resolve(settings)
    if len(semigroup) <= settings.table_limit:
        mask = ProductTable(semigroup, settings).undecomposable_mask()
        return words_to_maps(semigroup.words[mask])

    logger.info(f"Streaming products of {len(semigroup)} elements")
    size = len(semigroup)
    powers = code_powers(semigroup.n)
    extended = _extended(semigroup.words)
    witnessed = np.zeros(size, dtype=bool)
    indices = np.arange(size)
    rows = max(1, settings.chunk_cells // size)
    for i in range(0, size, rows):
        block = semigroup.index_codes(
            product_codes(semigroup.words[i : i + rows], extended, powers)
        )
        row_idx = indices[i : i + rows][:, None]
        nontrivial = (block != row_idx) & (block != indices[None, :])
        witnessed[block[nontrivial]] = True
    return words_to_maps(semigroup.words[~witnessed])


def rank_if_determined(
    semigroup: SemigroupSet, settings: Optional[ChainsemiSettings] = None
) -> Optional[int]:
    """The rank, when the undecomposable elements alone generate the set.

    Every generating set contains every undecomposable element, so in that
    case they form the unique minimal generating set.
    """
    minimal = undecomposables(semigroup, settings)
    if minimal and closure(minimal, settings=settings) == semigroup:
        return len(minimal)
    return None


def is_decomposition(
    a: ChainMap, left: ChainMap, right: ChainMap, label: SemigroupClass, r: int
) -> bool:
    """Whether ``a = left * right`` is a nontrivial product inside ``label(n, r)``.

    This settles decomposability of one element without building the
    whole semigroup.
    """
    members = all(
        classify(m).member_of(label) and m.rank <= r for m in (a, left, right)
    )
    return members and left != a and right != a and compose(left, right) == a


def check_gamma_undecomposable(
    n: int,
    p: int,
    q: int,
    side: str = "pord",
    settings: Optional[ChainsemiSettings] = None,
) -> bool:
    """Brute-force undecomposability of gamma(n, p, q) in PORD_n or IORD_n.

    For ``side="pord"`` the result says whether brute force agrees with
    the criterion ``dom = [p, n]``; for ``side="iord"`` it is simply whether
    the map is undecomposable.
    """
    g = gamma(n, p, q)
    label = SemigroupClass.PORD if side == "pord" else SemigroupClass.IORD
    table = product_table(label, n, None, settings)
    index = int(table.semigroup.index_codes(np.array([encode_map(g)]))[0])
    undecomposable = bool(table.undecomposable_mask()[index])
    if side == "pord":
        criterion = g.dom == tuple(range(p, n + 1))
        return undecomposable == criterion
    return undecomposable
