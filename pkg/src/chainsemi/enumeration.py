"""Exhaustive enumeration of order-decreasing partial maps

Every class handled by chainsemi lies inside PD_n, the order-decreasing
partial maps, so candidates are the words whose entry at x is 0 or at most
x. There are (n+1)! of them. They are generated as mixed-radix counters
with `numpy.indices`, split into one job per value of the last point, and
classified in bulk by `profile_words`, the array version of
`transforms.classify`.

The counting reports built on top of the enumeration compare brute-force
counts with closed forms.
"""

from __future__ import annotations

import logging
import math
import time
from functools import lru_cache
from typing import List, NamedTuple, Optional

import numpy as np

from . import families
from .exceptions import ParameterError, ResourceCapError
from .reports import CountReport, HTableRow, Quantity
from .settings import ChainsemiSettings, resolve
from .transforms import CLASS_PREDICATES, ChainMap, SemigroupClass, classify
from .types.chainmap import encode_words, words_to_maps
from .workers import run_jobs

logger = logging.getLogger(__name__)


class WordProfile(NamedTuple):
    """Profile flags for a block of words, one entry per row."""

    order_preserving: np.ndarray
    order_reversing: np.ndarray
    orientation_preserving: np.ndarray
    orientation_reversing: np.ndarray
    order_decreasing: np.ndarray
    injective: np.ndarray
    idempotent: np.ndarray
    image_size: np.ndarray
    domain_size: np.ndarray
    first_value: np.ndarray
    last_value: np.ndarray


def profile_words(words: np.ndarray) -> WordProfile:
    """Classify every row of ``words`` at once."""
    words = np.asarray(words, dtype=np.int64)
    count, n = words.shape
    rows = np.arange(count)
    positions = np.arange(n)
    defined = words > 0

    # For each position, the index of the closest defined position before it
    marked = np.where(defined, positions[None, :], -1)
    last_seen = np.maximum.accumulate(marked, axis=1)
    previous = np.concatenate(
        [np.full((count, 1), -1, dtype=np.int64), last_seen[:, :-1]], axis=1
    )
    has_previous = defined & (previous >= 0)
    previous_value = np.take_along_axis(words, np.maximum(previous, 0), axis=1)
    descents = (has_previous & (words < previous_value)).sum(axis=1)
    ascents = (has_previous & (words > previous_value)).sum(axis=1)

    domain_size = defined.sum(axis=1)
    first_value = words[rows, np.argmax(defined, axis=1)]
    last_value = words[rows, np.maximum(last_seen[:, -1], 0)]
    wraps = domain_size >= 2
    cyclic_descents = descents + (wraps & (first_value < last_value))
    cyclic_ascents = ascents + (wraps & (first_value > last_value))

    ordered = np.sort(words, axis=1)
    image_size = ((ordered[:, 1:] != ordered[:, :-1]) & (ordered[:, 1:] > 0)).sum(
        axis=1
    ) + (ordered[:, 0] > 0)

    # extended[:, v] is the image of v, with column 0 standing for "undefined"
    extended = np.concatenate([np.zeros((count, 1), dtype=np.int64), words], axis=1)
    squared = np.take_along_axis(extended, words, axis=1)

    return WordProfile(
        order_preserving=descents == 0,
        order_reversing=ascents == 0,
        orientation_preserving=cyclic_descents <= 1,
        orientation_reversing=cyclic_ascents <= 1,
        order_decreasing=np.all(~defined | (words <= positions + 1), axis=1),
        injective=image_size == domain_size,
        idempotent=np.all(squared == words, axis=1),
        image_size=image_size,
        domain_size=domain_size,
        first_value=first_value,
        last_value=last_value,
    )


def class_mask(
    profile: WordProfile, label: SemigroupClass, r_bound: Optional[int] = None
) -> np.ndarray:
    mask = np.asarray(CLASS_PREDICATES[SemigroupClass(label)](profile), dtype=bool)
    if r_bound is not None:
        mask = mask & (profile.image_size <= r_bound)
    return mask


def endpoint_mismatches(profile: WordProfile) -> np.ndarray:
    """Rows where the endpoint values misjudge monotonicity of an oriented map.

    See `transforms.endpoint_order`. The result should be all False.
    """
    nonconstant = profile.image_size >= 2
    rising = profile.first_value < profile.last_value
    falling = profile.last_value < profile.first_value
    preserving = nonconstant & profile.orientation_preserving
    reversing = nonconstant & profile.orientation_reversing
    return (preserving & (profile.order_preserving != rising)) | (
        reversing & (profile.order_reversing != falling)
    )


def prefix_words(k: int) -> np.ndarray:
    """All order-decreasing words on the points 1..k, in canonical order."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices(tuple(range(2, k + 2)), dtype=np.int64)
    return grids.reshape(k, -1).T


def _check_size(n: int, settings: ChainsemiSettings) -> None:
    if n < 1:
        raise ParameterError(f"n must be at least 1, got {n}")
    if n > settings.cap:
        raise ResourceCapError(
            f"Enumerating n={n} exceeds the brute-force cap of {settings.cap} "
            "(raise it with --cap or CHAINSEMI_CAP)"
        )


def all_words(n: int, settings: Optional[ChainsemiSettings] = None) -> np.ndarray:
    """Every partial map of the n-chain, order-decreasing or not: (n+1)^n words."""
    settings = resolve(settings)
    _check_size(n, settings)
    grids = np.indices((n + 1,) * n, dtype=np.int64)
    return grids.reshape(n, -1).T


@lru_cache(maxsize=32)
def _enumerate(
    n: int, label: SemigroupClass, r_bound: Optional[int], workers: int
) -> np.ndarray:
    start = time.time()
    prefixes = prefix_words(n - 1)

    def select(last_value: int) -> np.ndarray:
        block = np.concatenate(
            [prefixes, np.full((len(prefixes), 1), last_value, dtype=np.int64)],
            axis=1,
        )
        return block[class_mask(profile_words(block), label, r_bound)]

    parts = run_jobs(select, list(range(n + 1)), workers)
    words = np.concatenate(parts, axis=0)
    words = words[np.argsort(encode_words(words), kind="stable")]
    words.flags.writeable = False
    logger.info(
        f"Enumerated {len(words)} elements of {label.value}(n={n}, r={r_bound}) "
        f"in {time.time() - start:.2f}s"
    )
    return words


def enumerate_words(
    n: int,
    label: SemigroupClass,
    r_bound: Optional[int] = None,
    settings: Optional[ChainsemiSettings] = None,
) -> np.ndarray:
    """The image words of a class, one per row, in canonical order.

    The returned array is shared between callers and is read-only.
    """
    settings = resolve(settings)
    _check_size(n, settings)
    if r_bound is not None and not 0 <= r_bound <= n:
        raise ParameterError(f"r_bound must lie in [0, {n}], got {r_bound}")
    return _enumerate(n, SemigroupClass(label), r_bound, settings.workers)


def enumerate_class(
    n: int,
    label: SemigroupClass,
    r_bound: Optional[int] = None,
    settings: Optional[ChainsemiSettings] = None,
) -> List[ChainMap]:
    return words_to_maps(enumerate_words(n, label, r_bound, settings))


def idempotent_formula(n: int, r: int) -> int:
    """Number of idempotents of PORD_n with image size r.

    With a single fixed point the only constraint is that it is the least
    point of the domain, which gives 2^n - 1 rather than n 2^(n-1).
    """
    if r == 1:
        return 2**n - 1
    return math.comb(n, r) * 2 ** (n - r)


def count_idempotents(
    n: int, r: int, settings: Optional[ChainsemiSettings] = None
) -> CountReport:
    if not 1 <= r <= n:
        raise ParameterError(f"r must lie in [1, {n}], got {r}")
    words = enumerate_words(n, SemigroupClass.PORD, settings=settings)
    profile = profile_words(words)
    count = int(np.count_nonzero(profile.idempotent & (profile.image_size == r)))
    return CountReport.compare(
        count, idempotent_formula(n, r), n=n, r=r, quantity=Quantity.IDEMPOTENTS
    )


def rn_formula(n: int) -> int:
    return n - n // 3


def max_reversing_image(
    n: int, settings: Optional[ChainsemiSettings] = None
) -> CountReport:
    """The largest image of a map in PRD_n*, against n - floor(n/3)."""
    if n < 4:
        raise ParameterError(f"r_n is only considered for n >= 4, got {n}")
    settings = resolve(settings)
    witness = families.gamma_witness(n)
    witness_ok = classify(witness).member_of(SemigroupClass.PRD_STAR)
    notes = [f"witness {witness} has image size {witness.rank}"]
    if not witness_ok:
        notes.append("the witness is not in PRD_n*")
    if n <= settings.cap:
        words = enumerate_words(n, SemigroupClass.PRD_STAR, settings=settings)
        largest = int(profile_words(words).image_size.max())
        witness_ok = witness_ok and witness.rank == largest
    else:
        largest = witness.rank
        notes.append("n is above the enumeration cap: witness only")
    return CountReport.compare(
        largest,
        rn_formula(n),
        extra_ok=witness_ok,
        n=n,
        quantity=Quantity.RN,
        notes=notes,
    )


def count_H_table(n_max: int) -> List[HTableRow]:
    """|H_n^r| for every n <= n_max and every r in the small-r regime.

    The first row is at n = 5; no closed form is known.
    """
    if n_max < 5:
        raise ParameterError(f"The small-r regime is empty below n=5, got {n_max}")
    return [
        HTableRow(n=n, r=r, count=families.h_count(n, r))
        for n in range(5, n_max + 1)
        for r in range(3, n - n // 3)
    ]


def count_class_size(
    n: int,
    label: SemigroupClass,
    r: Optional[int] = None,
    settings: Optional[ChainsemiSettings] = None,
) -> CountReport:
    label = SemigroupClass(label)
    count = len(enumerate_words(n, label, r, settings))
    formula = None
    if label == SemigroupClass.PD and (r is None or r >= n):
        formula = math.factorial(n + 1)
    return CountReport.compare(
        count, formula, n=n, r=r, quantity=Quantity.CLASS_SIZE, label=label.value
    )
