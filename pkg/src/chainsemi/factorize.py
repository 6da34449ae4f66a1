"""Three-factor decompositions of orientation-reversing maps

Any map ``a`` in PORD(n, r)* can be written ``a = beta gamma delta``:

* ``beta`` collapses the kernel of ``a`` onto a staircase of points
  ``p, p+1, ...`` and ``m+1, m+2, ...``;
* ``gamma`` reverses each staircase, fixing ``p`` and ``m + 1``; it is the
  restriction of a single G_n generator (large r) or H_n^r generator
  (small r) to its own domain;
* ``delta`` relabels the reversed staircase with the image values of ``a``.

Here ``m`` is the order-reversing degree of ``a`` and ``p`` is its first
image value. ``beta`` is orientation-preserving and ``delta`` is
order-preserving, so the orientation-reversing content of ``a`` is carried
by ``gamma`` alone.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel

from .exceptions import DomainError, InconsistencyError
from .families import Regime, gamma, gamma_rs, regime
from .transforms import (
    ChainMap,
    SemigroupClass,
    classify,
    compose,
    ord_degree,
)
from .types.chainmap import ChainMapField

logger = logging.getLogger(__name__)


class GammaSource(BaseModel):
    """The generator that gamma is a restriction of."""

    kind: Literal["G", "H"]
    p: int
    q: int
    r: Optional[int] = None
    s: Optional[int] = None
    map: ChainMapField


class Factorization(BaseModel):
    input: ChainMapField
    r: int
    beta: ChainMapField
    gamma: ChainMapField
    delta: ChainMapField
    m: int
    p: int
    s: int
    t: int
    rotated: bool
    values: List[int]
    blocks: List[List[int]]
    regime: Regime
    gamma_source: GammaSource
    y: List[int]
    beta_order_preserving: bool
    verified: bool


class Observations(BaseModel):
    """The inequalities that make the three factors order-decreasing."""

    first_values_bounded: bool
    first_blocks_start_late: bool
    tail_values_bounded: bool
    tail_blocks_start_late: bool
    unique_split: bool

    @property
    def all_hold(self) -> bool:
        return all(self.model_dump().values())


def _split(a: ChainMap) -> Tuple[int, List[int], int, List[List[int]], bool]:
    """The values a_1..a_t, the index s and the blocks A_1..A_{t+1}."""
    m = ord_degree(a)
    top = max(a.im)
    first_point = a.dom[0]
    if a(first_point) < top:
        p = a(first_point)
        head = sorted({v for x, v in a.items() if x <= m}, reverse=True)
        tail = sorted({v for x, v in a.items() if x > m} - {p}, reverse=True)
        values = head + tail
        s = len(head)
        first_block = [x for x in a.preimage(p) if x <= m]
        rotated = False
    else:
        p = min(a.im)
        tail = sorted(a.im - {p}, reverse=True)
        values = [p] + tail
        s = 1
        first_block = []
        rotated = True
    blocks = [first_block] + [list(a.preimage(v)) for v in values[1:]]
    blocks.append([x for x in a.preimage(p) if x > m])
    return m, values, s, blocks, rotated


def _check_input(a: ChainMap, r: int, label: SemigroupClass) -> None:
    profile = classify(a)
    if not profile.member_of(label):
        raise DomainError(f"{a} is not in {label.value}")
    if not 3 <= profile.image_size <= r:
        raise DomainError(
            f"{a} has image size {profile.image_size}, outside [3, r={r}]"
        )


def _factorize(a: ChainMap, r: int, label: SemigroupClass) -> Factorization:
    _check_input(a, r, label)
    n = a.n
    current = regime(n, r)
    m, values, s, blocks, rotated = _split(a)
    p = values[0]
    t = len(values)

    beta: Dict[int, int] = {}
    gamma_pairs: Dict[int, int] = {}
    delta: Dict[int, int] = {}
    for i in range(1, s + 1):
        for x in blocks[i - 1]:
            beta[x] = p + i - 1
        gamma_pairs[p + i - 1] = p - i + 1
        delta[p - i + 1] = values[i - 1]
    for j in range(1, t - s + 1):
        for x in blocks[s + j - 1]:
            beta[x] = m + j
        gamma_pairs[m + j] = m + 2 - j
        delta[m + 2 - j] = values[s + j - 1]
    for x in blocks[t]:
        beta[x] = p

    beta_map = ChainMap.from_pairs(n, beta)
    gamma_map = ChainMap.from_pairs(n, gamma_pairs)
    delta_map = ChainMap.from_pairs(n, delta)

    if current == Regime.LARGE:
        source = GammaSource(kind="G", p=p, q=m + 1, map=gamma(n, p, m + 1))
    else:
        source = GammaSource(
            kind="H", p=p, q=m + 1, r=r, s=s, map=gamma_rs(n, r, p, m + 1, s)
        )
    y = list(gamma_map.dom)
    if compose(ChainMap.partial_identity(n, y), source.map) != gamma_map:
        raise InconsistencyError(
            f"gamma {gamma_map} is not the restriction of {source.map} to {y}"
        )
    verified = compose(compose(beta_map, gamma_map), delta_map) == a
    if not verified:
        raise InconsistencyError(
            f"{beta_map} * {gamma_map} * {delta_map} does not multiply back to {a}"
        )
    logger.debug(f"Factorized {a}: m={m}, p={p}, s={s}, t={t}, rotated={rotated}")
    return Factorization(
        input=a,
        r=r,
        beta=beta_map,
        gamma=gamma_map,
        delta=delta_map,
        m=m,
        p=p,
        s=s,
        t=t,
        rotated=rotated,
        values=values,
        blocks=blocks,
        regime=current,
        gamma_source=source,
        y=y,
        beta_order_preserving=classify(beta_map).order_preserving,
        verified=verified,
    )


def factorize_pord(a: ChainMap, r: int) -> Factorization:
    """Factorize a map of PORD(n, r)* with image size at least 3."""
    return _factorize(a, r, SemigroupClass.PORD_STAR)


def factorize_iord(a: ChainMap, r: int) -> Factorization:
    """Factorize an injective map of IORD(n, r)*; every factor is injective."""
    return _factorize(a, r, SemigroupClass.IORD_STAR)


def _chain_holds(values: List[int], s: int, m: int) -> bool:
    head, tail = values[:s], values[s:]
    decreasing = all(u > v for u, v in zip(head, head[1:])) and all(
        u > v for u, v in zip(tail, tail[1:])
    )
    return decreasing and head[-1] >= 1 and head[0] < tail[-1] and tail[0] <= m + 1


def observations(f: Factorization) -> Observations:
    """Evaluate the bounds on values and blocks; empty blocks pass."""
    s, t, p, m = f.s, f.t, f.p, f.m
    head = range(1, s + 1)
    tail = range(1, t - s + 1)
    return Observations(
        first_values_bounded=all(f.values[i - 1] <= p - i + 1 for i in head),
        first_blocks_start_late=all(
            not f.blocks[i - 1] or p + i - 1 <= min(f.blocks[i - 1]) for i in head
        ),
        tail_values_bounded=all(f.values[s + j - 1] <= m + 2 - j for j in tail),
        tail_blocks_start_late=all(
            not f.blocks[s + j - 1] or m + j <= min(f.blocks[s + j - 1]) for j in tail
        ),
        unique_split=[k for k in range(1, t) if _chain_holds(f.values, k, m)] == [s],
    )
