"""Named generators and generator families

Each constructor checks its parameter range and raises `ParameterError`
outside it. `family` assembles whole families (and the combined generating
sets for PORD(n,r) and IORD(n,r)) with their closed-form sizes attached.

Which combined set applies depends on the regime of (n, r):

* large r, ``n - n // 3 <= r <= n - 1``: G_n fits inside the semigroup;
* small r, ``3 <= r < n - n // 3``: G_n is too big and H_n^r replaces it.
"""

from __future__ import annotations

import itertools
import logging
import math
from enum import Enum
from typing import Iterable, List, Optional, Tuple

from pydantic import BaseModel

from . import enumeration
from .exceptions import InconsistencyError, ParameterError, RegimeError
from .settings import ChainsemiSettings
from .transforms import ChainMap, SemigroupClass, restrict
from .types.chainmap import ChainMapField, words_to_maps

logger = logging.getLogger(__name__)


class Side(str, Enum):
    PORD = "pord"
    IORD = "iord"


class Regime(str, Enum):
    LARGE = "large"
    SMALL = "small"


class FamilyLabel(str, Enum):
    E_R = "E_r"
    F_R = "F_r"
    G_N = "G_n"
    H_NR = "H_n^r"
    EI_R = "EI_r"
    FI_R = "FI_r"
    GI_R = "GI_r"
    GIC_K = "GIc_k"
    CLAIMED_PORD = "CLAIMED_PORD"
    CLAIMED_IORD = "CLAIMED_IORD"


class GeneratorFamily(BaseModel):
    label: FamilyLabel
    n: int
    r: Optional[int] = None
    k: Optional[int] = None
    elements: List[ChainMapField]
    formula_count: Optional[int] = None

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, a: ChainMap) -> bool:
        return a in set(self.elements)


def regime(n: int, r: int) -> Regime:
    if not 3 <= r <= n - 1:
        raise RegimeError(f"No generating-set regime for n={n}, r={r}")
    return Regime.LARGE if r >= n - n // 3 else Regime.SMALL


def _interval(lo: int, hi: int) -> range:
    return range(lo, hi + 1)


def xi(n: int, r: int, p: int, q: int) -> ChainMap:
    """The idempotent fixing [p, q] and sending q + 1 to p."""
    if not (1 <= p <= n - 2 and p + 1 <= q <= min(p + r - 2, n - 1)):
        raise ParameterError(f"xi needs 1<=p<=n-2, p+1<=q<=min(p+r-2,n-1): {n,r,p,q}")
    pairs = {x: x for x in _interval(p, q)}
    pairs[q + 1] = p
    return ChainMap.from_pairs(n, pairs)


def _check_pq(n: int, p: int, q: int) -> None:
    if not 1 <= p <= q - 2 <= n - 2:
        raise ParameterError(f"Need 1 <= p <= q-2 <= n-2, got n={n}, p={p}, q={q}")


def gamma(n: int, p: int, q: int) -> ChainMap:
    """The largest injective reversing map fixing exactly p and q."""
    _check_pq(n, p, q)
    k = min(p - 1, q - p - 1)
    l_ = min(q - p - 1, n - q)
    pairs = {p + i: p - i for i in range(k + 1)}
    pairs.update({q + j: q - j for j in range(l_ + 1)})
    return ChainMap.from_pairs(n, pairs)


def gamma_rs(n: int, r: int, p: int, q: int, s: int) -> ChainMap:
    """The reversing map fixing p and q with s points in the first block."""
    _check_pq(n, p, q)
    if not 1 <= s <= min(p, q - p, r - 1):
        raise ParameterError(f"Need 1 <= s <= min(p, q-p, r-1), got s={s}")
    u = min(r - s, q - p, n - q + 1)
    pairs = {p + i: p - i for i in range(s)}
    pairs.update({q + j: q - j for j in range(u)})
    return ChainMap.from_pairs(n, pairs)


def gamma_witness(n: int) -> ChainMap:
    """A map in PRD_n* with image size n - floor(n/3)."""
    if n < 4:
        raise ParameterError(f"gamma_witness needs n >= 4, got {n}")
    k, i = divmod(n, 3)
    return gamma(n, k + i - 1, 2 * k + i)


def delta_aY(n: int, a: int, Y: Iterable[int]) -> ChainMap:
    Y = set(Y)
    if not 2 <= a <= n:
        raise ParameterError(f"Need 2 <= a <= n, got a={a}")
    if Y & {a - 1, a} or not Y <= set(_interval(1, n)):
        raise ParameterError(f"Y must avoid {{a-1, a}} and lie on the chain: {Y}")
    pairs = {y: y for y in Y}
    pairs[a] = a - 1
    return ChainMap.from_pairs(n, pairs)


def zeta_Z(n: int, Z: Iterable[int]) -> ChainMap:
    Z = set(Z)
    if not Z or not Z <= set(_interval(2, n - 1)):
        raise ParameterError(f"Z must be a nonempty subset of [2, n-1], got {Z}")
    pairs = {z: z for z in Z}
    pairs[max(Z) + 1] = min(Z) - 1
    return ChainMap.from_pairs(n, pairs)


def h_parameters(n: int, r: int) -> List[Tuple[int, int, int]]:
    """The (p, q, s) triples indexing H_n^r."""
    return [
        (p, q, s)
        for q in _interval(3, n)
        for p in _interval(1, q - 2)
        for s in _interval(1, min(p, q - p, r - 1))
        if (q, s) != (n, 1)
    ]


def h_count(n: int, r: int) -> int:
    """|H_n^r| by counting parameters, without building any maps."""
    total = 0
    for q in _interval(3, n):
        for p in _interval(1, q - 2):
            top = min(p, q - p, r - 1)
            if top >= 1:
                total += top - (1 if q == n else 0)
    return total


def g_parameters(n: int) -> List[Tuple[int, int]]:
    return [
        (p, q)
        for q in _interval(3, n)
        for p in _interval(1, q - 2)
        if (p, q) != (1, n)
    ]


def f_parameters(n: int, r: int) -> List[Tuple[int, int]]:
    return [
        (p, q)
        for p in _interval(1, n - 2)
        for q in _interval(p + 1, min(p + r - 2, n - 1))
    ]


def nested_h_parameters(n: int, r: int) -> List[Tuple[int, int, int, int]]:
    """Pairs s < s2 where gamma_rs(..., s2) restricts to gamma_rs(..., s).

    For such a pair every map whose restriction is the s2 generator also
    restricts to the s generator, so one H-class contains another.
    """
    found = []
    parameters = set(h_parameters(n, r))
    for p, q, s in sorted(parameters):
        small = gamma_rs(n, r, p, q, s)
        for s2 in _interval(s + 1, min(p, q - p, r - 1)):
            if (p, q, s2) not in parameters:
                continue
            if restrict(gamma_rs(n, r, p, q, s2), small.dom) == small:
                found.append((p, q, s, s2))
    return found


def pord_rank_formula(n: int, r: int) -> int:
    return (
        enumeration.idempotent_formula(n, r)
        + (2 * n - r - 1) * (r - 2) // 2
        + n * (n - 3) // 2
    )


def iord_rank_formula(n: int, r: int) -> int:
    return (
        math.comb(n, r)
        + n * math.comb(n - 2, r - 1)
        + (r - 2) * n
        - (r * r - r - 2) // 2
        + n * (n - 3) // 2
    )


def family_formula(
    label: FamilyLabel, n: int, r: Optional[int] = None, k: Optional[int] = None
) -> Optional[int]:
    """The closed-form size of a family, or None where there is none."""
    label = FamilyLabel(label)
    if label == FamilyLabel.E_R:
        return enumeration.idempotent_formula(n, r)
    if label == FamilyLabel.F_R:
        return (2 * n - r - 1) * (r - 2) // 2
    if label == FamilyLabel.G_N:
        return n * (n - 3) // 2
    if label == FamilyLabel.EI_R:
        return math.comb(n, r)
    if label == FamilyLabel.FI_R:
        return (n - 1) * math.comb(n - 2, r - 1)
    if label == FamilyLabel.GI_R:
        return math.comb(n - 2, (k if k is not None else r) - 1)
    if label == FamilyLabel.GIC_K:
        return n - k
    if label == FamilyLabel.CLAIMED_PORD and regime(n, r) == Regime.LARGE:
        return pord_rank_formula(n, r)
    if label == FamilyLabel.CLAIMED_IORD and regime(n, r) == Regime.LARGE:
        return iord_rank_formula(n, r)
    return None


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


def _members(
    label: FamilyLabel,
    n: int,
    r: Optional[int],
    k: Optional[int],
    settings: Optional[ChainsemiSettings],
) -> List[ChainMap]:
    if label == FamilyLabel.E_R:
        _require(r is not None and 1 <= r <= n, f"E_r needs 1 <= r <= {n}")
        words = enumeration.enumerate_words(n, SemigroupClass.POPD, settings=settings)
        profile = enumeration.profile_words(words)
        return words_to_maps(words[profile.idempotent & (profile.image_size == r)])
    if label == FamilyLabel.F_R:
        _require(r is not None and 2 <= r <= n, f"F_r needs 2 <= r <= {n}")
        return [xi(n, r, p, q) for p, q in f_parameters(n, r)]
    if label == FamilyLabel.G_N:
        _require(n >= 3, "G_n needs n >= 3")
        return [gamma(n, p, q) for p, q in g_parameters(n)]
    if label == FamilyLabel.H_NR:
        _require(r is not None and 2 <= r <= n, f"H_n^r needs 2 <= r <= {n}")
        return [gamma_rs(n, r, p, q, s) for p, q, s in h_parameters(n, r)]
    if label == FamilyLabel.EI_R:
        _require(r is not None and 1 <= r <= n - 1, f"EI_r needs 1 <= r <= {n - 1}")
        return [
            ChainMap.partial_identity(n, Y)
            for Y in itertools.combinations(_interval(1, n), r)
        ]
    if label == FamilyLabel.FI_R:
        _require(r is not None and 1 <= r <= n - 1, f"FI_r needs 1 <= r <= {n - 1}")
        return [
            delta_aY(n, a, Y)
            for a in _interval(2, n)
            for Y in itertools.combinations(
                [x for x in _interval(1, n) if x not in (a - 1, a)], r - 1
            )
        ]
    if label == FamilyLabel.GI_R:
        size = k if k is not None else r
        _require(size is not None and 2 <= size <= n - 1, f"GI_k needs 2<=k<={n - 1}")
        subsets = itertools.combinations(_interval(2, n - 1), size - 1)
        return [zeta_Z(n, Z) for Z in subsets]
    if label == FamilyLabel.GIC_K:
        _require(k is not None and 2 <= k <= n - 1, f"GIc_k needs 2 <= k <= {n - 1}")
        return [zeta_Z(n, _interval(b, b + k - 2)) for b in _interval(2, n - k + 1)]
    if label == FamilyLabel.CLAIMED_PORD:
        assert r is not None
        third = FamilyLabel.G_N if regime(n, r) == Regime.LARGE else FamilyLabel.H_NR
        parts = [FamilyLabel.E_R, FamilyLabel.F_R, third]
        return [a for part in parts for a in _members(part, n, r, None, settings)]
    if label == FamilyLabel.CLAIMED_IORD:
        assert r is not None
        third = FamilyLabel.G_N if regime(n, r) == Regime.LARGE else FamilyLabel.H_NR
        members = []
        for part in (FamilyLabel.EI_R, FamilyLabel.FI_R, FamilyLabel.GI_R):
            members += _members(part, n, r, None, settings)
        for size in _interval(2, r - 1):
            members += _members(FamilyLabel.GIC_K, n, r, size, settings)
        return members + _members(third, n, r, None, settings)
    raise ParameterError(f"Unknown family label {label}")


def family(
    n: int,
    r: Optional[int],
    label: FamilyLabel,
    k: Optional[int] = None,
    settings: Optional[ChainsemiSettings] = None,
) -> GeneratorFamily:
    """Build a family, deduplicated and in canonical order."""
    label = FamilyLabel(label)
    members = _members(label, n, r, k, settings)
    unique = sorted(set(members))
    if len(unique) != len(members):
        raise InconsistencyError(
            f"{label.value}(n={n}, r={r}) has {len(members) - len(unique)} "
            "repeated members"
        )
    formula = family_formula(label, n, r, k)
    if formula is not None and formula != len(unique):
        raise InconsistencyError(
            f"{label.value}(n={n}, r={r}) has {len(unique)} members, "
            f"but the closed form gives {formula}"
        )
    logger.debug(f"Built {label.value}(n={n}, r={r}, k={k}): {len(unique)} members")
    return GeneratorFamily(
        label=label, n=n, r=r, k=k, elements=unique, formula_count=formula
    )


def claimed_generators(side: Side, n: int, r: int) -> GeneratorFamily:
    label = FamilyLabel.CLAIMED_IORD
    if Side(side) == Side.PORD:
        label = FamilyLabel.CLAIMED_PORD
    return family(n, r, label)
