"""Maximal subsemigroups given by removing a class of elements

A descriptor names an ambient semigroup and a removal class. The
complement of the class should be a maximal subsemigroup; `verify_maximal`
checks that on the ambient product table.

Removal classes are computed on the ambient enumeration by restriction
tests: a map belongs to the class of a generator ``g`` when its restriction
to ``dom(g)`` is ``g``. On word arrays this is a comparison of the columns
``dom(g)`` with the image of ``g``.

Every generating set meets every removal class whose complement is a
proper subsemigroup. When those classes are pairwise disjoint and there
are as many of them as claimed generators, the claimed set has minimum
size; `necessity_rank_check` reports on exactly that.
"""

from __future__ import annotations

import logging
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from typing_extensions import Annotated

from . import closure as closure_engine
from .exceptions import ParameterError, RegimeError
from .families import (
    FamilyLabel,
    Regime,
    Side,
    claimed_generators,
    f_parameters,
    family,
    g_parameters,
    gamma,
    gamma_rs,
    h_parameters,
    regime,
    xi,
)
from .reports import CountReport, Quantity
from .settings import ChainsemiSettings, resolve
from .transforms import ChainMap, SemigroupClass, classify
from .types.chainmap import ChainMapField, encode_map, encode_words
from .workers import run_jobs

logger = logging.getLogger(__name__)


class Ambient(BaseModel):
    """PORD(n, r) or IORD(n, r); ``r == n`` stands for the whole monoid."""

    model_config = ConfigDict(frozen=True)

    side: Side
    n: int
    r: int

    @property
    def label(self) -> SemigroupClass:
        return SemigroupClass.PORD if self.side == Side.PORD else SemigroupClass.IORD

    @property
    def whole(self) -> bool:
        return self.r == self.n

    def __str__(self) -> str:
        if self.whole:
            return f"{self.label.value}_{self.n}"
        return f"{self.label.value}({self.n},{self.r})"

    def regime(self) -> Regime:
        """The regime of (n, r); for the whole monoid, that of (n, n - 1)."""
        if self.whole:
            if self.n < 4:
                raise RegimeError(f"Whole monoids are handled for n >= 4, got {self.n}")
            return regime(self.n, self.n - 1)
        return regime(self.n, self.r)

    def ideal(self) -> Ambient:
        return Ambient(side=self.side, n=self.n, r=self.n - 1)

    def table(
        self, settings: Optional[ChainsemiSettings] = None
    ) -> closure_engine.ProductTable:
        return closure_engine.product_table(self.label, self.n, self.r, settings)


def _restriction_mask(words: np.ndarray, g: ChainMap) -> np.ndarray:
    """Rows of ``words`` whose restriction to ``dom(g)`` is ``g``."""
    columns = np.array(g.dom, dtype=np.int64) - 1
    values = np.array([g(x) for x in g.dom], dtype=np.int64)
    return np.all(words[:, columns] == values[None, :], axis=1)


def _singleton_mask(words: np.ndarray, a: ChainMap) -> np.ndarray:
    return encode_words(words) == encode_map(a)


def _require_side(ambient: Ambient, side: Side, kind: str) -> None:
    if ambient.side != side:
        raise ParameterError(
            f"{kind} descriptors belong to {side.value}, not {ambient}"
        )


def _require_part(ambient: Ambient, whole: bool, kind: str) -> None:
    if ambient.whole != whole:
        where = "the whole monoid" if whole else "PORD(n,r) or IORD(n,r) with r < n"
        raise ParameterError(f"{kind} descriptors only apply to {where}")


class RemoveIdempotent(BaseModel):
    kind: Literal["remove-idempotent"] = "remove-idempotent"
    element: ChainMapField

    def name(self) -> str:
        return f"E[{self.element}]"

    def removal_mask(self, ambient: Ambient, words: np.ndarray) -> np.ndarray:
        _require_side(ambient, Side.PORD, "E")
        profile = classify(self.element)
        if not (
            self.element.n == ambient.n
            and profile.idempotent
            and profile.member_of(SemigroupClass.POPD)
            and profile.image_size == ambient.r
        ):
            raise ParameterError(f"{self.element} is not in E_r for {ambient}")
        return _singleton_mask(words, self.element)


class RemoveFpq(BaseModel):
    kind: Literal["remove-F"] = "remove-F"
    p: int
    q: int

    def name(self) -> str:
        return f"F({self.p},{self.q})"

    def removal_mask(self, ambient: Ambient, words: np.ndarray) -> np.ndarray:
        _require_side(ambient, Side.PORD, "F")
        if (self.p, self.q) not in f_parameters(ambient.n, ambient.r):
            raise ParameterError(
                f"No F_{{p,q}} with p={self.p}, q={self.q} in {ambient}"
            )
        return _restriction_mask(words, xi(ambient.n, ambient.r, self.p, self.q))


class RemoveGpq(BaseModel):
    kind: Literal["remove-G"] = "remove-G"
    p: int
    q: int

    def name(self) -> str:
        return f"G({self.p},{self.q})"

    def removal_mask(self, ambient: Ambient, words: np.ndarray) -> np.ndarray:
        _require_side(ambient, Side.PORD, "G")
        if (self.p, self.q) not in g_parameters(ambient.n):
            raise ParameterError(
                f"No G_{{p,q}} with p={self.p}, q={self.q} for n={ambient.n} "
                "((1, n) is excluded)"
            )
        return _restriction_mask(words, gamma(ambient.n, self.p, self.q))


class RemoveHpqs(BaseModel):
    kind: Literal["remove-H"] = "remove-H"
    p: int
    q: int
    s: int

    def name(self) -> str:
        return f"H({self.p},{self.q},{self.s})"

    def generator(self, ambient: Ambient) -> ChainMap:
        if (self.p, self.q, self.s) not in h_parameters(ambient.n, ambient.r):
            raise ParameterError(
                f"No H class with p={self.p}, q={self.q}, s={self.s} in {ambient} "
                "((q, s) = (n, 1) is excluded)"
            )
        return gamma_rs(ambient.n, ambient.r, self.p, self.q, self.s)

    def removal_mask(self, ambient: Ambient, words: np.ndarray) -> np.ndarray:
        _require_side(ambient, Side.PORD, "H")
        return _restriction_mask(words, self.generator(ambient))


class RemoveHIpqs(RemoveHpqs):
    """The H class intersected with IORD(n, r)."""

    kind: Literal["remove-HI"] = "remove-HI"  # type: ignore[assignment]

    def name(self) -> str:
        return f"HI({self.p},{self.q},{self.s})"

    def removal_mask(self, ambient: Ambient, words: np.ndarray) -> np.ndarray:
        _require_side(ambient, Side.IORD, "HI")
        return _restriction_mask(words, self.generator(ambient))


class RemoveSingleGenerator(BaseModel):
    kind: Literal["remove-generator"] = "remove-generator"
    element: ChainMapField

    def name(self) -> str:
        return f"{{{self.element}}}"

    def removal_mask(self, ambient: Ambient, words: np.ndarray) -> np.ndarray:
        if self.element not in claimed_generators(ambient.side, ambient.n, ambient.r):
            raise ParameterError(
                f"{self.element} is not a claimed generator of {ambient}"
            )
        return _singleton_mask(words, self.element)


InnerVariant = Annotated[
    Union[
        RemoveIdempotent,
        RemoveFpq,
        RemoveGpq,
        RemoveHpqs,
        RemoveHIpqs,
        RemoveSingleGenerator,
    ],
    Field(discriminator="kind"),
]


class Ideal(BaseModel):
    """The ideal of maps with image size at most n - 1."""

    kind: Literal["ideal"] = "ideal"

    def name(self) -> str:
        return "ideal"

    def removal_mask(self, ambient: Ambient, words: np.ndarray) -> np.ndarray:
        _require_part(ambient, True, "Ideal")
        return _singleton_mask(words, ChainMap.identity(ambient.n))


class AdjoinIdentity(BaseModel):
    """A maximal subsemigroup of the ideal, with the identity added back."""

    kind: Literal["adjoin-identity"] = "adjoin-identity"
    inner: InnerVariant

    def name(self) -> str:
        return f"1+{self.inner.name()}"

    def removal_mask(self, ambient: Ambient, words: np.ndarray) -> np.ndarray:
        _require_part(ambient, True, "AdjoinIdentity")
        identity = _singleton_mask(words, ChainMap.identity(ambient.n))
        return self.inner.removal_mask(ambient.ideal(), words) & ~identity


Variant = Annotated[
    Union[
        RemoveIdempotent,
        RemoveFpq,
        RemoveGpq,
        RemoveHpqs,
        RemoveHIpqs,
        RemoveSingleGenerator,
        Ideal,
        AdjoinIdentity,
    ],
    Field(discriminator="kind"),
]


class MaximalDescriptor(BaseModel):
    ambient: Ambient
    variant: Variant

    def name(self) -> str:
        return f"{self.ambient} \\ {self.variant.name()}"


class MaximalReport(BaseModel):
    descriptor: MaximalDescriptor
    name: str
    closed: bool
    proper: bool
    maximal: bool
    removal_size: int
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.closed and self.proper and self.maximal


def _inner_variants(ambient: Ambient) -> List[InnerVariant]:
    n, r = ambient.n, ambient.r
    current = ambient.regime()
    if ambient.side == Side.PORD:
        variants: List[InnerVariant] = [
            RemoveIdempotent(element=e) for e in family(n, r, FamilyLabel.E_R).elements
        ]
        variants += [RemoveFpq(p=p, q=q) for p, q in f_parameters(n, r)]
        if current == Regime.LARGE:
            variants += [RemoveGpq(p=p, q=q) for p, q in g_parameters(n)]
        else:
            variants += [RemoveHpqs(p=p, q=q, s=s) for p, q, s in h_parameters(n, r)]
        return variants
    if current == Regime.LARGE:
        generators = claimed_generators(Side.IORD, n, r).elements
        return [RemoveSingleGenerator(element=a) for a in generators]
    h_members = set(family(n, r, FamilyLabel.H_NR).elements)
    singles = [
        a for a in claimed_generators(Side.IORD, n, r).elements if a not in h_members
    ]
    variants = [RemoveSingleGenerator(element=a) for a in singles]
    return variants + [RemoveHIpqs(p=p, q=q, s=s) for p, q, s in h_parameters(n, r)]


def list_descriptors(ambient: Ambient) -> List[MaximalDescriptor]:
    """Every claimed maximal subsemigroup of ``ambient``, as descriptors."""
    if ambient.whole:
        ideal = ambient.ideal()
        inner = [Ideal()] + [
            AdjoinIdentity(inner=v) for v in _inner_variants(ideal)
        ]
        return [MaximalDescriptor(ambient=ambient, variant=v) for v in inner]
    return [
        MaximalDescriptor(ambient=ambient, variant=v) for v in _inner_variants(ambient)
    ]


def maximal_count(ambient: Ambient) -> int:
    """The number of claimed maximal subsemigroups.

    For a whole monoid this is one more than the count for its ideal.
    """
    return len(list_descriptors(ambient))


def removal_mask(
    d: MaximalDescriptor, settings: Optional[ChainsemiSettings] = None
) -> np.ndarray:
    table = d.ambient.table(settings)
    return d.variant.removal_mask(d.ambient, table.semigroup.words)


def removal_class(
    d: MaximalDescriptor, settings: Optional[ChainsemiSettings] = None
) -> List[ChainMap]:
    table = d.ambient.table(settings)
    mask = d.variant.removal_mask(d.ambient, table.semigroup.words)
    return [a for a, keep in zip(table.semigroup.elements, mask) if keep]


def verify_maximal(
    d: MaximalDescriptor, settings: Optional[ChainsemiSettings] = None
) -> MaximalReport:
    """Check that the complement of the removal class is a maximal subsemigroup.

    The complement must be closed and proper, and adding back any single
    removed element must generate the whole ambient semigroup.
    """
    table = d.ambient.table(settings)
    elements = table.semigroup.elements
    removed = d.variant.removal_mask(d.ambient, table.semigroup.words)
    kept = ~removed
    witness = None

    escape = table.escaping_product(kept)
    closed = escape is None
    if escape is not None:
        i, j = escape
        witness = (
            f"{elements[i]} * {elements[j]} = {elements[table.table[i, j]]} "
            "leaves the complement"
        )
    proper = bool(removed.any())

    maximal = proper
    for x in np.flatnonzero(removed):
        grown = kept.copy()
        grown[x] = True
        generated = table.closure_mask(grown, np.array([x]) if closed else None)
        if not generated.all():
            maximal = False
            if witness is None:
                witness = (
                    f"adding {elements[x]} generates {int(generated.sum())} "
                    f"of {table.size} elements"
                )
            break

    report = MaximalReport(
        descriptor=d,
        name=d.name(),
        closed=closed,
        proper=proper,
        maximal=maximal,
        removal_size=int(removed.sum()),
        witness=witness,
    )
    logger.debug(f"{report.name}: closed={closed} proper={proper} maximal={maximal}")
    return report


def verify_all(
    ambient: Ambient, settings: Optional[ChainsemiSettings] = None
) -> List[MaximalReport]:
    settings = resolve(settings)
    descriptors = list_descriptors(ambient)
    # build the shared table before the workers start
    ambient.table(settings)
    return run_jobs(
        lambda d: verify_maximal(d, settings), descriptors, settings.workers
    )


def _class_masks(
    descriptors: List[MaximalDescriptor], settings: Optional[ChainsemiSettings]
) -> np.ndarray:
    return np.array([removal_mask(d, settings) for d in descriptors], dtype=bool)


def nested_removal_classes(
    ambient: Ambient, settings: Optional[ChainsemiSettings] = None
) -> List[Tuple[MaximalDescriptor, MaximalDescriptor]]:
    """Pairs (a, b) whose removal classes satisfy ``class(a) < class(b)``.

    The complement of the larger class then lies inside the complement of
    the smaller one, so it is not maximal.
    """
    descriptors = list_descriptors(ambient)
    masks = _class_masks(descriptors, settings).astype(np.int64)
    overlap = masks @ masks.T
    sizes = masks.sum(axis=1)
    nested = (overlap == sizes[:, None]) & (sizes[:, None] < sizes[None, :])
    return [(descriptors[i], descriptors[j]) for i, j in np.argwhere(nested)]


def _disjoint(masks: np.ndarray) -> bool:
    counts = masks.astype(np.int64).sum(axis=0)
    return bool((counts <= 1).all())


def necessity_rank_check(
    n: int, r: int, side: Side, settings: Optional[ChainsemiSettings] = None
) -> CountReport:
    """Compare the claimed rank with what the removal classes prove.

    ``enumerated_count`` is the number of removal classes whose complement
    is a proper closed subsemigroup. When those classes are disjoint and the
    claimed set generates, it is a lower bound for the rank that the claimed
    set attains.
    """
    settings = resolve(settings)
    side = Side(side)
    ambient = Ambient(side=side, n=n, r=r)
    current = ambient.regime()
    claimed = claimed_generators(side, n, r)
    notes = [f"{current.value}-r regime", f"{len(claimed)} claimed generators"]

    semigroup = closure_engine.ambient_semigroup(ambient.label, n, r, settings)
    generates = closure_engine.closure(claimed.elements, settings=settings) == semigroup
    if not generates:
        notes.append("the claimed set does not generate")

    reports = verify_all(ambient, settings)
    good = [rep for rep in reports if rep.closed and rep.proper]
    for rep in reports:
        if not (rep.closed and rep.proper):
            notes.append(f"not a proper subsemigroup: {rep.name} ({rep.witness})")
    disjoint = _disjoint(_class_masks([rep.descriptor for rep in good], settings))
    if not disjoint:
        notes.append("the removal classes overlap")

    formula = claimed.formula_count if current == Regime.LARGE else None
    if formula is None:
        notes.append("no closed-form rank in the small-r regime")
    report = CountReport.compare(
        len(good),
        formula,
        extra_ok=generates and disjoint and len(good) == len(claimed),
        n=n,
        r=r,
        quantity=Quantity.RANK,
        label=str(ambient),
        notes=notes,
    )
    if not report.match:
        logger.warning(f"Rank check for {ambient} does not match: {'; '.join(notes)}")
    return report


def whole_monoid_rank_check(
    n: int, side: Side, settings: Optional[ChainsemiSettings] = None
) -> CountReport:
    """Rank of PORD_n or IORD_n from its ideal, against n^2 - n + 1.

    The identity is undecomposable in the whole monoid and lies outside the
    ideal, so the rank is one more than the rank of the ideal.
    """
    settings = resolve(settings)
    side = Side(side)
    ambient = Ambient(side=side, n=n, r=n)
    ideal = necessity_rank_check(n, n - 1, side, settings)
    generators = claimed_generators(side, n, n - 1).elements + [ChainMap.identity(n)]
    semigroup = closure_engine.ambient_semigroup(ambient.label, n, n, settings)
    generates = closure_engine.closure(generators, settings=settings) == semigroup
    notes = [f"ideal: {note}" for note in ideal.notes]
    if not generates:
        notes.append("the claimed set with the identity does not generate")
    return CountReport.compare(
        ideal.enumerated_count + 1,
        n * n - n + 1,
        extra_ok=ideal.match and generates,
        n=n,
        r=n,
        quantity=Quantity.RANK,
        label=str(ambient),
        notes=notes,
    )
