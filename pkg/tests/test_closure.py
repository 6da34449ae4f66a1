import random
from functools import reduce

import numpy as np
import pytest
from pytest import raises

from chainsemi import closure as engine
from chainsemi import families
from chainsemi.exceptions import (
    DomainError,
    ParameterError,
    ResourceCapError,
    SizeMismatchError,
)
from chainsemi.families import FamilyLabel, Side
from chainsemi.settings import get_settings
from chainsemi.transforms import ChainMap, SemigroupClass, compose


def claimed(side, n, r):
    return families.claimed_generators(side, n, r).elements


def test_closure_of_an_idempotent():
    e = ChainMap.parse("n=3:[1,1,3]")
    S = engine.closure([e])
    assert len(S) == 1
    assert S.elements == [e]
    assert S.generators == [e]
    assert e in S
    assert ChainMap.identity(3) not in S
    assert ChainMap.identity(4) not in S


def test_closure_of_a_cyclic_semigroup():
    a = ChainMap.parse("n=4:[0,1,2,3]")
    S = engine.closure([a])
    powers = [a]
    while compose(powers[-1], a) != powers[-1]:
        powers.append(compose(powers[-1], a))
    assert sorted(S) == sorted(set(powers))
    assert ChainMap.empty(4) in S


@pytest.mark.parametrize(
    "side, n, r",
    [
        (Side.PORD, 4, 3),
        (Side.PORD, 5, 3),
        (Side.PORD, 5, 4),
        (Side.IORD, 4, 3),
        (Side.IORD, 5, 3),
        (Side.IORD, 5, 4),
    ],
)
def test_claimed_sets_generate(side, n, r):
    label = SemigroupClass.PORD if side == Side.PORD else SemigroupClass.IORD
    target = engine.ambient_semigroup(label, n, r)
    assert engine.closure(claimed(side, n, r)) == target
    spec = engine.ClassSpec(label=label, n=n, r=r)
    assert engine.is_generating(claimed(side, n, r), spec)


def test_small_regime_at_six_and_seven():
    for n, r in [(6, 3), (7, 3), (7, 4)]:
        spec = engine.ClassSpec.parse(f"PORD:{n}:{r}")
        assert engine.is_generating(claimed(Side.PORD, n, r), spec)


def test_missing_generator_does_not_generate():
    gens = claimed(Side.PORD, 4, 3)
    spec = engine.ClassSpec.parse("PORD:4:3")
    assert not engine.is_generating(gens[1:], spec)
    assert not engine.is_generating([], spec)


def test_provenance_replays():
    S = engine.closure(claimed(Side.PORD, 4, 3))
    provenance = S.provenance
    generators = set(S.generators)
    for a in S:
        assert S.replay(a) == a
        if a not in generators:
            left, right = provenance[a]
            assert compose(left, right) == a
    a = S.elements[len(S) // 2]
    chain = S.factor_chain(a)
    assert all(g in generators for g in chain)
    assert reduce(compose, chain) == a
    with raises(DomainError):
        S.replay(ChainMap.identity(4))


def test_closure_with_a_base():
    gens = claimed(Side.PORD, 4, 3)
    base = engine.closure(gens[:-3])
    grown = engine.closure(gens[-3:], base=base)
    assert grown == engine.closure(gens)
    assert base.issubset(grown)
    with raises(SizeMismatchError):
        engine.closure([ChainMap.identity(3)], base=base)


def test_closure_errors():
    with raises(DomainError):
        engine.closure([])
    with raises(SizeMismatchError):
        engine.closure([ChainMap.identity(3), ChainMap.identity(4)])
    with raises(ResourceCapError):
        engine.closure(
            claimed(Side.PORD, 4, 3), settings=get_settings(element_cap=5)
        )


def test_closure_blocks_and_workers_do_not_change_the_result():
    gens = claimed(Side.IORD, 5, 4)
    reference = engine.closure(gens, settings=get_settings(workers=1))
    settings = get_settings(workers=4, chunk_cells=50)
    chunked = engine.closure(gens, settings=settings)
    assert reference == chunked
    assert reference.provenance == chunked.provenance


@pytest.mark.parametrize("seed", [3, 7])
def test_closure_ignores_generator_order(seed):
    gens = claimed(Side.IORD, 5, 4)
    reference = engine.closure(gens)
    shuffled = list(gens)
    random.Random(seed).shuffle(shuffled)
    result = engine.closure(shuffled)
    assert result.elements == reference.elements
    assert result.provenance == reference.provenance
    assert result.generators == reference.generators


def test_sparse_code_set():
    codes = engine.CodeSet(7)
    assert codes.dense
    sparse = engine.CodeSet(8)
    assert not sparse.dense
    assert not sparse.contains(np.array([5])).any()
    sparse.add(np.array([7, 3]))
    assert sparse.contains(np.array([3, 5, 7])).tolist() == [True, False, True]


def test_class_spec():
    spec = engine.ClassSpec.parse("PORD:5:3")
    assert spec.label == SemigroupClass.PORD
    assert (spec.n, spec.r) == (5, 3)
    assert str(spec) == "PORD:5:3"
    assert str(engine.ClassSpec.parse("IORD*:4")) == "IORD*:4"
    for bad in ["PORD", "XYZ:4", "PORD:a", "PORD:4:3:2"]:
        with raises(ParameterError):
            engine.ClassSpec.parse(bad)


def test_ambient_semigroup_respects_the_cap():
    with raises(ResourceCapError):
        engine.ambient_semigroup(SemigroupClass.PORD, 5, 3, get_settings(cap=4))


def test_ambient_semigroups_and_tables_are_shared():
    S = engine.ambient_semigroup(SemigroupClass.PORD, 4, 3)
    assert engine.ambient_semigroup(SemigroupClass.PORD, 4, 3) is S
    table = engine.product_table(SemigroupClass.PORD, 4, 3)
    assert engine.product_table(SemigroupClass.PORD, 4, 3) is table
    assert table.semigroup == S
    assert engine._ambient.cache_info().maxsize is not None
    assert engine._table.cache_info().maxsize is not None
    with raises(ResourceCapError):
        engine.product_table(SemigroupClass.PORD, 4, 3, get_settings(table_limit=10))


def test_product_table():
    S = engine.ambient_semigroup(SemigroupClass.IORD, 4, 3)
    table = engine.ProductTable(S)
    elements = S.elements
    for i in range(0, len(S), 7):
        for j in range(0, len(S), 5):
            assert elements[table.table[i, j]] == compose(elements[i], elements[j])
    everything = np.ones(len(S), dtype=bool)
    assert table.is_closed(everything)
    generated = table.closure_mask(table.mask_of(claimed(Side.IORD, 4, 3)))
    assert generated.all()
    with raises(ResourceCapError):
        engine.ProductTable(S, get_settings(table_limit=10))


def test_escaping_product():
    S = engine.ambient_semigroup(SemigroupClass.PORD, 4, 3)
    table = engine.ProductTable(S)
    mask = table.mask_of([ChainMap.parse("n=4:[0,1,2,3]")])
    i, j = table.escaping_product(mask)
    assert not mask[table.table[i, j]]


def test_iord_rank_at_large_r():
    for n, r, rank in [(4, 3, 10), (5, 4, 17)]:
        iord = engine.ambient_semigroup(SemigroupClass.IORD, n, r)
        found = set(engine.undecomposables(iord))
        claimed_set = set(claimed(Side.IORD, n, r))
        singletons = set(families.family(n, r, FamilyLabel.GIC_K, k=2).elements)
        assert found == claimed_set - singletons
        assert len(found) == rank
        assert engine.rank_if_determined(iord) == rank


def test_pord_idempotents_are_undecomposable():
    pord = engine.ambient_semigroup(SemigroupClass.PORD, 5, 4)
    found = set(engine.undecomposables(pord))
    assert set(families.family(5, 4, FamilyLabel.E_R).elements) <= found


def test_streamed_undecomposables_match_the_table():
    S = engine.ambient_semigroup(SemigroupClass.PORD, 4, 3)
    from_table = engine.undecomposables(S)
    settings = get_settings(table_limit=1, chunk_cells=100)
    streamed = engine.undecomposables(S, settings)
    assert from_table == streamed


def test_gamma_criteria():
    for n in (4, 5):
        for q in range(3, n + 1):
            for p in range(1, q - 1):
                assert engine.check_gamma_undecomposable(n, p, q, "pord")
        for p, q in families.g_parameters(n):
            assert engine.check_gamma_undecomposable(n, p, q, "iord")
    assert not engine.check_gamma_undecomposable(5, 1, 5, "iord")


def test_is_decomposition():
    target = families.gamma_rs(9, 5, 5, 7, 1)
    left = ChainMap.partial_identity(9, [5, 7, 8])
    right = ChainMap.from_pairs(9, {5: 5, 6: 4, 7: 7, 8: 6})
    assert engine.is_decomposition(target, left, right, SemigroupClass.IORD, 5)
    assert not engine.is_decomposition(target, target, target, SemigroupClass.IORD, 5)
    assert not engine.is_decomposition(target, left, right, SemigroupClass.IORD, 3)


def test_from_elements():
    S = engine.ambient_semigroup(SemigroupClass.IORD, 4, 3)
    again = engine.SemigroupSet.from_elements(list(reversed(S.elements)))
    assert again == S
    assert again.elements == S.elements
    assert len(again.generators) == len(S)
