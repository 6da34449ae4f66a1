import pytest
from pytest import raises

from chainsemi import enumeration, families
from chainsemi.exceptions import DomainError
from chainsemi.factorize import factorize_iord, factorize_pord, observations
from chainsemi.families import Regime
from chainsemi.transforms import ChainMap, SemigroupClass, classify, compose
from chainsemi.types.chainmap import words_to_maps


def multiply(f):
    return compose(compose(f.beta, f.gamma), f.delta)


def test_small_regime_example():
    a = ChainMap.parse("n=7:[0,0,3,0,5,0,4]")
    f = factorize_pord(a, 4)
    assert f.beta == ChainMap.from_pairs(7, {3: 3, 5: 5, 7: 6})
    assert f.gamma == ChainMap.from_pairs(7, {3: 3, 5: 5, 6: 4})
    assert f.delta == ChainMap.partial_identity(7, [3, 4, 5])
    assert (f.m, f.p, f.s, f.t) == (4, 3, 1, 3)
    assert f.values == [3, 5, 4]
    assert not f.rotated
    assert f.regime == Regime.SMALL
    assert f.gamma_source.kind == "H"
    assert f.gamma_source.map == families.gamma_rs(7, 4, 3, 5, 1)
    assert f.verified
    assert multiply(f) == a
    assert observations(f).all_hold


def test_injective_example():
    a = families.gamma_rs(9, 5, 5, 7, 1)
    f = factorize_iord(a, 5)
    assert f.beta == ChainMap.partial_identity(9, [5, 7, 8])
    assert f.delta == ChainMap.partial_identity(9, [5, 6, 7])
    assert f.gamma == a
    assert f.beta_order_preserving


def test_rotated_split():
    a = ChainMap.parse("n=5:[0,0,3,2,1]")
    f = factorize_pord(a, 3)
    assert f.rotated
    assert (f.m, f.p, f.s) == (2, 1, 1)
    assert f.blocks == [[], [3], [4], [5]]
    assert f.beta == ChainMap.from_pairs(5, {3: 3, 4: 4, 5: 1})
    assert f.gamma == ChainMap.from_pairs(5, {1: 1, 3: 3, 4: 2})
    assert not f.beta_order_preserving
    assert f.gamma_source.map == families.gamma_rs(5, 3, 1, 3, 1)
    large = factorize_pord(a, 4)
    assert large.regime == Regime.LARGE
    assert large.gamma_source.kind == "G"
    assert large.gamma_source.map == families.gamma(5, 1, 3)
    assert multiply(large) == a


def test_factorize_rejects_maps_outside_the_class():
    with raises(DomainError):
        factorize_pord(ChainMap.parse("n=4:[0,2,1,0]"), 3)
    with raises(DomainError):
        factorize_pord(ChainMap.parse("n=5:[0,2,1,4,0]"), 2)
    with raises(DomainError):
        factorize_iord(ChainMap.parse("n=5:[0,0,3,3,1]"), 3)


@pytest.mark.parametrize("n, r", [(5, 3), (5, 4), (6, 3), (6, 4), (6, 5)])
def test_every_reversing_map_factorizes(n, r):
    words = enumeration.enumerate_words(n, SemigroupClass.PORD_STAR, r)
    profile = enumeration.profile_words(words)
    sources = set(families.claimed_generators("pord", n, r).elements)
    for a in words_to_maps(words[profile.image_size >= 3]):
        f = factorize_pord(a, r)
        assert multiply(f) == a
        assert observations(f).all_hold, a
        assert f.gamma_source.map in sources
        assert classify(f.beta).member_of(SemigroupClass.POPD)
        assert classify(f.delta).member_of(SemigroupClass.PC)
        if classify(a).injective:
            g = factorize_iord(a, r)
            assert classify(g.beta).member_of(SemigroupClass.IOPD)
            assert classify(g.delta).member_of(SemigroupClass.IC)
