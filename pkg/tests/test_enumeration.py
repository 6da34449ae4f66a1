import math

import numpy as np
import pytest
from pytest import raises

from chainsemi import enumeration
from chainsemi.exceptions import ParameterError, ResourceCapError
from chainsemi.reports import Quantity
from chainsemi.settings import get_settings
from chainsemi.transforms import SemigroupClass, classify
from chainsemi.types.chainmap import words_to_maps


def test_prefix_words():
    words = enumeration.prefix_words(2)
    assert words.shape == (6, 2)
    assert np.all(words[:, 0] <= 1)
    assert np.all(words[:, 1] <= 2)
    assert enumeration.prefix_words(0).shape == (1, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_pd_has_factorial_size(n):
    words = enumeration.enumerate_words(n, SemigroupClass.PD)
    assert len(words) == math.factorial(n + 1)


def test_enumeration_is_read_only_and_sorted():
    words = enumeration.enumerate_words(4, SemigroupClass.PORD)
    assert not words.flags.writeable
    maps = words_to_maps(words)
    assert maps == sorted(maps)


def test_profile_matches_classify():
    words = enumeration.enumerate_words(5, SemigroupClass.PD)
    profile = enumeration.profile_words(words)
    for row, a in enumerate(words_to_maps(words)):
        expected = classify(a)
        for field in (
            "order_preserving",
            "order_reversing",
            "orientation_preserving",
            "orientation_reversing",
            "order_decreasing",
            "injective",
            "idempotent",
            "image_size",
        ):
            assert getattr(profile, field)[row] == getattr(expected, field), (a, field)


def test_class_masks_agree_with_member_of():
    words = enumeration.enumerate_words(5, SemigroupClass.PD)
    profile = enumeration.profile_words(words)
    maps = words_to_maps(words)
    for label in SemigroupClass:
        mask = enumeration.class_mask(profile, label)
        assert mask.tolist() == [classify(a).member_of(label) for a in maps], label


def test_r_bound():
    words = enumeration.enumerate_words(4, SemigroupClass.IORD, 2)
    assert all(a.rank <= 2 for a in words_to_maps(words))
    with raises(ParameterError):
        enumeration.enumerate_words(4, SemigroupClass.IORD, 5)


def test_small_pord_is_popd():
    pord = enumeration.enumerate_words(3, SemigroupClass.PORD)
    popd = enumeration.enumerate_words(3, SemigroupClass.POPD)
    assert np.array_equal(pord, popd)
    pord = enumeration.enumerate_words(5, SemigroupClass.PORD, 2)
    popd = enumeration.enumerate_words(5, SemigroupClass.POPD, 2)
    assert np.array_equal(pord, popd)


def test_cap():
    settings = get_settings(cap=4)
    with raises(ResourceCapError):
        enumeration.enumerate_words(5, SemigroupClass.PD, settings=settings)
    with raises(ParameterError):
        enumeration.enumerate_words(0, SemigroupClass.PD)


def test_all_words():
    words = enumeration.all_words(3)
    assert words.shape == (64, 3)
    assert len(np.unique(words, axis=0)) == 64
    with raises(ResourceCapError):
        enumeration.all_words(5, get_settings(cap=4))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_endpoint_test_over_all_maps(n):
    profile = enumeration.profile_words(enumeration.all_words(n))
    assert not enumeration.endpoint_mismatches(profile).any()


def test_endpoint_values():
    profile = enumeration.profile_words(np.array([[1, 0, 3, 2], [0, 0, 0, 0]]))
    assert profile.first_value.tolist() == [1, 0]
    assert profile.last_value.tolist() == [2, 0]
    assert not enumeration.endpoint_mismatches(profile).any()
    assert not profile.order_preserving[0]


def test_enumeration_with_one_worker():
    one = enumeration.enumerate_words(
        4, SemigroupClass.IORD, settings=get_settings(workers=1)
    )
    many = enumeration.enumerate_words(
        4, SemigroupClass.IORD, settings=get_settings(workers=3)
    )
    assert np.array_equal(one, many)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_idempotent_counts(n):
    for r in range(1, n + 1):
        report = enumeration.count_idempotents(n, r)
        assert report.match, report
        assert report.quantity == Quantity.IDEMPOTENTS
    assert enumeration.count_idempotents(n, 1).enumerated_count == 2**n - 1
    with raises(ParameterError):
        enumeration.count_idempotents(n, n + 1)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_max_reversing_image(n):
    report = enumeration.max_reversing_image(n)
    assert report.match, report.notes
    assert report.enumerated_count == n - n // 3


def test_max_reversing_image_above_cap():
    report = enumeration.max_reversing_image(9, get_settings(cap=5))
    assert report.match
    assert any("witness only" in note for note in report.notes)
    with raises(ParameterError):
        enumeration.max_reversing_image(3)


def test_count_class_size():
    report = enumeration.count_class_size(4, SemigroupClass.PD)
    assert report.match
    assert report.enumerated_count == 120
    assert report.formula_value == 120
    report = enumeration.count_class_size(4, SemigroupClass.IORD)
    assert report.formula_value is None
    assert report.match
