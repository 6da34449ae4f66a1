from __future__ import annotations

from typing import List

import numpy as np
from pydantic import BaseModel, ValidationError
from pytest import raises

from chainsemi.transforms import ChainMap
from chainsemi.types.chainmap import (
    ChainMapField,
    decode_codes,
    encode_map,
    encode_words,
    maps_to_words,
    to_chainmap,
    words_to_maps,
)


class Model(BaseModel):
    a: ChainMapField
    others: List[ChainMapField] = []


def test_chainmap_field():
    m = Model(a="n=3:[1,0,2]", others=[ChainMap.identity(2)])
    assert isinstance(m.a, ChainMap)
    assert m.a == ChainMap(3, [1, 0, 2])
    assert m.model_dump(mode="json") == {"a": "n=3:[1,0,2]", "others": ["n=2:[1,2]"]}
    assert Model.model_validate_json(m.model_dump_json()) == m
    schema = m.model_json_schema()
    assert schema["properties"]["a"]["type"] == "string"


def test_chainmap_field_accepts_dicts():
    m = Model(a={"n": 2, "img": [1, 1]})
    assert m.a == ChainMap(2, [1, 1])


def test_chainmap_field_rejects_garbage():
    with raises(ValidationError):
        Model(a=42)
    with raises(ValidationError):
        Model(a="n=2:[3,3]")


def test_to_chainmap_passes_maps_through():
    a = ChainMap.identity(3)
    assert to_chainmap(a) is a


def test_words_and_codes():
    maps = [ChainMap(3, [1, 0, 2]), ChainMap(3, [0, 0, 1])]
    words = maps_to_words(maps, 3)
    assert words.shape == (2, 3)
    assert words_to_maps(words) == maps
    codes = encode_words(words)
    assert codes.tolist() == [1 * 16 + 0 * 4 + 2, 1]
    assert encode_map(maps[0]) == codes[0]
    assert np.array_equal(decode_codes(codes, 3), words)


def test_code_order_is_canonical_order():
    maps = sorted(
        [ChainMap(3, [1, 0, 2]), ChainMap(3, [0, 2, 3]), ChainMap(3, [0, 2, 1])]
    )
    codes = encode_words(maps_to_words(maps, 3))
    assert np.all(np.diff(codes) > 0)


def test_empty_word_list():
    assert maps_to_words([], 4).shape == (0, 4)
