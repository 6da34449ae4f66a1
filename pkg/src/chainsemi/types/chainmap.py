"""Support for ChainMaps in Pydantic models and numpy arrays

`ChainMapField` is a `ChainMap` annotated so that pydantic reads and
writes it in the canonical text form ``n=<n>:[i1,...,in]``:
```
from chainsemi.types.chainmap import ChainMapField

class Report(BaseModel):
    element: ChainMapField
```

The word helpers convert between lists of maps and ``(count, n)`` integer
arrays. A word is packed into one integer code by reading it as a number
in base ``n + 1``, so sorting codes sorts the maps canonically.
"""

from __future__ import annotations

from typing import Annotated, Any, Iterable, List

import numpy as np
from pydantic import PlainSerializer, PlainValidator, WithJsonSchema

from ..exceptions import DomainError
from ..transforms import ChainMap

CHAINMAP_PATTERN = r"^n=[0-9]+:\[[0-9]*(,[0-9]+)*\]$"


def to_chainmap(value: Any) -> ChainMap:
    """Accept a ChainMap, its text form, or a ``{"n": ..., "img": [...]}`` dict"""
    if isinstance(value, ChainMap):
        return value
    if isinstance(value, str):
        return ChainMap.parse(value)
    if isinstance(value, dict) and {"n", "img"} <= set(value):
        return ChainMap(value["n"], value["img"])
    raise DomainError(f"Cannot interpret {value!r} as a ChainMap")


ChainMapField = Annotated[
    ChainMap,
    PlainValidator(to_chainmap),
    PlainSerializer(str, when_used="json-unless-none"),
    WithJsonSchema({"type": "string", "pattern": CHAINMAP_PATTERN}),
]


def code_powers(n: int) -> np.ndarray:
    """Place values of each word position, most significant first."""
    return (n + 1) ** np.arange(n - 1, -1, -1, dtype=np.int64)


def maps_to_words(maps: Iterable[ChainMap], n: int) -> np.ndarray:
    words = np.array([m.img for m in maps], dtype=np.int64)
    return words.reshape(-1, n)


def words_to_maps(words: np.ndarray) -> List[ChainMap]:
    n = words.shape[1]
    return [ChainMap(n, row) for row in words.tolist()]


def encode_words(words: np.ndarray) -> np.ndarray:
    n = words.shape[1]
    return words.astype(np.int64) @ code_powers(n)


def decode_codes(codes: np.ndarray, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return (codes[:, None] // code_powers(n)[None, :]) % (n + 1)


def encode_map(a: ChainMap) -> int:
    return int(np.dot(np.asarray(a.img, dtype=np.int64), code_powers(a.n)))
