"""Pydantic models for everything chainsemi reports

These are what the CLI serialises. Maps inside them are written in the
canonical text form, via `ChainMapField`.
"""

from __future__ import annotations

import logging
from datetime import datetime
from enum import Enum
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .types.chainmap import ChainMapField

SCHEMA_VERSION = 1


class Quantity(str, Enum):
    IDEMPOTENTS = "idempotents"
    RN = "rn"
    HNR = "Hnr"
    CLASS_SIZE = "class-size"
    RANK = "rank"


class CountReport(BaseModel):
    """An enumerated count, next to the closed form it should equal.

    `match` is only ever true when the two agree (or there is no formula);
    checks that do more than compare two numbers may also set it false and
    say why in `notes`.
    """

    n: int
    r: Optional[int] = None
    quantity: Quantity
    label: Optional[str] = None
    enumerated_count: int
    formula_value: Optional[int] = None
    match: bool
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def match_agrees_with_counts(self) -> CountReport:
        if (
            self.match
            and self.formula_value is not None
            and self.formula_value != self.enumerated_count
        ):
            raise ValueError("A report cannot match when the counts differ")
        return self

    @classmethod
    def compare(
        cls,
        enumerated_count: int,
        formula_value: Optional[int],
        extra_ok: bool = True,
        **kwargs: Any,
    ) -> CountReport:
        agrees = formula_value is None or formula_value == enumerated_count
        return cls(
            enumerated_count=enumerated_count,
            formula_value=formula_value,
            match=agrees and extra_ok,
            **kwargs,
        )


class HTableRow(BaseModel):
    n: int
    r: int
    count: int


class FamilyReport(BaseModel):
    label: str
    n: int
    r: Optional[int] = None
    k: Optional[int] = None
    count: int
    formula_count: Optional[int] = None
    elements: List[ChainMapField]


class ClassifyReport(BaseModel):
    map: ChainMapField
    order_preserving: bool
    order_reversing: bool
    orientation_preserving: bool
    orientation_reversing: bool
    order_decreasing: bool
    injective: bool
    idempotent: bool
    image_size: int
    fix: List[int]
    kernel: List[List[int]]
    classes: List[str]
    opd: Optional[int] = None
    ord: Optional[int] = None


class ClosureReport(BaseModel):
    n: int
    size: int
    generator_count: int
    target: Optional[str] = None
    generated_target: Optional[bool] = None
    sample: List[ChainMapField]


class ElementListReport(BaseModel):
    description: str
    count: int
    elements: List[ChainMapField]


class LogRecordModel(BaseModel):
    """A captured log record, as it appears in a check report."""

    model_config = ConfigDict(from_attributes=True, extra="ignore")

    message: str
    levelname: str
    levelno: int
    lineno: int
    filename: str
    name: str
    created: datetime

    @model_validator(mode="before")
    @classmethod
    def attach_message(cls, data: Any):
        # LogRecord only gains .message once a handler formats it
        if isinstance(data, logging.LogRecord) and not hasattr(data, "message"):
            try:
                data.message = data.getMessage()
            except (ValueError, TypeError) as e:
                data.message = f"Error constructing message ({e}) from {data!r}."
        return data


class CheckStatus(Enum):
    PENDING = "pending"
    RUNNING = "running"
    PASSED = "passed"
    FAILED = "failed"
    ERROR = "error"


class CheckRecord(BaseModel):
    name: str
    description: str
    status: CheckStatus
    detail: Optional[str] = None
    seconds: float = 0.0
    log: List[LogRecordModel] = Field(default_factory=list)


class SuiteReport(BaseModel):
    n: int
    passed: bool
    checks: List[CheckRecord]


class Envelope(BaseModel):
    """The top-level JSON document written by every command."""

    schema_version: int = Field(SCHEMA_VERSION, serialization_alias="schema")
    command: str
    result: Any

    def to_json_dict(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)
