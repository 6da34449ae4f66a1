import logging

from pydantic import ValidationError
from pytest import raises

from chainsemi.reports import (
    CountReport,
    ElementListReport,
    Envelope,
    LogRecordModel,
    Quantity,
)
from chainsemi.transforms import ChainMap


def test_count_report_compare():
    report = CountReport.compare(15, 15, n=4, r=1, quantity=Quantity.IDEMPOTENTS)
    assert report.match
    report = CountReport.compare(15, 32, n=4, r=1, quantity="idempotents")
    assert not report.match
    assert report.quantity == Quantity.IDEMPOTENTS
    report = CountReport.compare(7, None, n=4, quantity=Quantity.CLASS_SIZE)
    assert report.match
    report = CountReport.compare(7, 7, extra_ok=False, n=4, quantity=Quantity.RANK)
    assert not report.match


def test_count_report_cannot_claim_a_false_match():
    with raises(ValidationError):
        CountReport(
            n=4,
            quantity=Quantity.RANK,
            enumerated_count=10,
            formula_value=12,
            match=True,
        )


def test_envelope():
    report = ElementListReport(
        description="two maps",
        count=2,
        elements=[ChainMap.identity(2), ChainMap.empty(2)],
    )
    document = Envelope(command="undecomposables", result=report).to_json_dict()
    assert document["schema"] == 1
    assert document["command"] == "undecomposables"
    assert document["result"]["elements"] == ["n=2:[1,2]", "n=2:[0,0]"]


def closure_record(msg, args):
    return logging.LogRecord(
        name="chainsemi.closure",
        level=logging.DEBUG,
        pathname="chainsemi/closure.py",
        lineno=340,
        msg=msg,
        args=args,
        exc_info=None,
    )


def test_log_record_model():
    record = closure_record("Closure round %d: %d new", (3, 17))
    m = LogRecordModel.model_validate(record)
    assert m.name == "chainsemi.closure"
    assert m.levelname == "DEBUG"
    assert m.message == "Closure round 3: 17 new"
    assert m.filename == "closure.py"


def test_log_record_with_a_bad_format_still_validates():
    """One bad log call must not stop a check report from serialising."""
    record = closure_record("Closure round %d", (3, 17))
    m = LogRecordModel.model_validate(record)
    assert m.message.startswith("Error constructing message")
