import logging

from pytest import raises

from chainsemi import maximal, suite
from chainsemi.exceptions import ParameterError
from chainsemi.reports import CheckStatus
from chainsemi.settings import get_settings

logger = logging.getLogger("chainsemi.tests")


def run_one(func, force_failure=False):
    registered = suite.RegisteredCheck(func, func.__name__, "")
    return suite.CheckRun(
        registered, 4, get_settings(), force_failure=force_failure
    ).run()


def test_check_decorator():
    @suite.check(name="always-fine", description="Nothing to see")
    def always_fine(n, settings):
        pass

    @suite.check
    def another_fine_check(n, settings):
        """First line of the docstring

        is the description."""

    try:
        assert suite.REGISTRY["always-fine"].func is always_fine
        assert suite.REGISTRY["always-fine"].description == "Nothing to see"
        registered = suite.REGISTRY["another-fine-check"]
        assert registered.description == "First line of the docstring"
    finally:
        suite.REGISTRY.pop("always-fine", None)
        suite.REGISTRY.pop("another-fine-check", None)


def test_passing_check_captures_its_log():
    def chatty(n, settings):
        logger.info("message 1")
        logger.warning("message 2")

    record = run_one(chatty)
    assert record.status == CheckStatus.PASSED
    assert [entry.message for entry in record.log] == ["message 1", "message 2"]
    assert record.log[1].levelname == "WARNING"


def test_failing_and_broken_checks():
    def wrong(n, settings):
        suite.require(1 + 1 == 3, "arithmetic is broken")

    def broken(n, settings):
        raise KeyError("oops")

    record = run_one(wrong)
    assert record.status == CheckStatus.FAILED
    assert record.detail == "arithmetic is broken"
    record = run_one(broken)
    assert record.status == CheckStatus.ERROR
    assert record.detail.startswith("KeyError")
    record = run_one(lambda n, settings: None, force_failure=True)
    assert record.status == CheckStatus.FAILED


def test_logger_level_is_restored():
    package_logger = logging.getLogger("chainsemi")
    before = package_logger.level
    run_one(lambda n, settings: None)
    assert package_logger.level == before


def test_suite_passes_at_n_4():
    report = suite.run_suite(4)
    failures = [
        (c.name, c.detail) for c in report.checks if c.status != CheckStatus.PASSED
    ]
    assert failures == []
    assert report.passed
    assert len(report.checks) == len(suite.REGISTRY)


def test_warnings_are_recorded():
    report = suite.run_suite(4)
    undecomposables = next(c for c in report.checks if c.name == "undecomposables")
    assert any("decomposable" in entry.message for entry in undecomposables.log)
    idempotents = next(c for c in report.checks if c.name == "idempotent-counts")
    assert any(entry.levelname == "WARNING" for entry in idempotents.log)
    properties = next(c for c in report.checks if c.name == "map-properties")
    assert any("endpoints" in entry.message for entry in properties.log)


def test_forced_failure():
    report = suite.run_suite(4, fail_check="structure")
    assert not report.passed
    statuses = {c.name: c.status for c in report.checks}
    assert statuses["structure"] == CheckStatus.FAILED
    assert statuses["h-table"] == CheckStatus.PASSED


def test_unknown_check():
    with raises(ParameterError):
        suite.run_suite(4, fail_check="no-such-check")


def test_iord_maximality_failures_fail_the_check(monkeypatch):
    registered = suite.REGISTRY["maximal-subsemigroups"]
    record = suite.CheckRun(registered, 5, get_settings()).run()
    assert record.status == CheckStatus.PASSED

    verify_all = maximal.verify_all

    def break_hi(ambient, settings=None):
        return [
            rep.model_copy(update={"maximal": False})
            if rep.descriptor.variant.kind == "remove-HI"
            else rep
            for rep in verify_all(ambient, settings)
        ]

    monkeypatch.setattr(maximal, "verify_all", break_hi)
    record = suite.CheckRun(registered, 5, get_settings()).run()
    assert record.status == CheckStatus.FAILED
