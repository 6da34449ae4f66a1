from pydantic import ValidationError
from pytest import raises

from chainsemi.settings import ChainsemiSettings, get_settings, resolve


def test_defaults(monkeypatch):
    monkeypatch.delenv("CHAINSEMI_CAP", raising=False)
    settings = get_settings()
    assert settings.cap == 8
    assert settings.table_limit == 10_000
    assert settings.workers >= 1


def test_environment(monkeypatch):
    monkeypatch.setenv("CHAINSEMI_CAP", "6")
    monkeypatch.setenv("CHAINSEMI_WORKERS", "2")
    settings = get_settings()
    assert settings.cap == 6
    assert settings.workers == 2


def test_overrides_beat_the_environment(monkeypatch):
    monkeypatch.setenv("CHAINSEMI_CAP", "6")
    assert get_settings(cap=7).cap == 7
    assert get_settings(cap=None).cap == 6


def test_bad_values():
    with raises(ValidationError):
        get_settings(cap=0)
    with raises(ValidationError):
        get_settings(workers=0)


def test_resolve():
    settings = ChainsemiSettings(cap=5)
    assert resolve(settings) is settings
    assert isinstance(resolve(None), ChainsemiSettings)
