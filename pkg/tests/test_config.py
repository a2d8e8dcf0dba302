"""Tests for configuration validators and defaults."""

import pytest
from pydantic import ValidationError

from opengov_liesphere.config import Settings, overridden, settings


def test_defaults() -> None:
    s = Settings(_env_file=None)
    assert s.quadric_tol == 1e-8
    assert s.cluster_tol == 1e-4
    assert s.dupin_yes_tol < s.dupin_no_tol
    assert s.richardson is True
    assert s.seed == 0
    assert s.log_format == "json"


def test_env_prefix(monkeypatch) -> None:
    monkeypatch.setenv("LIESPHERE_RANK_TOL", "1e-5")
    monkeypatch.setenv("LIESPHERE_LOG_FORMAT", "CONSOLE")
    s = Settings(_env_file=None)
    assert s.rank_tol == 1e-5
    assert s.log_format == "console"


@pytest.mark.parametrize("field", ["quadric_tol", "leaf_step", "witness_margin"])
def test_tolerances_must_be_positive(field: str) -> None:
    with pytest.raises(ValidationError):
        Settings(_env_file=None, **{field: 0.0})


def test_log_format_is_checked() -> None:
    with pytest.raises(ValidationError):
        Settings(_env_file=None, log_format="xml")


def test_overridden_restores_values() -> None:
    with overridden({"cluster-tol": 1e-3, "seed": 11}) as s:
        assert s is settings
        assert settings.cluster_tol == 1e-3
        assert settings.seed == 11
    assert settings.cluster_tol == 1e-4
    assert settings.seed == 0


def test_overridden_restores_after_error() -> None:
    with pytest.raises(RuntimeError):
        with overridden({"leaf_seeds": 5}):
            raise RuntimeError("boom")
    assert settings.leaf_seeds == 3


def test_overridden_rejects_unknown_and_invalid() -> None:
    with pytest.raises(ValueError, match="unknown settings: bogus"):
        with overridden({"bogus": 1}):
            pass
    with pytest.raises(ValueError):
        with overridden({"rank_tol": -1.0}):
            pass
    assert settings.rank_tol == 1e-6
