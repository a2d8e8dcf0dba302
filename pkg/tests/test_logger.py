"""Tests for logger configuration branches."""

from opengov_liesphere import config as cfg
from opengov_liesphere.utils.logger import get_logger


def test_get_logger_console_format(monkeypatch) -> None:
    monkeypatch.setattr(cfg.settings, "log_format", "console")
    logger = get_logger(__name__)
    logger.warning("console message", dim=3)


def test_get_logger_json_format(monkeypatch) -> None:
    monkeypatch.setattr(cfg.settings, "log_format", "json")
    monkeypatch.setattr(cfg.settings, "log_level", "debug")
    logger = get_logger(__name__)
    logger.debug("json message", residual=1e-9)
