"""Tests for logging utilities."""

import logging
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest
from rich.logging import RichHandler

from llm_orchestrator.utils.logging import NOISY_LOGGERS, get_logger, setup_logging


class TestSetupLogging:
    """Test setup_logging function."""

    @patch("llm_orchestrator.utils.logging.logging.basicConfig")
    def test_setup_logging_default(self, mock_basic_config: MagicMock) -> None:
        """Test setup_logging with default parameters."""
        handlers = setup_logging()

        mock_basic_config.assert_called_once()
        call_kwargs = mock_basic_config.call_args[1]
        assert call_kwargs["level"] == logging.INFO
        assert "%(asctime)s" in call_kwargs["format"]
        assert call_kwargs["force"] is True
        assert len(handlers) == 1
        assert type(handlers[0]) is logging.StreamHandler

    @pytest.mark.parametrize(
        ("level", "expected"),
        [("DEBUG", logging.DEBUG), ("warning", logging.WARNING), ("ERROR", logging.ERROR)],
    )
    @patch("llm_orchestrator.utils.logging.logging.basicConfig")
    def test_setup_logging_levels(
        self, mock_basic_config: MagicMock, level: str, expected: int
    ) -> None:
        """Test level names are case-insensitive."""
        setup_logging(level=level)
        assert mock_basic_config.call_args[1]["level"] == expected

    @patch("llm_orchestrator.utils.logging.logging.basicConfig")
    def test_setup_logging_custom_format(self, mock_basic_config: MagicMock) -> None:
        """Test setup_logging with custom format string."""
        custom_format = "%(levelname)s: %(message)s"
        setup_logging(format_string=custom_format)
        assert mock_basic_config.call_args[1]["format"] == custom_format

    @patch("llm_orchestrator.utils.logging.logging.basicConfig")
    def test_rich_console_and_file(self, mock_basic_config: MagicMock, tmp_path: Path) -> None:
        """Test the rich console handler and an extra file handler."""
        log_file = tmp_path / "logs" / "run.log"
        handlers = setup_logging(rich_console=True, log_file=log_file)
        try:
            assert isinstance(handlers[0], RichHandler)
            assert isinstance(handlers[1], logging.FileHandler)
            assert log_file.parent.is_dir()
        finally:
            handlers[1].close()

    @patch("llm_orchestrator.utils.logging.logging.basicConfig")
    def test_http_chatter_quieted(self, mock_basic_config: MagicMock) -> None:
        """Test per-request client and access loggers stay at WARNING unless debugging."""
        setup_logging(level="INFO")
        for name in NOISY_LOGGERS:
            assert logging.getLogger(name).level == logging.WARNING
        setup_logging(level="DEBUG")
        assert logging.getLogger("httpx").level == logging.DEBUG


class TestGetLogger:
    """Test get_logger function."""

    @patch("llm_orchestrator.utils.logging.logging.getLogger")
    def test_get_logger(self, mock_get_logger: MagicMock) -> None:
        """Test get_logger returns logger instance."""
        mock_logger = MagicMock(spec=logging.Logger)
        mock_get_logger.return_value = mock_logger

        logger = get_logger("llm_orchestrator.gateway.service")

        mock_get_logger.assert_called_once_with("llm_orchestrator.gateway.service")
        assert logger is mock_logger
