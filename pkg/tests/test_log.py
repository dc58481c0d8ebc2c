"""Tests for logging setup."""

import logging

from hybridtele.log import get_logger, set_verbosity


class TestGetLogger:
    def test_returns_logger_with_module_name(self):
        logger = get_logger("hybridtele.services.fock")
        assert logger.name == "hybridtele.services.fock"
        assert isinstance(logger, logging.Logger)

    def test_default_level_is_warning(self):
        logger = get_logger("hybridtele.test")
        assert logger.getEffectiveLevel() == logging.WARNING

    def test_second_call_adds_no_handler(self):
        first = get_logger("hybridtele.test.handlers")
        second = get_logger("hybridtele.test.handlers")
        assert first is second
        assert len(second.handlers) == 1


class TestSetVerbosity:
    def teardown_method(self):
        set_verbosity(0)

    def test_single_v_selects_info(self):
        logger = get_logger("hybridtele.test.verbose")
        set_verbosity(1)
        assert logger.level == logging.INFO

    def test_double_v_selects_debug(self):
        logger = get_logger("hybridtele.test.verbose")
        set_verbosity(2)
        assert logger.level == logging.DEBUG

    def test_foreign_loggers_untouched(self):
        foreign = logging.getLogger("someone.else")
        foreign.setLevel(logging.ERROR)
        set_verbosity(2)
        assert foreign.level == logging.ERROR
