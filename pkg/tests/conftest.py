import logging

import pytest


@pytest.fixture(autouse=True)
def _restore_package_logger():
    # the CLI reconfigures the package logger; undo it so caplog keeps working
    log = logging.getLogger("proca_casimir")
    saved = (list(log.handlers), log.level, log.propagate)
    yield
    log.handlers[:], log.level, log.propagate = saved[0], saved[1], saved[2]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
