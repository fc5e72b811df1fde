import json
import os
import sys

import pytest

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)

_ORACLES = None
CRITERIA: dict[int, tuple[bool, str]] = {}


def oracle_data() -> dict:
    global _ORACLES
    if _ORACLES is None:
        with open(os.path.join(HERE, "data", "oracles.json")) as fh:
            _ORACLES = json.load(fh)
    return _ORACLES


@pytest.fixture(scope="session")
def oracles():
    return oracle_data()


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        ok, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
