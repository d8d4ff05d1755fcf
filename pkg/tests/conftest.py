import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# filled by test_acceptance; one line per criterion in the terminal summary
ACCEPTANCE = {}


def record_criterion(number, ok, detail):
    prev = ACCEPTANCE.get(number)
    if prev is not None:
        ok = ok and prev[0]
        detail = prev[1] + "; " + detail
    ACCEPTANCE[number] = (bool(ok), detail)
    print(f"CRITERION {number}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def default_actions():
    from resolab.action import action_derivatives
    from resolab.model import default_model

    return action_derivatives(default_model())
