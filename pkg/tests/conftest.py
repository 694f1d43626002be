import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from stegosonic.payload import CompressionLevel, PayloadKind, seal  # noqa: E402

from helpers import PASSWORD  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def password():
    return PASSWORD


@pytest.fixture
def small_sealed():
    return seal(b"a short secret document", PASSWORD, CompressionLevel.MEDIUM, PayloadKind.TEXT)



_verdicts = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    ok = rep.passed if rep.when == "call" else False
    prev = _verdicts.get(n, (title, True))
    _verdicts[n] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_verdicts):
        title, ok = _verdicts[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
