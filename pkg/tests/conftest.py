from __future__ import annotations

import pytest

from csrdigest.demo import certificate_bytes, load_certificate

_ACCEPTANCE: list[tuple[str, str, str]] = []


@pytest.fixture
def cert():
    return load_certificate()


@pytest.fixture
def cert_bytes():
    return certificate_bytes()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and (
        report.when == "call" or (report.when == "setup" and report.outcome != "passed")
    ):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        detail = dict(item.user_properties).get("detail", "")
        _ACCEPTANCE.append((label, report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for label, outcome, detail in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        line = f"{mark}  {label}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
