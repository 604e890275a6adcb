import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, with its measured detail."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::" not in getattr(rep, "nodeid", "") or rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" not in props:
                continue
            status = "PASS" if outcome == "passed" else "FAIL"
            lines.append((props["criterion"], f"[{status}] criterion {props['criterion']:>2}: {props.get('detail', '')}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
