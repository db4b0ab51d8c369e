import os
import time

import pytest

# (criterion, label, passed, detail) in the order checks ran
ACCEPTANCE_LINES: list[tuple[str, str, bool, str]] = []


@pytest.fixture
def acceptance():
    """Record one acceptance check; returns ``passed`` so tests can assert on it."""

    def record(criterion: str, label: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE_LINES.append((criterion, label, bool(passed), detail))
        return bool(passed)

    return record


@pytest.fixture(scope="session")
def full_sweep():
    """The default 2187-case sweep, run once per session.

    Set MAGNUS_ROD_SWEEP_REPORT to a JSON report from ``magnus-rod sweep`` to
    reuse it instead of recomputing.
    """
    from magnus_rod.bench import SweepSpec, load_report, run_benchmark

    cached = os.environ.get("MAGNUS_ROD_SWEEP_REPORT")
    if cached:
        return load_report(cached), 0.0
    start = time.perf_counter()
    report = run_benchmark(SweepSpec())
    return report, time.perf_counter() - start


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion, label, passed, detail in ACCEPTANCE_LINES:
        tr.write_line(f"[{'PASS' if passed else 'FAIL'}] {criterion:<4} {label}" + (f"  ({detail})" if detail else ""))
    failed = sum(not p for *_, p, _ in ACCEPTANCE_LINES)
    tr.write_line(f"{len(ACCEPTANCE_LINES) - failed}/{len(ACCEPTANCE_LINES)} acceptance checks passed")
