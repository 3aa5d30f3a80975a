from collections import OrderedDict

import pytest

# criterion id -> list of (part, passed, detail)
_RESULTS = OrderedDict()


@pytest.fixture
def record():
    def _record(criterion, part, passed, detail):
        _RESULTS.setdefault(criterion, []).append((part, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion} {part}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion in sorted(_RESULTS, key=int):
        parts = _RESULTS[criterion]
        ok = all(p for _, p, _ in parts)
        failed = [name for name, p, _ in parts if not p]
        note = "all parts" if ok else "failed: " + ", ".join(failed)
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion} ({note})")
        for name, passed, detail in parts:
            tr.write_line(f"    {'ok  ' if passed else 'FAIL'} {name}: {detail}")
