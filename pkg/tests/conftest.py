from collections import defaultdict

# criterion number -> list of (part, ok, detail), filled by test_acceptance.py
CRITERIA = defaultdict(list)


def record(criterion: int, part: str, ok: bool, detail: str = "") -> None:
    CRITERIA[criterion].append((part, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(CRITERIA):
        parts = CRITERIA[k]
        ok = all(good for _, good, _ in parts)
        shown = [p for p in parts if not p[1]] or parts
        summary = "; ".join(f"{name} ({detail})" if detail else name for name, _, detail in shown)
        tr.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {summary}")
