from collections import defaultdict

# criterion id -> list of (ok, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, list[tuple[str, str]]] = defaultdict(list)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        entries = ACCEPTANCE[crit]
        states = {state for state, _ in entries}
        overall = "FAIL" if "FAIL" in states else ("PASS (soft band missed)" if "SOFT" in states else "PASS")
        tr.write_line(f"[{overall}] criterion {crit}")
        for state, detail in entries:
            tr.write_line(f"      {state:4s} {detail}")
