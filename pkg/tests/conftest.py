import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None)
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(verdicts):
        terminalreporter.write_line(verdicts[num])
    missing = [n for n in range(1, 11) if n not in verdicts]
    for num in missing:
        terminalreporter.write_line(f"criterion {num:2d}: FAIL  (did not complete)")
