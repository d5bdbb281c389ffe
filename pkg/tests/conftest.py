ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d} {name}: {'PASS' if ok else 'FAIL'} {detail}")
