import pytest

# criterion number -> (description, passed, detail), filled by
# tests/test_acceptance.py through the record_criterion fixture
ACCEPTANCE = {}


@pytest.fixture
def record_criterion():
    def rec(num, desc, passed, detail=""):
        ACCEPTANCE[num] = (desc, bool(passed), str(detail))
        return bool(passed)
    return rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(ACCEPTANCE):
        desc, ok, detail = ACCEPTANCE[num]
        line = "criterion %d (%s): %s" % (num, desc,
                                          "PASS" if ok else "FAIL")
        if detail:
            line += " [%s]" % detail
        terminalreporter.write_line(line)
