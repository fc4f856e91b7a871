import pytest

# criterion id -> (passed, detail), filled in by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def record():
    def _record(key, passed, detail=''):
        ACCEPTANCE[key] = (bool(passed), detail)
        return bool(passed)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section('acceptance criteria')
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0][1:])):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(
            f"{'PASS' if passed else 'FAIL'} {key}: {detail}")
