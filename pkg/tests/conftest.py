import pytest
from hypothesis import HealthCheck, settings

from maintlm.ingest import MaintenanceRecord

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# Table 1 rows: e, f, Time(e), Time(f)
TABLE1 = [
    ("r1", 5, 5, 17, 8),
    ("r2", 11, 9, 23, 20),
    ("r3", 5, 8, 24, 13),
    ("r4", 4, 5, 10, 16),
]
TABLE1_CSV = "period,enhancements,corrections,days_enh,days_corr\n" + "".join(
    f"{p},{e},{f},{de},{df}\n" for p, e, f, de, df in TABLE1
)


@pytest.fixture
def table1_records():
    return [MaintenanceRecord(p, e, f, float(de), float(df)) for p, e, f, de, df in TABLE1]


@pytest.fixture
def table1_csv():
    return TABLE1_CSV


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def detail(request):
    """Lets an acceptance test attach a one-line summary of what it measured."""
    notes = []
    request.node.acceptance_notes = notes
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call":
        return
    notes = "; ".join(getattr(item, "acceptance_notes", []))
    if rep.failed:
        last = str(rep.longrepr).strip().splitlines()[-1]
        notes = f"{notes}; {last}" if notes else last
    ACCEPTANCE_RESULTS[marker.args[0]] = (rep.passed, notes)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0][2:])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
