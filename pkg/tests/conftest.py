import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, text): acceptance criterion identifier and summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    cid = getattr(report, "criterion", None)
    if cid is None:
        return
    key, text = cid
    prev = _criteria.get(key)
    ok = report.passed
    _criteria[key] = (text, ok if prev is None else (prev[1] and ok))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = (str(mark.args[0]), mark.args[1] if len(mark.args) > 1 else "")


def _number(key):
    return int("".join(ch for ch in key if ch.isdigit()) or 0)


def pytest_terminal_summary(terminalreporter):
    """One line per criterion, followed by its clauses when it has more than one."""
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    groups = {}
    for key in sorted(_criteria, key=lambda k: (_number(k), k)):
        groups.setdefault(_number(key), []).append(key)
    for num, keys in groups.items():
        ok = all(_criteria[k][1] for k in keys)
        terminalreporter.write_line(f"criterion {num:<3d} {'PASS' if ok else 'FAIL'}")
        for key in keys:
            text, clause_ok = _criteria[key]
            terminalreporter.write_line(f"    {key:4s} {'PASS' if clause_ok else 'FAIL'}  {text}")
