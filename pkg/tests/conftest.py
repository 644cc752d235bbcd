import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption("--run-long", action="store_true", help="run hours-long reproductions")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion this test checks")
    config._criteria = {}


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-long"):
        return
    skip = pytest.mark.skip(reason="long-running; pass --run-long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    state = item.config._criteria.setdefault(num, {"title": title, "status": "PASS", "secs": 0.0})
    if rep.when == "call":
        state["secs"] += rep.duration
    if rep.skipped and state["status"] == "PASS":
        state["status"] = "SKIP"
    elif rep.failed:
        state["status"] = "FAIL"


def pytest_terminal_summary(terminalreporter, config):
    crit = config._criteria
    if not crit:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(crit):
        c = crit[num]
        terminalreporter.write_line(f"criterion {num:>2}: {c['status']:<4} ({c['secs']:6.1f}s)  {c['title']}")
