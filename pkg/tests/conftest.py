import time

import pytest

from flatbilliards import corpus, double

_RESULTS: dict = {}


@pytest.fixture(scope="session")
def exact_polygons():
    return corpus.all_polygons(exact=True)


@pytest.fixture(scope="session")
def float_polygons():
    return corpus.all_polygons(exact=False)


@pytest.fixture(scope="session")
def doubles(exact_polygons):
    return {name: double(p) for name, p in exact_polygons.items()}


@pytest.fixture(scope="session")
def float_doubles(doubles):
    return {name: s.as_float() for name, s in doubles.items()}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    t0 = time.perf_counter()
    yield
    item.user_properties.append(("seconds", time.perf_counter() - t0))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    n, title = mark.args
    secs = dict(item.user_properties).get("seconds", 0.0)
    # parametrized cases fold into one line: any failure fails the criterion
    _, ok, total = _RESULTS.get(n, (title, True, 0.0))
    _RESULTS[n] = (title, ok and rep.outcome == "passed", total + secs)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        title, ok, secs = _RESULTS[n]
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict}  {title}  ({secs:.1f} s)")
