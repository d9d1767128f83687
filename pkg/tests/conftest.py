import pytest

from pulsenet.network import all_to_all
from pulsenet.phase_model import LIFPhaseMap

FIG1A_PHASES = [0.1766, 0.4298, 0.4079, 0.7061]
FIG1B_PHASES = [0.4974, 0.2492, 0.8932, 0.8501]


@pytest.fixture(scope="session")
def lif():
    return LIFPhaseMap(1.05)


@pytest.fixture(scope="session")
def fig1_net():
    return all_to_all(4, 0.9, 0.6)


# acceptance criterion -> list of (test id, outcome), filled as tests finish
_CRITERIA: dict[int, list[tuple[str, str, str]]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    crit = props.get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(crit, []).append(
            (report.nodeid, report.outcome, str(props.get("detail", ""))))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_CRITERIA):
        results = _CRITERIA[crit]
        ok = all(outcome == "passed" for _, outcome, _ in results)
        terminalreporter.write_line(f"criterion {crit:2d}: {'PASS' if ok else 'FAIL'}")
        for nodeid, outcome, detail in results:
            line = f"    {nodeid.split('::')[-1]}: {outcome}"
            terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
