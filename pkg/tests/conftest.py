import pytest

from dypp.game_model import ActionGrids, DOProfile, EconParams, LossModelParams


@pytest.fixture
def grids():
    return ActionGrids()


@pytest.fixture
def econ():
    return EconParams()


@pytest.fixture
def loss_params():
    return LossModelParams()


@pytest.fixture
def profile():
    return DOProfile(c_n=0.5, beta_n=1.0)


@pytest.fixture
def tiny_grids():
    """Two price levels and two saving levels."""
    return ActionGrids(K=1, J=1, p_max=16.0, sigma_max=0.6)


_criteria: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    cid, text = mark.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    prev = _criteria.get(cid)
    ok = rep.passed and (prev is None or prev[0])
    _criteria[cid] = (ok, text, detail or (prev[2] if prev else ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria, key=str):
        ok, text, detail = _criteria[cid]
        line = f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {text}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
