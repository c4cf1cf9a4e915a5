import pytest

from mintropy.dataset import generate_fig1_dataset, random_dataset


@pytest.fixture
def fig1():
    return generate_fig1_dataset()


@pytest.fixture(params=[1, 2, 3])
def small_random(request):
    return random_dataset(request.param, n_rows=60, n_features=4, n_classes=3)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdicts(request):
    """List that acceptance tests append ``(number, title, ok)`` to."""
    return request.config.stash.setdefault(_VERDICTS, [])


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(_VERDICTS, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok in sorted(rows):
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
