from pathlib import Path

import pytest

from reviewgram.corpus import ingest_csv
from reviewgram.textprep import PipelineConfig, preprocess

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    key = (marker.args[0], marker.args[1])
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _ACCEPTANCE[key] = _ACCEPTANCE.get(key, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (n, title), ok in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def fixture_csv():
    return FIXTURES / "reviews_200.csv"


@pytest.fixture(scope="session")
def fixture_jsonl():
    return FIXTURES / "reviews_200.jsonl"


@pytest.fixture(scope="session")
def fixture_corpus(fixture_csv):
    return ingest_csv(fixture_csv)


@pytest.fixture(scope="session")
def pipeline():
    return PipelineConfig()


@pytest.fixture(scope="session")
def fixture_sentences(fixture_corpus, pipeline):
    return [s for r in fixture_corpus.records for s in preprocess(r, pipeline)]
