import pytest

from _support import TOY_TEXT, RESULTS, corpus, toy_alpha
from pbrminer.dataset import parse_fimi


@pytest.fixture
def toy():
    return parse_fimi(TOY_TEXT)


@pytest.fixture
def toy_a():
    return toy_alpha()


@pytest.fixture(scope="session")
def small_corpus():
    return corpus()


@pytest.fixture
def toy_path(tmp_path):
    p = tmp_path / "toy.dat"
    p.write_text(TOY_TEXT)
    return p


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, elapsed, detail in RESULTS:
        tag = "PASS" if ok else "FAIL"
        extra = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"[{tag}] {name}: {elapsed:.2f}s{extra}")
