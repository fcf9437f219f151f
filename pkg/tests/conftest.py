import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

small_rationals = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


@st.composite
def sparse_dense(draw, max_rows=6, max_cols=6):
    """Dense rational matrix with plenty of zeros."""
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    entry = st.one_of(st.just(Fraction(0)), st.just(Fraction(0)), small_rationals)
    return [[draw(entry) for _ in range(c)] for _ in range(r)]


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("NCCHERN_CACHE", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
