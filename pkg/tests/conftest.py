import os

import pytest
from hypothesis import settings

from nmtprep.fixtures import make_corpus

settings.register_profile("fast", max_examples=20)
settings.register_profile("thorough", max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

TOY_VOCAB = {"low": 5, "lower": 2, "newest": 6, "widest": 3}


@pytest.fixture(scope="session")
def desk_corpus():
    return make_corpus(1000, seed=11)


@pytest.fixture
def write(tmp_path):
    """Write lines to a file under tmp_path and return its path as str."""

    def _write(name, lines):
        path = tmp_path / name
        path.write_bytes("".join(line + "\n" for line in lines).encode("utf-8"))
        return str(path)

    return _write


# filled by tests/test_acceptance.py, echoed after the run even without -s
VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS, key=lambda v: int(v.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
