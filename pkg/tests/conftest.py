from pathlib import Path

import numpy as np
import pytest

from psokmeans.dataset import load_csv
from psokmeans.toy import toy_dataset

ROOT = Path(__file__).resolve().parent.parent
WINE_CSV = ROOT / "data" / "wine.csv"


@pytest.fixture(scope="session")
def wine():
    return load_csv(WINE_CSV, label_column=0)


@pytest.fixture
def toy():
    return toy_dataset()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def report(number, title, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{desc} [{'ok' if passed else 'FAILED'}]" for desc, passed in checks)
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {title}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
