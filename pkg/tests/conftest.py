import numpy as np
import pytest

from gesturepilot.cascade import load_cascade
from gesturepilot.skin import load_skin_model

from pathlib import Path

ASSETS = Path(__file__).resolve().parent.parent / "src" / "gesturepilot" / "assets"
FIXTURES = Path(__file__).resolve().parent / "fixtures"
SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

# test_acceptance.py records a measurement line per criterion here; the
# terminal summary below prints one verdict line for each, pass or fail.
ACCEPTANCE_DETAILS: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" in nodeid and "::" in nodeid:
                rows[nodeid.split("::")[-1]] = outcome
    if not rows:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(rows):
        verdict = "PASS" if rows[name] == "passed" else "FAIL"
        detail = ACCEPTANCE_DETAILS.get(name, "")
        suffix = f"  [{detail}]" if detail else ""
        terminalreporter.write_line(f"{verdict}  {name}{suffix}")


@pytest.fixture(scope="session")
def cascade():
    return load_cascade(ASSETS / "face_cascade.xml")


@pytest.fixture(scope="session")
def skin_model():
    return load_skin_model(ASSETS / "default_skin.skn")


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
