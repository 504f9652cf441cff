import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from qcluster.cc import Verifier
from qcluster.cli import data_path
from qcluster.cluster import IceQuiver, explore, load_quiver, pair_from_quiver

settings.register_profile(
    "qcluster",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qcluster")

# principal framings used by the end-to-end checks: name -> (n, principal arrows)
FRAMED = {
    "A2": (2, [(1, 2)]),
    "A3": (3, [(1, 2), (2, 3)]),
    "K2": (2, [(1, 2), (1, 2)]),
}
DEPTH = 6


@pytest.fixture(scope="session")
def a2():
    return load_quiver(data_path("a2_coefficients.quiver"))


@pytest.fixture(scope="session")
def e6():
    return load_quiver(data_path("e6_affine.quiver"))


@pytest.fixture(scope="session")
def golden_a2():
    return json.loads(Path(data_path("golden_a2.json")).read_text())


@pytest.fixture(scope="session")
def golden_e6():
    return json.loads(Path(data_path("golden_e6.json")).read_text())


class Ball:
    """Seeds and distinct mutable cluster variables within the mutation depth."""

    def __init__(self, name):
        n, arrows = FRAMED[name]
        self.name = name
        self.quiver = IceQuiver.principal_framing(n, arrows)
        self.pair = pair_from_quiver(self.quiver)
        self.seeds = explore(self.pair, DEPTH)
        seen = {}
        for seed in self.seeds.values():
            for x in seed.vars[:n]:
                seen.setdefault(x, None)
        self.variables = list(seen)
        self.verifier = Verifier(self.quiver, self.pair, seed=0)
        self._records = None

    def records(self):
        if self._records is None:
            self._records = [self.verifier.verify_cluster_variable(x) for x in self.variables]
        return self._records


@pytest.fixture(scope="session")
def balls():
    return {name: Ball(name) for name in FRAMED}


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: (len(k), k)):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
