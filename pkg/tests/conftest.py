from pathlib import Path

import pytest

from clonehunt.evaluation import build_fixture20_clone
from clonehunt.graph import AttributeProfile, SocialGraph
from clonehunt.synthetic import build_fixture20

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixture20():
    return build_fixture20()


@pytest.fixture(scope="session")
def fixture20_clone():
    return build_fixture20_clone()


def make_graph(n, edges=(), interactions=(), likes=None, urls=None, names=None):
    """Small helper: nodes 0..n-1 with distinct placeholder names."""
    profiles = {
        i: AttributeProfile(name=(names[i] if names else f"user{i}"))
        for i in range(n)
    }
    return SocialGraph.build(profiles, edges, interactions, likes or {}, urls or {})


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def record(label: str, ok: bool, detail: str = ""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
