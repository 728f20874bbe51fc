import numpy as np
import pytest

from dualframe import corpus
from dualframe.hs import span_basis


def random_corpus(n=50, seed=2024):
    """50 random POVMs, d in {2, 3}, N in {5, ..., 9}, each with a full-rank ensemble."""
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(n):
        d = int(rng.choice([2, 3]))
        povm = corpus.random_povm(rng, d, int(rng.integers(5, 10)))
        cases.append((povm, corpus.random_ensemble(rng, d)))
    return cases


def named_corpus():
    z, tet, mub = corpus.z_povm(), corpus.tetrahedron_povm(), corpus.mub6_povm()
    return [
        ("z-plus", z, corpus.plus_ensemble()),
        ("z-skewed", z, corpus.skewed_ensemble()),
        ("tetra-mixed", tet, corpus.maximally_mixed(2)),
        ("tetra-skewed", tet, corpus.skewed_ensemble()),
        ("mub-mixed", mub, corpus.maximally_mixed(2)),
        ("mub-skewed", mub, corpus.skewed_ensemble()),
    ]


@pytest.fixture
def z():
    return corpus.z_povm()


@pytest.fixture
def tetra():
    return corpus.tetrahedron_povm()


@pytest.fixture
def mub():
    return corpus.mub6_povm()


@pytest.fixture
def skewed():
    return corpus.skewed_ensemble()


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(scope="session")
def rand_corpus():
    return [(p, e, span_basis(p)) for p, e in random_corpus()]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("ACCEPTANCE")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
