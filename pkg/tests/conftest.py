import random

import pytest
from hypothesis import HealthCheck, settings

from kronspan.fields import QQ, PrimeField
from kronspan.tensor import SparseTensor3

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

F101 = PrimeField(101)
BIG = PrimeField(2**61 - 1)


def random_tensor(dims, field, rng, density=1.0, cells=None):
    entries = {}
    coords = cells if cells is not None else [
        (i, j, k) for i in range(1, dims[0] + 1) for j in range(1, dims[1] + 1) for k in range(1, dims[2] + 1)
    ]
    for c in coords:
        if rng.random() > density:
            continue
        if field == QQ:
            v = QQ(rng.randint(-9, 9)) / rng.randint(1, 5)
        else:
            v = rng.randrange(field.p)
        entries[c] = v
    return SparseTensor3(dims, entries, field)


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
