import functools

import pytest

from heavyhex.circuits import Schedule, build_memory_experiment
from heavyhex.codes import build_code


@functools.lru_cache(maxsize=None)
def memory(kind: str, d: int, basis: str, s: int = 2, deflag: str = "decoder"):
    return build_memory_experiment(build_code(kind, d), Schedule.from_total(s, basis), deflag=deflag)


@pytest.fixture(scope="session")
def circuit_of():
    return memory
