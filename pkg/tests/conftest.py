import pytest

from storageplan import instances


@pytest.fixture(scope="session")
def m1():
    return instances.m1()


@pytest.fixture(scope="session")
def m2():
    return instances.m2()


@pytest.fixture(scope="session")
def m2_outer():
    return instances.m2_outer()


@pytest.fixture(scope="session")
def neglmp():
    return instances.neglmp()


_CACHE = {}


@pytest.fixture(scope="session")
def rand_instance():
    """Memoized access to seeded random instances (generation solves LPs)."""
    def get(seed, **kwargs):
        key = (seed, tuple(sorted(kwargs.items())))
        if key not in _CACHE:
            _CACHE[key] = instances.random_instance(seed, **kwargs)
        return _CACHE[key]
    return get
