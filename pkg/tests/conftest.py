import functools

import pytest

from mathieu_lattice._accel import HAVE_NUMBA
from mathieu_lattice.spectrum import spectral_basis

BACKENDS = ["numpy"] + (["numba"] if HAVE_NUMBA else [])


@functools.lru_cache(maxsize=None)
def cached_basis(q, J):
    return spectral_basis(q, J)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
