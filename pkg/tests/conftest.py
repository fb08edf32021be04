import numpy as np
import pytest
from hypothesis import strategies as st

from bergman import _backend


def disk_points(max_radius=0.95):
    """Hypothesis strategy for complex points with modulus <= max_radius."""
    return st.builds(
        lambda r, a: complex(r * np.cos(a), r * np.sin(a)),
        st.floats(0.0, max_radius),
        st.floats(0.0, 2 * np.pi),
    )


@pytest.fixture(params=["cython", "python"])
def backend(request):
    """Run a test once per kernel backend (skips cython when it is not built)."""
    if request.param == "cython":
        try:
            from bergman import _kernels  # noqa: F401
        except ImportError:
            pytest.skip("compiled kernels not built")
    previous = _backend.use_backend(request.param)
    yield request.param
    _backend.use_backend(previous)


#: (criterion number, passed, text) rows recorded by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, passed, text in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {text}")
