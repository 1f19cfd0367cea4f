import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_star(M, rng, amp=0.3, modes=4):
    """Star-shaped counterclockwise curve with random low-mode radius."""
    th = 2 * np.pi * np.arange(M) / M
    r = np.ones(M)
    for j in range(1, modes + 1):
        r += amp / modes * (rng.uniform(-1, 1) * np.cos(j * th) + rng.uniform(-1, 1) * np.sin(j * th))
    return np.column_stack((r * np.cos(th), r * np.sin(th)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
