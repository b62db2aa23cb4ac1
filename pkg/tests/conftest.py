import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qarrival.analytic import TwoGaussianConfig
from qarrival.states import GaussianPacket, WavepacketState

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def pair_state():
    cfg = TwoGaussianConfig(2.5, 1.0, 1.0, phi=0.9, theta=2.4)
    return cfg, cfg.state()


@pytest.fixture
def three_packet_state():
    packets = [GaussianPacket(-2.0, 0.8, 1.2), GaussianPacket(0.5, 1.1, -0.4),
               GaussianPacket(2.5, 0.7, -1.5)]
    return WavepacketState.normalized([1.0, 0.5j, -0.7 + 0.2j], packets)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)



def pytest_terminal_summary(terminalreporter):
    import sys
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, line = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {line}")
