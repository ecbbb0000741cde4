import numpy as np
import pytest

from zicap.channels import ZChannel, build_benzel, build_elgamal, build_fig4

# Lines recorded by the acceptance tests, echoed in the terminal summary.
ACCEPTANCE_LINES: dict = {}


def perturb(zc: ZChannel, index, delta: float) -> ZChannel:
    """Add ``delta`` to ``V2[index]`` and renormalize the touched rows."""
    V2 = zc.V2.copy()
    V2[index] += delta
    V2 /= V2.sum(axis=-1, keepdims=True)
    return ZChannel(zc.V1, V2)


@pytest.fixture(scope="session")
def fig4():
    return build_fig4()


@pytest.fixture(scope="session")
def benzel():
    return build_benzel(2, [0.9, 0.1], [0.8, 0.2])


@pytest.fixture(scope="session")
def elgamal():
    return build_elgamal(0.3)


@pytest.fixture(scope="session")
def presets(fig4, benzel, elgamal):
    return {"fig4": fig4, "benzel": benzel, "elgamal": elgamal}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
