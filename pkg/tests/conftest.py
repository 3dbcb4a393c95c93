import pytest

from bondsim.simkernel import SimConfig, simulate_arrays


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    # One tiny run so JIT compilation never lands inside a timed test.
    simulate_arrays(SimConfig(3, "low", "ritcb", n_packets=2, seed=0))
