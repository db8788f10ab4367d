import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def bump_chain_3d():
    from cluster_radius.decompose import build_bump_chain

    return build_bump_chain(3)


@pytest.fixture(scope="session")
def lj_decomposition(bump_chain_3d):
    from cluster_radius.decompose import decompose
    from cluster_radius.potential import lennard_jones

    return decompose(lennard_jones(1.0, 1.0, 3), chain=bump_chain_3d)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    lines = acceptance_log.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
