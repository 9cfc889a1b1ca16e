import pytest
from hypothesis import HealthCheck, settings

from yabsim.params import ConverterParams

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# device inputs have no datasheet defaults; these are test placeholders
R_DS_ON = 21e-3
C_OSS = 1e-9


@pytest.fixture
def nominal():
    return ConverterParams()


@pytest.fixture
def device_params():
    return ConverterParams(R_ds_on=R_DS_ON, C_oss=C_OSS)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
