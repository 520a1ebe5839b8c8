import pytest
from hypothesis import HealthCheck, settings

from linkfraud import synthgen

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def default_corpus():
    return synthgen.default_corpus()


@pytest.fixture(scope="session")
def freemium_pair():
    return synthgen.gen_freemium(synthgen.RegimeParams("freemium", n_followers=1000, seed=7))


@pytest.fixture(scope="session")
def premium_high():
    return synthgen.gen_premium(synthgen.RegimeParams("premium_naive", n_followers=1000, seed=7))


@pytest.fixture(scope="session")
def premium_low():
    return synthgen.gen_premium(
        synthgen.RegimeParams("premium_naive", n_followers=1000, reuse="low", seed=7)
    )


def pytest_terminal_summary(terminalreporter):
    import verdicts

    if verdicts.LINES:
        terminalreporter.section("acceptance criteria")
        for line in verdicts.LINES:
            terminalreporter.write_line(line)
