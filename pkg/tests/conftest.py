import pytest

from fso_ber import LinkParams, PRESETS, derive

CASES = ("case1", "case2", "case3")


@pytest.fixture(scope="session")
def links():
    return {name: LinkParams(**PRESETS[name]) for name in CASES}


@pytest.fixture(scope="session")
def deriveds(links):
    return {name: derive(link) for name, link in links.items()}
