import pytest

from a2gcovert import default_scenario


@pytest.fixture(scope="session")
def scn():
    return default_scenario()
