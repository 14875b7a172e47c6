import pytest

from codesign.model import fixture_path, load_model

EV_PATH = fixture_path("ev.json")


@pytest.fixture(scope="session")
def ev_path():
    return EV_PATH


@pytest.fixture(scope="session")
def ev_model():
    return load_model(EV_PATH)
