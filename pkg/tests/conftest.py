import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from medley.mediator import Mediator, MediatorConfig

FIXTURES = os.path.abspath(
    os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")
)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def mediator():
    config = MediatorConfig.load(os.path.join(FIXTURES, "medley.cfg"))
    return Mediator.from_config(config)


@pytest.fixture(scope="session")
def walkthrough_query():
    with open(os.path.join(FIXTURES, "queries", "top3_phosphosites.cq")) as fh:
        return fh.read()
