import os

import pytest
from hypothesis import settings

from config.config_loader import ConfigLoader
from symbolic import parse

settings.register_profile("dev", settings(max_examples=200, deadline=None))
settings.register_profile("ci", settings(max_examples=2500, deadline=None))
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture
def p():
    return parse


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(
        "regulator:\n"
        "  rel_tol: 1.0e-10\n"
        "  mc_samples: 20000\n"
        "  seed: 7\n"
        "report:\n"
        "  output: " + str(tmp_path / "out") + "\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def loader(config_file):
    return ConfigLoader(config_file)
