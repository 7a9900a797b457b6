from __future__ import annotations

import pytest
from freezegun import freeze_time

pytest.register_assert_rewrite("tests.unit")


@pytest.fixture
def params(apiver_module):
    return apiver_module.SystemParams()


@pytest.fixture
def streams(apiver_module):
    return apiver_module.RandomStreams(master_seed=20240517)


@pytest.fixture
def repeller(apiver_module):
    return apiver_module.ConstantPotential.repeller(1.0, 0.2)


@pytest.fixture
def frozen_clock():
    with freeze_time("2024-05-17 12:34:56.789012") as frozen:
        yield frozen


@pytest.fixture
def config_file(tmp_path):
    """Write ``key = value`` text to a config file and return its path."""

    def write(text: str, name: str = "run.cfg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
