from __future__ import annotations

import pathlib

import pytest

from ddmr.text import parse_theory

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


def load_fixture(name: str):
    return parse_theory((FIXTURES / f"{name}.ddl").read_text())


@pytest.fixture
def load():
    return load_fixture
