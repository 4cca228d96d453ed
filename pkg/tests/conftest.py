import pathlib

import pytest

from unfolder import parse_program

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    return parse_program((FIXTURES / f"{name}.ufl").read_text())


def fact_strings(interp, bots=False):
    from unfolder import fact_str

    source = interp.sorted_bot_facts() if bots else interp.sorted_facts()
    return {fact_str(f) for f in source}


@pytest.fixture
def fixtures_dir():
    return FIXTURES
