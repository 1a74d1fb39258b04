import pytest

from ratrw.automata import parse_automaton
from ratrw.checks import data_text, load_data_trs
from ratrw.grammars import parse_grammar


@pytest.fixture(scope="session")
def fg():
    return load_data_trs("topdown_fg.trs")


@pytest.fixture(scope="session")
def swap_pump():
    return load_data_trs("swap_pump.trs")


@pytest.fixture(scope="session")
def nested_g():
    return load_data_trs("nested_g.trs")


@pytest.fixture(scope="session")
def fg_ref():
    return parse_grammar(data_text("fg_reference.grammar"))


@pytest.fixture(scope="session")
def fgga():
    return parse_automaton(data_text("fgga.aut"))


@pytest.fixture(scope="session")
def faa():
    return parse_automaton(data_text("faa.aut"))
