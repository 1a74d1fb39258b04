"""Rational derivation relations of linear term rewriting systems."""

from .automata import TreeAutomaton, accepts, enumerate_language
from .classifier import classify
from .grammars import TupleGrammar, contains_tuple, enumerate_tuples
from .rewriting import Trs, parse_trs, reachable
from .suffix import build_suffix_grammar, image_automaton_suffix
from .terms import App, RankedAlphabet, Var, parse_term
from .topdown import ClassVeto, build_bottomup, build_grammar, image_automaton, inverse_image_automaton

__all__ = [
    "App", "ClassVeto", "RankedAlphabet", "TreeAutomaton", "Trs", "TupleGrammar", "Var",
    "accepts", "build_bottomup", "build_grammar", "build_suffix_grammar", "classify",
    "contains_tuple", "enumerate_language", "enumerate_tuples", "image_automaton",
    "image_automaton_suffix", "inverse_image_automaton", "parse_term", "parse_trs", "reachable",
]
