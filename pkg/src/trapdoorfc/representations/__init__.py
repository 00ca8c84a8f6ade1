"""Representation classes: circuits, formulas, automata and RSA hypotheses."""
from .circuits import (
    And,
    BooleanCircuit,
    BooleanFormula,
    Const,
    Gate,
    Not,
    Or,
    Var,
    circuit_to_formula,
    circuit_truth_table,
    eval_circuit,
    eval_formula,
    formula_truth_table,
    random_circuit,
)
from .crsa import CrsaHypothesis, build_crsa_hypothesis
from .dfa import Dfa, build_prefix_tree_dfa, minimize_dfa, run_dfa

__all__ = [
    "And", "BooleanCircuit", "BooleanFormula", "Const", "Gate", "Not", "Or", "Var",
    "circuit_to_formula", "circuit_truth_table", "eval_circuit", "eval_formula",
    "formula_truth_table", "random_circuit",
    "CrsaHypothesis", "build_crsa_hypothesis",
    "Dfa", "build_prefix_tree_dfa", "minimize_dfa", "run_dfa",
]
