"""Boolean network logic: programs, circuits, compiled arithmetic and neural-network translations."""

from .circuit import (
    Circuit,
    Gate,
    SelfFeedingCircuit,
    bnl_to_circuit,
    circuit_to_bnl,
    parity_circuit,
)
from .formula import And, Bot, Formula, Not, Or, Top, Var
from .fully_open import is_fully_open, to_fully_open
from .harness import Codec, EquivalenceReport, check_equivalence, oracle
from .integers import IntCodec, IntegerValue, build_int_op, compile_int_op
from .nn import NeuralNetwork, simulate
from .program import BnlProgram, External, Predicates, analyze_dynamics, measure, run
from .sc import ScProgram, bnl_to_sc, run_sc, sc_to_bnl
from .softfloat import FloatSystem, FloatValue, fp_add, fp_mul, round_rational
from .syntax import format_program, parse_program
from .translate import bnl_to_nn, nn_to_bnl

__all__ = [
    "And",
    "BnlProgram",
    "Bot",
    "Circuit",
    "Codec",
    "EquivalenceReport",
    "External",
    "FloatSystem",
    "FloatValue",
    "Formula",
    "Gate",
    "IntCodec",
    "IntegerValue",
    "NeuralNetwork",
    "Not",
    "Or",
    "Predicates",
    "ScProgram",
    "SelfFeedingCircuit",
    "Top",
    "Var",
    "analyze_dynamics",
    "bnl_to_circuit",
    "bnl_to_nn",
    "bnl_to_sc",
    "build_int_op",
    "check_equivalence",
    "circuit_to_bnl",
    "compile_int_op",
    "format_program",
    "fp_add",
    "fp_mul",
    "is_fully_open",
    "measure",
    "nn_to_bnl",
    "oracle",
    "parity_circuit",
    "parse_program",
    "round_rational",
    "run",
    "run_sc",
    "sc_to_bnl",
    "simulate",
    "to_fully_open",
]
