"""Regular abstractions of one-counter automata: upward and downward
closures and Parikh-equivalent NFAs, with brute-force oracles."""

from .core import (
    DEC,
    EPS,
    INC,
    NOOP,
    ZERO,
    Config,
    Oca,
    OcaError,
    Run,
    Transition,
    count_reversals,
    expand_extended,
    make_oca,
    nfa,
    parikh_of_word,
    step_semantics,
)

__version__ = "0.1.0"
