"""NFAs for the upward and downward closures of simple OCA languages."""

from __future__ import annotations

import networkx as nx

from .core import EPS, ZERO, InvalidAutomaton, Oca, Transition, make_oca, trim
from .reduction import lift_abstraction

MODES = ("up", "down")


def _require_simple(A: Oca):
    if A.kind != "simple":
        raise InvalidAutomaton("expected a simple OCA")


def counter_in_state(A: Oca, bound: int, prefix: str) -> Oca:
    """NFA simulating A faithfully while the counter stays in [0, bound];
    accepts in (final, 0)."""
    def st(q, n):
        return f"{prefix}{q},{n}"

    ts = []
    for t in A.transitions:
        for n in range(bound + 1):
            m = n + t.op
            if 0 <= m <= bound:
                ts.append((st(t.src, n), t.label, ZERO, st(t.dst, m)))
    states = [st(q, n) for q in A.states for n in range(bound + 1)]
    return make_oca("nfa", ts, st(A.initial, 0), [st(A.final, 0)], states, A.alphabet)


def upward_counter_bound(A: Oca) -> int:
    return len(A.states) ** 2 + 1


def upward_closure_nfa(A: Oca) -> Oca:
    """Bounded counter simulation up to |Q|^2 + 1, then letter self-loops on
    every state.  Has |Q| (|Q|^2 + 2) states."""
    _require_simple(A)
    N = counter_in_state(A, upward_counter_bound(A), "u:")
    return nfa_closure(N, "up")


def cycle_letters(A: Oca) -> dict:
    """For each state q, the letters read on some cycle through q (counter
    ignored), found via strongly connected components."""
    g = nx.DiGraph()
    g.add_nodes_from(A.states)
    g.add_edges_from((t.src, t.dst) for t in A.transitions)
    comp = {}
    for i, scc in enumerate(nx.strongly_connected_components(g)):
        for q in scc:
            comp[q] = i
    letters = {q: set() for q in A.states}
    per_comp = {}
    for t in A.transitions:
        if t.label is not None and comp[t.src] == comp[t.dst]:
            per_comp.setdefault(comp[t.src], set()).add(t.label)
    for q in A.states:
        letters[q] = set(per_comp.get(comp[q], ()))
    return letters


def downward_sizes(A: Oca) -> tuple:
    K = len(A.states)
    return K, K * K + K + 1


def build_downward_automaton(A: Oca) -> Oca:
    """Three-phase NFA: bounded simulation up to K = |Q|, a middle phase with
    counter bound U = K^2 + K + 1 and free letter loops on cycles, then a
    bounded phase back down to 0."""
    _require_simple(A)
    K, U = downward_sizes(A)

    def st(q, n, phase):
        return f"d{phase}:{q},{n}"

    loops = cycle_letters(A)
    ts = []
    for t in A.transitions:
        p, a, op, q = t
        for phase in (1, 3):
            for n in range(K + 1):
                if 0 <= n + op <= K:
                    ts.append((st(p, n, phase), a, ZERO, st(q, n + op, phase)))
        for n in range(U + 1):
            if 0 <= n + op <= U:
                ts.append((st(p, n, 2), a, ZERO, st(q, n + op, 2)))
        if op == 1:
            ts.append((st(p, K, 1), a, ZERO, st(q, K + 1, 2)))
        elif op == -1:
            ts.append((st(p, K + 1, 2), a, ZERO, st(q, K, 3)))
    for q in A.states:
        for a in sorted(loops[q]):
            ts.extend((st(q, n, 2), a, ZERO, st(q, n, 2)) for n in range(U + 1))
    states = [st(q, n, 1) for q in A.states for n in range(K + 1)]
    states += [st(q, n, 2) for q in A.states for n in range(U + 1)]
    states += [st(q, n, 3) for q in A.states for n in range(K + 1)]
    finals = [st(A.final, 0, 1), st(A.final, 0, 3)]
    return make_oca("nfa", ts, st(A.initial, 0, 1), finals, states, A.alphabet)


def downward_state_count(n: int) -> int:
    K, U = n, n * n + n + 1
    return K * (K + 1) + K * (U + 1) + K * (K + 1)


def nfa_closure(N: Oca, mode: str) -> Oca:
    """Downward: an ε copy of every letter transition.  Upward: a self-loop
    for every letter on every state."""
    if N.kind != "nfa":
        raise InvalidAutomaton("nfa_closure expects an nfa")
    ts = list(N.transitions)
    if mode == "down":
        ts += [Transition(t.src, EPS, ZERO, t.dst) for t in N.transitions if t.label is not None]
    elif mode == "up":
        ts += [Transition(q, a, ZERO, q) for q in N.states for a in N.alphabet]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return make_oca("nfa", ts, N.initial, N.finals, N.states, N.alphabet)


def downward_closure_nfa(A: Oca) -> Oca:
    return nfa_closure(build_downward_automaton(A), "down")


def closure_nfa(A: Oca, mode: str, trimmed: bool = False) -> Oca:
    """Closure of any non-extended OCA.  Simple automata are handled directly,
    others through the per-pair reduction with K = 0."""
    build = upward_closure_nfa if mode == "up" else downward_closure_nfa
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if A.kind == "simple":
        out = build(A)
    else:
        out = lift_abstraction(A, 0, mode, lambda p, q, piece: build(piece))
    return trim(out) if trimmed else out

