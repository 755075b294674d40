"""Brute-force ground truth used to validate the constructions: bounded
enumeration, subword tests, products with NFAs and emptiness."""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .core import (
    EPS,
    NOOP,
    ZERO,
    AlphabetMismatch,
    Config,
    EpsilonPresent,
    InvalidAutomaton,
    Oca,
    Transition,
    UnknownLetter,
    epsilon_closure,
    make_oca,
)

DEFAULT_MAX_LEN = 6
DEFAULT_NORM_BOUND = 8


def subword_order(u: Sequence, w: Sequence) -> bool:
    """Is u a scattered subword of w?"""
    it = iter(w)
    return all(any(a == b for b in it) for a in u)


def word_nfa(word: Sequence, alphabet: Sequence) -> Oca:
    states = [str(i) for i in range(len(word) + 1)]
    ts = [(states[i], a, ZERO, states[i + 1]) for i, a in enumerate(word)]
    return make_oca("nfa", ts, states[0], [states[-1]], states, alphabet)


def superword_nfa(word: Sequence, alphabet: Sequence) -> Oca:
    """NFA for the upward closure of a single word."""
    states = [str(i) for i in range(len(word) + 1)]
    ts = [(states[i], a, ZERO, states[i + 1]) for i, a in enumerate(word)]
    ts += [(q, a, ZERO, q) for q in states for a in alphabet]
    return make_oca("nfa", ts, states[0], [states[-1]], states, alphabet)


def subword_nfa(word: Sequence, alphabet: Sequence) -> Oca:
    """NFA for the downward closure of a single word."""
    states = [str(i) for i in range(len(word) + 1)]
    ts = []
    for i, a in enumerate(word):
        ts.append((states[i], a, ZERO, states[i + 1]))
        ts.append((states[i], EPS, ZERO, states[i + 1]))
    return make_oca("nfa", ts, states[0], [states[-1]], states, alphabet)


def product_with_nfa(A: Oca, N: Oca) -> Oca:
    """Synchronized product.  The counter and any zero tests come from A."""
    if N.kind != "nfa":
        raise InvalidAutomaton("second factor must be an nfa")
    if set(N.alphabet) - set(A.alphabet):
        raise AlphabetMismatch(sorted(set(N.alphabet) - set(A.alphabet)))

    def pair(p, r):
        return f"({p},{r})"

    states = [pair(p, r) for p in A.states for r in N.states]
    by_letter = {}
    for u in N.transitions:
        by_letter.setdefault(u.label, []).append(u)
    ts = []
    for t in A.transitions:
        if t.label is None:
            ts.extend(Transition(pair(t.src, r), EPS, t.op, pair(t.dst, r)) for r in N.states)
        else:
            for u in by_letter.get(t.label, ()):
                ts.append(Transition(pair(t.src, u.src), t.label, t.op, pair(t.dst, u.dst)))
    for u in by_letter.get(EPS, ()):
        ts.extend(Transition(pair(p, u.src), EPS, NOOP, pair(p, u.dst)) for p in A.states)
    finals = [pair(f, g) for f in A.finals for g in N.finals]
    if A.kind == "simple" and len(finals) != 1:
        # keep a single final state so the product stays simple
        states.append("(acc)")
        ts.extend(Transition(f, EPS, NOOP, "(acc)") for f in finals)
        finals = ["(acc)"]
    if A.kind == "nfa":
        ts = [Transition(t.src, t.label, ZERO, t.dst) for t in ts]
    return Oca(A.kind, tuple(states), A.alphabet, pair(A.initial, N.initial), frozenset(finals), tuple(ts))


def oca_nonempty(A: Oca) -> bool:
    """Breadth-first search over configurations with the counter capped at
    |Q|^2 + 1, which is enough for automata without zero tests."""
    cap = len(A.states) ** 2 + 1
    start = Config(A.initial, 0)
    seen = {start}
    todo = deque([start])
    while todo:
        conf = todo.popleft()
        if A.accepts_at(conf):
            return True
        for t in A.out[conf.state]:
            if t.op == ZERO:
                if conf.counter:
                    continue
                nxt = Config(t.dst, 0)
            else:
                value = conf.counter + t.op
                if value < 0 or value > cap:
                    continue
                nxt = Config(t.dst, value)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return False


def closure_member(A: Oca, word: Sequence, mode: str) -> bool:
    """Exact membership of word in L(A), in its upward closure or in its
    downward closure, via product and emptiness."""
    word = tuple(word)
    for a in word:
        if a not in A.alphabet:
            raise UnknownLetter(a)
    if mode == "exact":
        N = word_nfa(word, A.alphabet)
    elif mode == "down":
        N = superword_nfa(word, A.alphabet)
    elif mode == "up":
        N = subword_nfa(word, A.alphabet)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return oca_nonempty(product_with_nfa(A, N))


def _require_epsilon_free(A: Oca):
    if A.has_epsilon:
        raise EpsilonPresent("replace ε labels with a fresh letter first")
    if A.kind == "extended" and any(t.op != ZERO and abs(t.op) > 1 for t in A.transitions):
        raise InvalidAutomaton("expand extended adds first")


def _step(conf, t):
    if t.op == ZERO:
        return Config(t.dst, 0) if conf.counter == 0 else None
    value = conf.counter + t.op
    return Config(t.dst, value) if value >= 0 else None


def enumerate_language(A: Oca, max_len: int = DEFAULT_MAX_LEN) -> set:
    """All accepted words of length at most max_len."""
    _require_epsilon_free(A)
    words = set()
    layer = {(): {Config(A.initial, 0)}}
    for length in range(max_len + 1):
        nxt = {}
        for word, confs in layer.items():
            if any(A.accepts_at(c) for c in confs):
                words.add(word)
            if length == max_len:
                continue
            for c in confs:
                for t in A.out[c.state]:
                    d = _step(c, t)
                    if d is not None:
                        nxt.setdefault(word + (t.label,), set()).add(d)
        layer = nxt
    return words


def enumerate_parikh(A: Oca, norm_bound: int = DEFAULT_NORM_BOUND, eps_budget: int | None = None) -> set:
    """Parikh vectors of accepted words with norm at most norm_bound.

    ε moves are treated as reading a fresh letter whose coordinate is erased
    afterwards.  Runs may use at most eps_budget of them; the default budget
    (norm_bound + 1) * |Q| covers ε steps that are not part of ε cycles.
    """
    if A.kind == "extended" and any(t.op != ZERO and abs(t.op) > 1 for t in A.transitions):
        raise InvalidAutomaton("expand extended adds first")
    if eps_budget is None:
        eps_budget = (norm_bound + 1) * len(A.states) if A.has_epsilon else 0
    index = {a: i for i, a in enumerate(A.alphabet)}
    dim = len(A.alphabet)
    start = (A.initial, 0, (0,) * dim, 0)
    seen = {start}
    todo = deque([start])
    found = set()
    while todo:
        state, counter, vec, used = todo.popleft()
        if A.accepts_at(Config(state, counter)):
            found.add(vec)
        total = sum(vec)
        for t in A.out[state]:
            d = _step(Config(state, counter), t)
            if d is None:
                continue
            if t.label is None:
                if used == eps_budget:
                    continue
                item = (d.state, d.counter, vec, used + 1)
            else:
                if total == norm_bound:
                    continue
                v = list(vec)
                v[index[t.label]] += 1
                item = (d.state, d.counter, tuple(v), used)
            if item not in seen:
                seen.add(item)
                todo.append(item)
    return found


def nfa_language(N: Oca, max_len: int = DEFAULT_MAX_LEN) -> set:
    """Accepted words of an NFA (ε allowed) up to a length bound."""
    words = set()
    layer = {(): frozenset(epsilon_closure(N, [N.initial]))}
    for length in range(max_len + 1):
        nxt = {}
        for word, current in layer.items():
            if current & N.finals:
                words.add(word)
            if length == max_len:
                continue
            moves = {}
            for q in current:
                for t in N.out[q]:
                    if t.label is not None:
                        moves.setdefault(t.label, set()).add(t.dst)
            for a, dsts in moves.items():
                nxt[word + (a,)] = frozenset(epsilon_closure(N, dsts))
        layer = nxt
    return words


def nfa_parikh(N: Oca, norm_bound: int = DEFAULT_NORM_BOUND) -> set:
    """Parikh vectors of an NFA's language with norm at most norm_bound."""
    index = {a: i for i, a in enumerate(N.alphabet)}
    start = (N.initial, (0,) * len(N.alphabet))
    seen = {start}
    todo = deque([start])
    found = set()
    while todo:
        state, vec = todo.popleft()
        if state in N.finals:
            found.add(vec)
        total = sum(vec)
        for t in N.out[state]:
            if t.label is None:
                item = (t.dst, vec)
            else:
                if total == norm_bound:
                    continue
                v = list(vec)
                v[index[t.label]] += 1
                item = (t.dst, tuple(v))
            if item not in seen:
                seen.add(item)
                todo.append(item)
    return found


def words_up_to(alphabet: Sequence, max_len: int):
    """Every word over alphabet of length at most max_len, shortest first."""
    layer = [()]
    for _ in range(max_len + 1):
        yield from layer
        layer = [w + (a,) for w in layer for a in alphabet]


def project_parikh(vectors, alphabet: Sequence, target: Sequence) -> set:
    """Re-index vectors from alphabet to target, dropping other letters."""
    pos = [alphabet.index(a) if a in alphabet else None for a in target]
    return {tuple(0 if i is None else v[i] for i in pos) for v in vectors}
