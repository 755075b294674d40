"""Automata data model: one-counter automata, configurations, runs, the
extended-counter expansion and small Parikh/reversal helpers.

Counter operations are plain integers (+1 increment, -1 decrement, 0 no-op,
any other value is an extended add) or the ``ZERO`` marker for a zero test.
The empty word label is ``EPS`` (``None``); it is never part of an alphabet.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence, Union

EPS = None
ZERO = "zero"
INC, DEC, NOOP = 1, -1, 0

KINDS = ("general", "simple", "extended", "nfa")

Op = Union[int, str]
Word = tuple
ParikhVector = tuple


class OcaError(Exception):
    """Base class for every error raised by the library."""


class InvalidAutomaton(OcaError):
    pass


class NegativeCounter(OcaError):
    pass


class ZeroTestFailed(OcaError):
    pass


class SourceMismatch(OcaError):
    pass


class UnknownLetter(OcaError):
    pass


class UnknownState(OcaError):
    pass


class EpsilonPresent(OcaError):
    pass


class DimensionMismatch(OcaError):
    pass


class AlphabetMismatch(OcaError):
    pass


class BudgetExceeded(OcaError):
    pass


class Transition(NamedTuple):
    src: str
    label: str | None
    op: Op
    dst: str


class Config(NamedTuple):
    state: str
    counter: int


def op_effect(op: Op) -> int:
    return 0 if op == ZERO else op


def _sort_key(t: Transition):
    return (t.src, "" if t.label is None else t.label, str(t.op), t.dst)


@dataclass(frozen=True)
class Oca:
    """A one-counter automaton.  With kind ``nfa`` every op is a zero test,
    so the counter never leaves 0 and the automaton is a plain NFA."""

    kind: str
    states: tuple
    alphabet: tuple
    initial: str
    finals: frozenset
    transitions: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidAutomaton(f"unknown kind {self.kind!r}")
        known = set(self.states)
        if len(known) != len(self.states):
            raise InvalidAutomaton("duplicate state ids")
        if self.initial not in known:
            raise InvalidAutomaton(f"initial state {self.initial!r} not declared")
        if not self.finals <= known:
            raise InvalidAutomaton("final state not declared")
        letters = set(self.alphabet)
        if "eps" in letters:
            raise InvalidAutomaton('"eps" is reserved for the empty word')
        if list(self.alphabet) != sorted(letters):
            raise InvalidAutomaton("alphabet must be sorted and duplicate free")
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise InvalidAutomaton(f"transition {t} uses an undeclared state")
            if t.label is not None and t.label not in letters:
                raise InvalidAutomaton(f"transition {t} uses a letter outside the alphabet")
            if t.op != ZERO and not isinstance(t.op, int):
                raise InvalidAutomaton(f"bad counter op in {t}")
            if self.kind == "nfa" and t.op != ZERO:
                raise InvalidAutomaton("nfa transitions must all be zero tests")
            if self.kind == "simple" and t.op == ZERO:
                raise InvalidAutomaton("simple OCA cannot test for zero")
            if self.kind in ("general", "simple") and t.op != ZERO and abs(t.op) > 1:
                raise InvalidAutomaton(f"add({t.op}) needs kind extended")
        if self.kind == "simple" and len(self.finals) != 1:
            raise InvalidAutomaton("simple OCA needs exactly one final state")

    @property
    def final(self) -> str:
        """The unique final state of a simple automaton."""
        if len(self.finals) != 1:
            raise InvalidAutomaton("automaton has no unique final state")
        return next(iter(self.finals))

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def out(self) -> dict:
        table = {q: [] for q in self.states}
        for t in self.transitions:
            table[t.src].append(t)
        return table

    @cached_property
    def into(self) -> dict:
        table = {q: [] for q in self.states}
        for t in self.transitions:
            table[t.dst].append(t)
        return table

    @cached_property
    def memo(self) -> dict:
        """Per-instance table for pure derived data (search caches)."""
        return {}

    @cached_property
    def has_epsilon(self) -> bool:
        return any(t.label is None for t in self.transitions)

    def accepts_at(self, config: Config) -> bool:
        """Acceptance condition: nfa and general automata accept in a final
        state with any counter value, simple and extended ones need 0."""
        if config.state not in self.finals:
            return False
        return self.kind in ("general", "nfa") or config.counter == 0

    def sorted_transitions(self) -> list:
        return sorted(self.transitions, key=_sort_key)

    def with_kind(self, kind: str) -> "Oca":
        return Oca(kind, self.states, self.alphabet, self.initial, self.finals, self.transitions)


def make_oca(kind, transitions, initial, finals, states=(), alphabet=()) -> Oca:
    """Build an automaton, collecting states and letters that the transitions
    mention.  Duplicate transitions are dropped, first occurrence wins."""
    order = {}
    for q in states:
        order.setdefault(q, None)
    order.setdefault(initial, None)
    for q in finals:
        order.setdefault(q, None)
    seen = {}
    letters = set(alphabet)
    for t in transitions:
        t = Transition(*t)
        if t in seen:
            continue
        seen[t] = None
        order.setdefault(t.src, None)
        order.setdefault(t.dst, None)
        if t.label is not None:
            letters.add(t.label)
    return Oca(kind, tuple(order), tuple(sorted(letters)), initial, frozenset(finals), tuple(seen))


def nfa(transitions, initial, finals, states=(), alphabet=()) -> Oca:
    """Convenience constructor for NFAs given as (src, label, dst) triples."""
    return make_oca("nfa", [(p, a, ZERO, q) for p, a, q in transitions], initial, finals, states, alphabet)


def step_semantics(config: Config, t: Transition) -> Config:
    if t.src != config.state:
        raise SourceMismatch(f"transition leaves {t.src!r}, configuration is in {config.state!r}")
    if t.op == ZERO:
        if config.counter != 0:
            raise ZeroTestFailed(f"zero test at counter {config.counter}")
        return Config(t.dst, 0)
    value = config.counter + t.op
    if value < 0:
        raise NegativeCounter(f"counter would drop to {value}")
    return Config(t.dst, value)


@dataclass(frozen=True)
class Run:
    configs: tuple
    transitions: tuple

    @classmethod
    def replay(cls, start: Config, transitions: Iterable[Transition]) -> "Run":
        configs = [Config(*start)]
        ts = tuple(transitions)
        for t in ts:
            configs.append(step_semantics(configs[-1], t))
        return cls(tuple(configs), ts)

    def check(self) -> bool:
        """Replaying the transitions reproduces the stored configurations."""
        return Run.replay(self.configs[0], self.transitions).configs == self.configs

    @property
    def length(self) -> int:
        return len(self.transitions)

    @property
    def word(self) -> Word:
        return tuple(t.label for t in self.transitions if t.label is not None)

    @property
    def init_state(self) -> str:
        return self.configs[0].state

    @property
    def final_state(self) -> str:
        return self.configs[-1].state

    @property
    def init_counter(self) -> int:
        return self.configs[0].counter

    @property
    def final_counter(self) -> int:
        return self.configs[-1].counter

    @property
    def high(self) -> int:
        return max(c.counter for c in self.configs)

    @property
    def low(self) -> int:
        return min(c.counter for c in self.configs)

    @property
    def effect(self) -> int:
        return self.final_counter - self.init_counter

    @property
    def drop(self) -> int:
        return self.init_counter - self.low

    @property
    def height(self) -> int:
        return self.high - self.low


def count_reversals(ops) -> int:
    """Alternations between increasing and decreasing blocks.  Accepts a Run
    or a sequence of ops; no-ops and zero tests do not end a block."""
    if isinstance(ops, Run):
        ops = [t.op for t in ops.transitions]
    count = 0
    last = 0
    for op in ops:
        e = op_effect(op)
        if e == 0:
            continue
        sign = 1 if e > 0 else -1
        if last and sign != last:
            count += 1
        last = sign
    return count


def parikh_of_word(word: Sequence, alphabet: Sequence) -> ParikhVector:
    index = {a: i for i, a in enumerate(alphabet)}
    counts = [0] * len(alphabet)
    for a in word:
        if a not in index:
            raise UnknownLetter(a)
        counts[index[a]] += 1
    return tuple(counts)


def norm(v: ParikhVector) -> int:
    return sum(v)


def transition_size(t: Transition) -> int:
    return 0 if t.op == ZERO else max(0, abs(t.op) - 1)


def paper_size(A: Oca) -> int:
    """States plus the extra size charged to extended adds."""
    return len(A.states) + sum(transition_size(t) for t in A.transitions)


def expand_extended(A: Oca) -> Oca:
    """Replace every add(z) by |z| unit steps.  The first step keeps the
    label, the others read nothing."""
    if A.kind != "extended":
        raise InvalidAutomaton("expand_extended expects kind extended")
    new_states = list(A.states)
    out = []
    for index, t in enumerate(A.transitions):
        if t.op == ZERO or abs(t.op) <= 1:
            out.append(t)
            continue
        unit = 1 if t.op > 0 else -1
        chain = [f"x:{index}.{k}" for k in range(1, abs(t.op))]
        new_states.extend(chain)
        hops = [t.src] + chain + [t.dst]
        for k in range(abs(t.op)):
            out.append(Transition(hops[k], t.label if k == 0 else EPS, unit, hops[k + 1]))
    has_zero = any(t.op == ZERO for t in out)
    finals = A.finals
    if has_zero or len(finals) != 1:
        # general automata accept at any counter value, so route every final
        # through a zero test (or a no-op when no zero tests are needed)
        acc = "x:acc"
        while acc in new_states:
            acc += "'"
        new_states.append(acc)
        out.extend(Transition(f, EPS, ZERO if has_zero else NOOP, acc) for f in sorted(finals))
        finals = frozenset([acc])
    kind = "general" if has_zero else "simple"
    return Oca(kind, tuple(new_states), A.alphabet, A.initial, finals, tuple(out))


def epsilon_closure(A: Oca, states: Iterable[str]) -> set:
    """Closure under ε transitions, ignoring the counter (exact for NFAs)."""
    seen = set(states)
    todo = list(seen)
    while todo:
        q = todo.pop()
        for t in A.out[q]:
            if t.label is None and t.dst not in seen:
                seen.add(t.dst)
                todo.append(t.dst)
    return seen


def nfa_accepts(N: Oca, word: Sequence) -> bool:
    """Subset simulation; the counter is ignored, so this is only meaningful
    for automata of kind nfa."""
    current = epsilon_closure(N, [N.initial])
    for a in word:
        step = {t.dst for q in current for t in N.out[q] if t.label == a}
        if not step:
            return False
        current = epsilon_closure(N, step)
    return bool(current & N.finals)


def reachable_states(A: Oca) -> set:
    seen = {A.initial}
    todo = deque(seen)
    while todo:
        q = todo.popleft()
        for t in A.out[q]:
            if t.dst not in seen:
                seen.add(t.dst)
                todo.append(t.dst)
    return seen


def coreachable_states(A: Oca) -> set:
    seen = set(A.finals)
    todo = deque(seen)
    while todo:
        q = todo.popleft()
        for t in A.into[q]:
            if t.src not in seen:
                seen.add(t.src)
                todo.append(t.src)
    return seen


def trim(A: Oca) -> Oca:
    """Drop states that are not on any initial-to-final path of the counter
    blind graph.  Language preserving for every kind.  The initial and final
    states always stay, so a simple automaton keeps its final state."""
    keep = reachable_states(A) & coreachable_states(A)
    keep.add(A.initial)
    keep |= A.finals
    states = tuple(q for q in A.states if q in keep)
    ts = tuple(t for t in A.transitions if t.src in keep and t.dst in keep)
    return Oca(A.kind, states, A.alphabet, A.initial, A.finals, ts)


def rename_states(A: Oca, prefix: str) -> Oca:
    """Prefix every state id, used to copy an automaton into a larger one."""
    ren = {q: prefix + q for q in A.states}
    ts = tuple(Transition(ren[t.src], t.label, t.op, ren[t.dst]) for t in A.transitions)
    return Oca(A.kind, tuple(ren[q] for q in A.states), A.alphabet, ren[A.initial],
               frozenset(ren[q] for q in A.finals), ts)


def with_alphabet(A: Oca, alphabet: Iterable[str]) -> Oca:
    letters = tuple(sorted(set(A.alphabet) | set(alphabet)))
    return Oca(A.kind, A.states, letters, A.initial, A.finals, A.transitions)
