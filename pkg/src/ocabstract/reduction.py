"""From general OCA to simple OCA and back: per-pair simple automata, the
low-counter skeleton over a triple alphabet, and regular substitutions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .core import (
    DEC,
    EPS,
    NOOP,
    ZERO,
    InvalidAutomaton,
    Oca,
    Transition,
    UnknownState,
    make_oca,
)

MODES = ("up", "down", "parikh")


@dataclass(frozen=True)
class Substitution:
    """Letter to NFA map.  Letters without an image stand for themselves."""

    images: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return max((len(N.states) for N in self.images.values()), default=1)

    def image_alphabet(self) -> set:
        letters = set()
        for N in self.images.values():
            letters |= set(N.alphabet)
        return letters


def strip_zero_tests(A: Oca, p: str, q: str) -> Oca:
    """A with initial p, sole final q and every zero test removed."""
    for s in (p, q):
        if s not in A.states:
            raise UnknownState(s)
    if A.kind == "extended":
        raise InvalidAutomaton("expand extended adds first")
    ts = tuple(t for t in A.transitions if t.op != ZERO)
    return Oca("simple", A.states, A.alphabet, p, frozenset([q]), ts)


def fresh_letter(alphabet, stem: str = "e") -> str:
    i = 0
    while f"{stem}{i}" in alphabet:
        i += 1
    return f"{stem}{i}"


def epsilon_to_letter(A: Oca) -> tuple:
    """Relabel ε transitions with a fresh letter.  Returns the automaton and
    the letter; an ε-free input comes back unchanged."""
    letter = fresh_letter(A.alphabet)
    if not A.has_epsilon:
        return A, letter
    ts = tuple(Transition(t.src, letter if t.label is None else t.label, t.op, t.dst) for t in A.transitions)
    alphabet = tuple(sorted(A.alphabet + (letter,)))
    return Oca(A.kind, A.states, alphabet, A.initial, A.finals, ts), letter


def triple_letter(K: int, p: str, q: str) -> str:
    return f"tri({K},{p},{q})"


def _skeleton_state(q, i):
    return f"sk:{q},{i}"


def drain_finals(A: Oca) -> Oca:
    """For automata accepting in a final state with any counter value, add a
    fresh final state that empties the counter, so acceptance needs 0."""
    acc = "acc"
    while acc in A.states:
        acc += "'"
    ts = list(A.transitions)
    ts += [Transition(f, EPS, NOOP, acc) for f in sorted(A.finals)]
    ts.append(Transition(acc, EPS, DEC, acc))
    return Oca(A.kind, A.states + (acc,), A.alphabet, A.initial, frozenset([acc]), tuple(ts))


def build_skeleton(A: Oca, K: int) -> Oca:
    """NFA over letters plus triples: faithful simulation with the counter
    kept in the state while it is at most K, and a triple letter bridging
    (p,K) to (q,K) for every pair of states."""
    ts = []
    for t in A.transitions:
        for i in range(K + 1):
            if t.op == ZERO:
                if i:
                    continue
                j = 0
            else:
                j = i + t.op
            if 0 <= j <= K:
                ts.append(Transition(_skeleton_state(t.src, i), t.label, ZERO, _skeleton_state(t.dst, j)))
    for p in A.states:
        for q in A.states:
            ts.append(Transition(_skeleton_state(p, K), triple_letter(K, p, q), ZERO, _skeleton_state(q, K)))
    states = [_skeleton_state(q, i) for q in A.states for i in range(K + 1)]
    finals = [_skeleton_state(f, 0) for f in A.finals]
    return make_oca("nfa", ts, _skeleton_state(A.initial, 0), finals, states, A.alphabet)


def letter_gadget(letter: str, mode: str, alphabet) -> Oca:
    """Two-state NFA for the abstraction of a single letter."""
    ts = [("g0", letter, ZERO, "g1")]
    if mode == "up":
        ts += [(g, b, ZERO, g) for g in ("g0", "g1") for b in alphabet]
    elif mode == "down":
        ts.append(("g0", EPS, ZERO, "g1"))
    elif mode != "parikh":
        raise ValueError(f"unknown mode {mode!r}")
    return make_oca("nfa", ts, "g0", ["g1"], ["g0", "g1"], alphabet)


def lift_abstraction(A: Oca, K: int, mode: str, per_pair: Callable[[str, str, Oca], Oca]) -> Oca:
    """Abstraction of a general OCA from abstractions of its zero-test free
    pieces A^{p,q}.

    per_pair(p, q, piece) receives piece = A^{p,q} and must return an NFA
    sandwiched between the abstraction of L(piece) and that of its K-th
    approximant.  A general automaton is first given a counter-draining final
    state, so p and q may include that extra state.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if A.kind == "extended":
        raise InvalidAutomaton("expand extended adds first")
    if A.kind == "general":
        A = drain_finals(A)
    skeleton = build_skeleton(A, K)
    images = {a: letter_gadget(a, mode, A.alphabet) for a in A.alphabet}
    cache = {}
    for p in A.states:
        for q in A.states:
            if (p, q) not in cache:
                N = per_pair(p, q, strip_zero_tests(A, p, q))
                if N.kind != "nfa":
                    raise InvalidAutomaton("per_pair must return an nfa")
                cache[p, q] = N
            images[triple_letter(K, p, q)] = cache[p, q]
    return apply_substitution(skeleton, Substitution(images))


def lift_state_bound(A: Oca, K: int, skeleton: Oca, max_pair: int) -> int:
    n = len(A.states)
    return n * (K + 1) + len(A.alphabet) * 2 * len(skeleton.transitions) + n * n * max_pair


def apply_substitution(N: Oca, sigma: Substitution) -> Oca:
    """Replace each transition reading a mapped letter by a fresh copy of its
    image, entered and left through ε edges.

    N may also be a counter automaton: the entry edge then carries the
    counter op of the replaced transition and the copy leaves the counter
    alone.
    """
    counting = N.kind != "nfa"
    inside = NOOP if counting else ZERO
    states = list(N.states)
    ts = []
    alphabet = set(sigma.image_alphabet())
    for index, t in enumerate(N.transitions):
        image = sigma.images.get(t.label) if t.label is not None else None
        if image is None:
            ts.append(t)
            if t.label is not None:
                alphabet.add(t.label)
            continue
        if image.kind != "nfa":
            raise InvalidAutomaton(f"image of {t.label!r} is not an nfa")
        prefix = f"s{index}:"
        names = {q: prefix + q for q in image.states}
        states.extend(names.values())
        ts.append(Transition(t.src, EPS, t.op if counting else ZERO, names[image.initial]))
        ts.extend(Transition(names[u.src], u.label, inside, names[u.dst]) for u in image.transitions)
        ts.extend(Transition(names[f], EPS, inside, t.dst) for f in sorted(image.finals))
        del names
    # fresh copies cannot repeat a transition of N, so no deduplication pass
    return Oca(N.kind, tuple(states), tuple(sorted(alphabet)), N.initial, N.finals, tuple(ts))
