"""Automata shared by the test modules."""

import random
from collections import deque

from ocabstract.core import EPS, make_oca


def A_ab():
    """a^n b^n: push on a, ε switch, pop on b."""
    return make_oca("simple", [("s", "a", 1, "s"), ("s", EPS, 0, "t"), ("t", "b", -1, "t")], "s", ["t"])


def random_simple(rng: random.Random, n: int = 3, letters=("a", "b"), m=None, lo=5, hi=9) -> object:
    """ε-free simple OCA with n states and m random transitions."""
    states = [f"q{i}" for i in range(n)]
    m = m or rng.randint(lo, hi)
    ts = [(rng.choice(states), rng.choice(letters), rng.choice([1, -1, 0]), rng.choice(states))
          for _ in range(m)]
    return make_oca("simple", ts, states[0], [rng.choice(states)], states, letters)


def random_nontrivial(rng, n=3, norm=8, at_least=3, **kw):
    """Random simple OCA whose Parikh image has at least `at_least` vectors
    of norm <= norm."""
    from ocabstract.oracle import enumerate_parikh

    while True:
        A = random_simple(rng, n, **kw)
        if len(enumerate_parikh(A, norm)) >= at_least:
            return A


def curated():
    """Small hand-picked automata with different shapes."""
    return {
        "anbn": A_ab(),
        "ab": make_oca("simple", [("p", "a", 0, "q"), ("q", "b", 0, "r")], "p", ["r"]),
        "dyck": make_oca("simple", [("p", "a", 1, "p"), ("p", "b", -1, "p")], "p", ["p"]),
        "swap": make_oca("simple", [("p", "a", 1, "q"), ("q", "b", 1, "p"), ("p", "a", -1, "r"),
                                    ("r", "b", -1, "r")], "p", ["r"]),
        "twice": make_oca("simple", [("p", "a", 1, "p"), ("p", "b", -1, "q"), ("q", "b", -1, "q"),
                                     ("q", "a", 1, "r"), ("r", "b", -1, "r")], "p", ["r"]),
    }


def hand_loop_counting():
    """Three loop-counting acyclic automata with at most 3 states."""
    return [
        make_oca("extended", [("p", "a", 1, "p"), ("p", "c", 0, "f"), ("f", "b", -1, "f")], "p", ["f"]),
        make_oca("extended", [("p", "a", 2, "p"), ("p", "x", 0, "q"), ("q", "b", -1, "q"),
                              ("q", "d", 0, "q"), ("q", "y", 0, "f")], "p", ["f"]),
        make_oca("extended", [("p", "a", 1, "p"), ("p", "b", 2, "p"), ("p", EPS, 0, "q"),
                              ("q", "c", -1, "q"), ("q", "d", 0, "f"), ("p", "x", 0, "f"),
                              ("f", "e", -1, "f")], "p", ["f"]),
    ]


def shifted(A, D):
    """Accepts w iff A reads w from (initial, D) to (final, D)."""
    ts = list(A.transitions)
    ts += [(f"up{i}", EPS, 1, f"up{i + 1}") for i in range(D)]
    ts.append((f"up{D}", EPS, 0, A.initial))
    ts.append((A.final, EPS, 0, "down0"))
    ts += [(f"down{i}", EPS, -1, f"down{i + 1}") for i in range(D)]
    return make_oca("simple", ts, "up0", [f"down{D}"], alphabet=A.alphabet)


def runs_within_reversals(A, max_len, R):
    """Words of length <= max_len accepted along a run with at most R
    reversals, by exhaustive search over (state, counter, word, ops)."""
    cap = max_len + len(A.states) ** 2 + 1
    found = set()
    start = (A.initial, 0, (), 0, 0)
    seen = {start}
    todo = deque([start])
    while todo:
        q, c, w, rev, last = todo.popleft()
        if q == A.final and c == 0:
            found.add(w)
        for t in A.out[q]:
            d = c + t.op
            if d < 0 or d > cap:
                continue
            w2 = w if t.label is None else w + (t.label,)
            if len(w2) > max_len:
                continue
            sign = (t.op > 0) - (t.op < 0)
            r2 = rev + (1 if sign and last and sign != last else 0)
            if r2 > R:
                continue
            item = (t.dst, d, w2, r2, sign or last)
            if item not in seen:
                seen.add(item)
                todo.append(item)
    return found
