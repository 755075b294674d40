"""Hardness side of Parikh abstraction: the automata H_n, flattening of
reversal-bounded simple OCAs into loop-structured automata, loop counting,
removable subsets of Dyck sequences and the reduction of a loop-counting
automaton onto H_{2m}."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .core import (
    EPS,
    NOOP,
    ZERO,
    Config,
    InvalidAutomaton,
    Oca,
    OcaError,
    Transition,
    count_reversals,
    make_oca,
    paper_size,
)
from .reduction import Substitution


class NotDyck(OcaError):
    pass


class SumOutOfRange(OcaError):
    pass


class NotRba(OcaError):
    pass


class NotLoopCounting(OcaError):
    pass


class NotReversalBounded(OcaError):
    pass


# --------------------------------------------------------------- H_n

def hard_state(i: int) -> str:
    return f"q{i}"


def loop_letter(i: int, k: int) -> str:
    return f"a{i}_{k}"


def cross_letter(i: int, j: int) -> str:
    return f"c{i}_{j}"


def hard_automaton(n: int) -> Oca:
    """States q1..qn.  At q_i a loop a{i}_{k} adds (-1)^(i+1) * k for every
    k in 1..n, and c{i}_{j} moves from q_i to q_j (i < j) without touching
    the counter."""
    if n < 1:
        raise ValueError("n must be at least 1")
    ts = []
    for i in range(1, n + 1):
        sign = 1 if i % 2 else -1
        ts += [(hard_state(i), loop_letter(i, k), sign * k, hard_state(i)) for k in range(1, n + 1)]
    for i, j in combinations(range(1, n + 1), 2):
        ts.append((hard_state(i), cross_letter(i, j), NOOP, hard_state(j)))
    states = [hard_state(i) for i in range(1, n + 1)]
    return make_oca("extended", ts, hard_state(1), [hard_state(n)], states)


def hard_size_reported(n: int) -> int:
    """Size figure n(n+1)/2, obtained by charging k-1 once per weight k."""
    return n * (n + 1) // 2


def hard_size_literal(n: int) -> int:
    """States plus max(0, k-1) for each of the n loops of weight k."""
    return n + n * n * (n - 1) // 2


def restrict_letters(A: Oca, letters) -> Oca:
    """Drop every transition reading a letter outside `letters` (ε stays)."""
    keep = set(letters)
    ts = tuple(t for t in A.transitions if t.label is None or t.label in keep)
    alphabet = tuple(a for a in A.alphabet if a in keep)
    return Oca(A.kind, A.states, alphabet, A.initial, A.finals, ts)


# --------------------------------------------------------------- RBA

@dataclass(frozen=True)
class Rba:
    """An extended OCA whose non-loop transitions strictly climb `order` and
    whose loops at each state all push the counter the same way."""

    automaton: Oca
    order: dict

    def __post_init__(self):
        check_rba(self.automaton, self.order)

    @property
    def loop_counting(self) -> bool:
        return all(t.op == 0 for t in self.automaton.transitions if t.src != t.dst)


def check_rba(A: Oca, order: dict):
    for t in A.transitions:
        if t.op == ZERO:
            raise NotRba("zero tests are not allowed")
        if t.src != t.dst and not order[t.src] < order[t.dst]:
            raise NotRba(f"{t.src!r} -> {t.dst!r} does not climb the order")
    signs = {}
    for t in A.transitions:
        if t.src == t.dst and t.op:
            signs.setdefault(t.src, set()).add(t.op > 0)
    for q, s in signs.items():
        if len(s) > 1:
            raise NotRba(f"state {q!r} has loops of both signs")


def as_rba(A: Oca) -> Rba:
    """Validate A and attach a topological order of its loop-free graph."""
    if A.kind != "extended":
        A = A.with_kind("extended") if A.kind == "simple" else A
    if A.kind != "extended":
        raise NotRba("expected an extended or simple OCA")
    g = nx.DiGraph()
    g.add_nodes_from(A.states)
    g.add_edges_from((t.src, t.dst) for t in A.transitions if t.src != t.dst)
    if not nx.is_directed_acyclic_graph(g):
        raise NotRba("non-loop transitions form a cycle")
    order = {q: i for i, q in enumerate(nx.lexicographical_topological_sort(g))}
    return Rba(A, order)


def is_loop_counting(A: Oca) -> bool:
    return all(t.op == 0 for t in A.transitions if t.src != t.dst)


# --------------------------------------------------------------- flattening

def cycle_letter(p: str, z: int) -> str:
    return f"cyc({p},{z})"


def flatten_bound(n: int) -> int:
    return 2 * n * n + n


def cycle_nfa(A: Oca, p: str, z: int) -> Oca:
    """NFA for the cycles of A at p with effect z whose counter effect stays
    inside [0, z] (or [z, 0]) along the way; states Q x that interval."""
    lo, hi = (0, z) if z >= 0 else (z, 0)

    def st(q, y):
        return f"{q}@{y}"

    ts = []
    for t in A.transitions:
        if (t.op < 0) if z >= 0 else (t.op > 0):
            continue
        for y in range(lo, hi + 1):
            if lo <= y + t.op <= hi:
                ts.append((st(t.src, y), t.label, ZERO, st(t.dst, y + t.op)))
    states = [st(q, y) for q in A.states for y in range(lo, hi + 1)]
    return make_oca("nfa", ts, st(p, 0), [st(p, z)], states, A.alphabet)


def scan_reversals(A: Oca, r: int, max_len: int = 8):
    """Look for an accepting run of length at most max_len with more than r
    reversals.  Finding none proves nothing; finding one is conclusive."""
    start = (A.initial, 0, 0, 0)
    seen = {start}
    layer = [start]
    for _ in range(max_len):
        nxt = []
        for q, c, last, rev in layer:
            for t in A.out[q]:
                d = c + t.op
                if d < 0:
                    continue
                sign = (t.op > 0) - (t.op < 0)
                nrev = rev + (1 if sign and last and sign != last else 0)
                item = (t.dst, d, sign or last, min(nrev, r + 1))
                if item in seen:
                    continue
                if item[3] > r and A.accepts_at(Config(t.dst, d)):
                    raise NotReversalBounded(f"accepting run with more than {r} reversals")
                seen.add(item)
                nxt.append(item)
        layer = nxt


def flatten_to_rba(A: Oca, r: int, scan: bool = True) -> tuple:
    """Flatten an r-reversal-bounded simple OCA.

    States (p, i, j): j counts finished phases (even phases only go up, odd
    ones only go down), i counts skeleton steps inside the phase up to
    B = 2n^2 + n.  Each state carries loops reading cyc(p,z) with z of the
    phase's sign, |z| <= n, and cyc(p,z) is substituted by the NFA of
    z-effect cycles at p.
    """
    if A.kind != "simple":
        raise InvalidAutomaton("flatten_to_rba expects a simple OCA")
    if r < 0:
        raise ValueError("r must be non-negative")
    if scan:
        scan_reversals(A, r)
    n = len(A.states)
    B = flatten_bound(n)

    def st(p, i, j):
        return f"{p}|{i}|{j}"

    ts = []
    for j in range(r + 1):
        up = j % 2 == 0
        phase = [t for t in A.transitions if (t.op >= 0 if up else t.op <= 0)]
        for i in range(B):
            for t in phase:
                ts.append((st(t.src, i, j), t.label, t.op, st(t.dst, i + 1, j)))
            for p in A.states:
                ts.append((st(p, i, j), EPS, NOOP, st(p, i + 1, j)))
        if j < r:
            for p in A.states:
                for i in range(B + 1):
                    ts.append((st(p, i, j), EPS, NOOP, st(p, 0, j + 1)))
        sign = 1 if up else -1
        for p in A.states:
            for k in range(n + 1):
                z = sign * k
                for i in range(B + 1):
                    ts.append((st(p, i, j), cycle_letter(p, z), z, st(p, i, j)))
    states = [st(p, i, j) for j in range(r + 1) for i in range(B + 1) for p in A.states]
    out = make_oca("extended", ts, st(A.initial, 0, 0), [st(A.final, B, r)], states, A.alphabet)
    order = {st(p, i, j): j * (B + 1) + i for j in range(r + 1) for i in range(B + 1) for p in A.states}
    images = {cycle_letter(p, z): cycle_nfa(A, p, z) for p in A.states for z in range(-n, n + 1)}
    return Rba(out, order), Substitution(images)


def flatten_size_bound(n: int, r: int) -> int:
    return 6 * n ** 5 * (r + 1)


# --------------------------------------------------------------- loop counting

def loop_counting_constants(n: int) -> tuple:
    """(N, M, K) = (n^2, 2N^2 + N, N + M n)."""
    N = n * n
    M = 2 * N * N + N
    return N, M, N + M * n


def to_loop_counting(R: Rba, n: int | None = None) -> tuple:
    """Move the counter effect of non-loop transitions into a state
    component k in [-K, K]; a loop may also be taken "in the state", moving
    k and bumping a switch count m <= M.  Returns (Rba, K).

    n defaults to the size of the input (states plus extended add charges).
    """
    if not isinstance(R, Rba):
        raise NotRba("expected an Rba")
    A = R.automaton
    if n is None:
        n = paper_size(A)
    N, M, K = loop_counting_constants(n)

    def st(q, k, m):
        return f"{q}|{k}|{m}"

    ts = []
    for t in A.transitions:
        s = t.op
        for m in range(M + 1):
            for k in range(-K, K + 1):
                if t.src != t.dst:
                    if -K <= k + s <= K:
                        ts.append((st(t.src, k, m), t.label, NOOP, st(t.dst, k + s, m)))
                    continue
                ts.append((st(t.src, k, m), t.label, s, st(t.src, k, m)))
                if m < M and s and -K <= k + s <= K:
                    ts.append((st(t.src, k, m), t.label, NOOP, st(t.src, k + s, m + 1)))
    states = [st(q, k, m) for q in A.states for k in range(-K, K + 1) for m in range(M + 1)]
    finals = [st(f, 0, m) for f in sorted(A.finals) for m in range(M + 1)]
    out = make_oca("extended", ts, st(A.initial, 0, 0), finals, states, A.alphabet)
    span = 2 * K + 1
    order = {st(q, k, m): (R.order[q] * (M + 1) + m) * span + (k + K)
             for q in A.states for k in range(-K, K + 1) for m in range(M + 1)}
    return Rba(out, order), K


# --------------------------------------------------------------- onto H_{2m}

@dataclass(frozen=True)
class HardReduction:
    m: int
    sigma: Substitution
    chi: dict


def _letter_nfa(loops, middle, after, alphabet) -> Oca:
    """Two states: `loops` on the first, `middle` letters across, `after`
    loops on the second."""
    ts = [("g0", a, ZERO, "g0") for a in loops]
    ts += [("g0", a, ZERO, "g1") for a in middle]
    ts += [("g1", a, ZERO, "g1") for a in after]
    return make_oca("nfa", ts, "g0", ["g1"], ["g0", "g1"], alphabet)


def _single_final(A: Oca) -> Oca:
    """Collect the finals in one fresh sink unless there already is a single
    final state without outgoing non-loop transitions."""
    if len(A.finals) == 1 and all(t.dst == t.src for t in A.out[A.final]):
        return A
    acc = "end"
    while acc in A.states:
        acc += "'"
    ts = list(A.transitions) + [Transition(f, EPS, NOOP, acc) for f in sorted(A.finals)]
    return Oca(A.kind, A.states + (acc,), A.alphabet, A.initial, frozenset([acc]), tuple(ts))


def reduce_to_hard_full(R: Rba) -> HardReduction:
    """Map a loop-counting automaton onto H_{2m}.

    A fresh initial state with an ε step is put in front, so every run has a
    non-loop transition and m = n + 1.  Several final states, or a final
    state with exits, get a fresh common sink first (one more state).  States are numbered by a topological
    order phi (ties broken by state id) and placed at chi = 2 phi - tau,
    where tau is 1 for states whose loops never decrement.
    """
    A = R.automaton if isinstance(R, Rba) else R
    if not is_loop_counting(A):
        raise NotLoopCounting("a non-loop transition changes the counter")
    A = _single_final(A)
    pre = "pre"
    while pre in A.states:
        pre += "'"
    ts = (Transition(pre, EPS, NOOP, A.initial),) + A.transitions
    A = Oca(A.kind, (pre,) + A.states, A.alphabet, pre, A.finals, ts)
    R = as_rba(A)

    g = nx.DiGraph()
    g.add_nodes_from(A.states)
    g.add_edges_from((t.src, t.dst) for t in A.transitions if t.src != t.dst)
    g.remove_nodes_from([A.initial, A.final])
    rank = [A.initial] + list(nx.lexicographical_topological_sort(g)) + [A.final]
    m = len(rank)
    phi = {q: i + 1 for i, q in enumerate(rank)}

    loops = {q: [t for t in A.out[q] if t.dst == q] for q in A.states}
    tau = {}
    for q in A.states:
        effects = [t.op for t in loops[q] if t.op]
        tau[q] = 1 if effects and all(e > 0 for e in effects) else 0
    tau[A.initial], tau[A.final] = 1, 0
    chi = {q: 2 * phi[q] - tau[q] for q in A.states}
    where = {s: q for q, s in chi.items()}

    def usable(q, t):
        # positive loops at the final state and negative ones at the initial
        # state can never be balanced
        return (t.op >= 0) if tau[q] else (t.op <= 0)

    images = {}
    alphabet = A.alphabet
    top = 2 * m
    for t in A.transitions:
        if t.src == t.dst and abs(t.op) > top:
            raise NotLoopCounting(f"loop weight {t.op} exceeds {top}")
    for i in range(1, top + 1):
        q = where.get(i)
        for k in range(1, top + 1):
            labels = [] if q is None else sorted(
                {t.label for t in loops[q] if usable(q, t) and abs(t.op) == k}, key=str)
            images[loop_letter(i, k)] = _letter_nfa([], labels, [], alphabet)
    idle = {s: sorted({t.label for t in loops[q] if t.op == 0}, key=str) for s, q in where.items()}
    for s, t_ in combinations(range(1, top + 1), 2):
        p, q = where.get(s), where.get(t_)
        across = [] if p is None or q is None else sorted(
            {t.label for t in A.out[p] if t.dst == q and t.src != t.dst}, key=str)
        if not across:
            images[cross_letter(s, t_)] = _letter_nfa([], [], [], alphabet)
        else:
            images[cross_letter(s, t_)] = _letter_nfa(idle[s], across, idle[t_], alphabet)
    return HardReduction(m, Substitution(images), chi)


def reduce_to_hard(R: Rba) -> tuple:
    out = reduce_to_hard_full(R)
    return out.m, out.sigma


def live_letters(sigma: Substitution) -> list:
    """Letters whose image accepts something; the rest can be dropped from
    H_{2m} without changing the substituted language."""
    return sorted(a for a, N in sigma.images.items() if _accepts_any(N))


def _accepts_any(N: Oca) -> bool:
    seen = {N.initial}
    todo = deque(seen)
    while todo:
        q = todo.popleft()
        if q in N.finals:
            return True
        for t in N.out[q]:
            if t.dst not in seen:
                seen.add(t.dst)
                todo.append(t.dst)
    return False


# --------------------------------------------------------------- Dyck

@dataclass(frozen=True)
class DyckSequence:
    values: tuple
    r: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        total = 0
        for x in self.values:
            if abs(x) > self.N:
                raise NotDyck(f"|{x}| exceeds {self.N}")
            total += x
            if total < 0:
                raise NotDyck("a prefix sum is negative")
        if count_reversals(self.values) > self.r:
            raise NotDyck(f"more than {self.r} sign alternations")

    @property
    def bound(self) -> int:
        return 2 * self.r * (2 * self.N * self.N + self.N)


def is_removable(values, chosen) -> bool:
    """Removing the (1-based) positions in `chosen` leaves non-negative
    prefix sums and the chosen values carry the whole sum."""
    chosen = set(chosen)
    if sum(values[i - 1] for i in chosen) != sum(values):
        return False
    total = 0
    for i, x in enumerate(values, 1):
        if i not in chosen:
            total += x
            if total < 0:
                return False
    return True


def _exhaustive(values, bound):
    n = len(values)
    for size in range(min(n, bound) + 1):
        for pick in combinations(range(1, n + 1), size):
            if is_removable(values, pick):
                return set(pick)
    return None


def _prefix(values):
    sums = [0]
    for x in values:
        sums.append(sums[-1] + x)
    return sums


def _switch(values, N):
    """Positions of |v| copies of some u > 0 before the highest prefix sum
    and u copies of some v < 0 after it, such that dropping them keeps the
    sequence Dyck.  Copies nearest the peak are preferred."""
    sums = _prefix(values)
    peak = max(range(len(sums)), key=lambda i: (sums[i], -i))
    for u in range(1, N + 1):
        left = [i for i in range(peak, 0, -1) if values[i - 1] == u]
        for v in range(-1, -N - 1, -1):
            right = [i for i in range(peak + 1, len(values) + 1) if values[i - 1] == v]
            if len(left) < -v or len(right) < u:
                continue
            drop = set(left[:-v]) | set(right[:u])
            rest = [x for i, x in enumerate(values, 1) if i not in drop]
            if min(_prefix(rest)) >= 0:
                return drop
    return None


def _descend(values, bound, N):
    nonzero = [i for i, x in enumerate(values, 1) if x]
    if len(nonzero) <= bound:
        return set(range(1, len(values) + 1)) if len(values) <= bound else set(nonzero)
    drop = _switch(values, N)
    if drop is None:
        return None
    keep = [i for i in range(1, len(values) + 1) if i not in drop]
    inner = _descend([values[i - 1] for i in keep], bound, N)
    if inner is None:
        return None
    return {keep[i - 1] for i in inner}


def removable_subset(x, r: int | None = None, N: int | None = None) -> set:
    """Positions I (1-based) with sum_I x = sum x, |I| <= 2r(2N^2 + N), whose
    removal leaves a Dyck sequence.

    Switches a run of equal rises before the highest point against a run of
    equal falls after it until the sequence is short enough; an exhaustive
    search takes over for short inputs if that gets stuck.  The result is
    checked before it is returned.
    """
    if not isinstance(x, DyckSequence):
        values = tuple(x)
        if N is None:
            N = max((abs(v) for v in values), default=1) or 1
        if r is None:
            r = max(1, count_reversals(values))
        x = DyckSequence(values, r, N)
    values = list(x.values)
    if not 0 <= sum(values) <= x.N:
        raise SumOutOfRange(f"sum {sum(values)} outside [0, {x.N}]")
    bound = x.bound
    chosen = _descend(values, bound, x.N)
    if chosen is None or len(chosen) > bound or not is_removable(values, chosen):
        chosen = _exhaustive(values, bound) if len(values) <= 12 else None
    if chosen is None or len(chosen) > bound or not is_removable(values, chosen):
        raise RuntimeError(f"no removable subset found for {values}")
    return chosen

