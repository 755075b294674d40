"""Parikh-equivalent NFAs whose size does not depend exponentially on the
alphabet.  Pipeline per pair of states: band automaton (summarised counter
excursions), reversal restriction, a pushdown automaton matching pushes
with pops from both ends of a run, and an NFA keeping a bounded stack in its
state.  The pieces are glued to the low-counter skeleton."""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass

from .core import (
    DEC,
    EPS,
    INC,
    NOOP,
    ZERO,
    BudgetExceeded,
    InvalidAutomaton,
    Oca,
    Transition,
    make_oca,
    trim,
)
from .reduction import build_skeleton, lift_abstraction

RISING, FALLING, FLAT = "rise", "fall", "flat"
DEFAULT_STATE_BUDGET = 5_000_000


def _require_simple(A: Oca):
    if A.kind != "simple":
        raise InvalidAutomaton("expected a simple OCA")


def _summary_state(q, j):
    return f"sum:{q},{j}"


def _transfer_state(j, q):
    return f"xfer:{j},{q}"


def band_state_count(n: int, D: int) -> int:
    return n + 2 * n * (2 * D + 1)


def build_band_automaton(A: Oca, D: int) -> Oca:
    """A plus summary copies: from q the automaton may enter (q,0), simulate
    A while tracking the net effect j in [-D, D] without touching the real
    counter, then hand j back to the counter through (j,q) using only
    increments or only decrements, and resume in q."""
    _require_simple(A)
    if D < 0:
        raise ValueError("band width must be non-negative")
    ts = list(A.transitions)
    span = range(-D, D + 1)
    for q in A.states:
        ts.append(Transition(q, EPS, NOOP, _summary_state(q, 0)))
        for j in span:
            ts.append(Transition(_summary_state(q, j), EPS, NOOP, _transfer_state(j, q)))
            if j > 0:
                ts.append(Transition(_transfer_state(j, q), EPS, INC, _transfer_state(j - 1, q)))
            elif j < 0:
                ts.append(Transition(_transfer_state(j, q), EPS, DEC, _transfer_state(j + 1, q)))
        ts.append(Transition(_transfer_state(0, q), EPS, NOOP, q))
    for t in A.transitions:
        for j in span:
            k = j + t.op
            if -D <= k <= D:
                ts.append(Transition(_summary_state(t.src, j), t.label, NOOP, _summary_state(t.dst, k)))
    states = list(A.states)
    states += [_summary_state(q, j) for q in A.states for j in span]
    states += [_transfer_state(j, q) for q in A.states for j in span]
    return make_oca("simple", ts, A.initial, A.finals, states, A.alphabet)


def _reversal_state(q, r, phase):
    return f"rv:{q},{r},{phase}"


def reversal_state_count(n: int, R: int) -> int:
    """Tracking states of reversal_restrict; the result has one more, a
    collecting final state."""
    return 3 * n * (R + 1)


def _next_phase(phase, r, op):
    if op == 0:
        return phase, r
    direction = RISING if op > 0 else FALLING
    if phase in (FLAT, direction):
        return direction, r
    return direction, r + 1


def reversal_restrict(A: Oca, R: int) -> Oca:
    """Simple OCA accepting the words A accepts along runs with at most R
    reversals (alternations between increasing and decreasing blocks)."""
    _require_simple(A)
    if R < 0:
        raise ValueError("reversal bound must be non-negative")
    phases = (RISING, FALLING, FLAT)
    ts = []
    for t in A.transitions:
        for r in range(R + 1):
            for phase in phases:
                nxt, s = _next_phase(phase, r, t.op)
                if s <= R:
                    ts.append(Transition(_reversal_state(t.src, r, phase), t.label, t.op,
                                         _reversal_state(t.dst, s, nxt)))
    end = "rv:end"
    while end in A.states:
        end += "'"
    ts += [Transition(_reversal_state(A.final, r, phase), EPS, NOOP, end)
           for r in range(R + 1) for phase in phases]
    states = [_reversal_state(q, r, phase) for q in A.states for r in range(R + 1) for phase in phases]
    states.append(end)
    return make_oca("simple", ts, _reversal_state(A.initial, 0, FLAT), [end], states, A.alphabet)


def well_matched_pairs(A: Oca) -> set:
    """Pairs (p, q) joined by a run of A with net effect 0 that never drops
    below its starting counter value (so it works from any counter)."""
    _require_simple(A)
    index = {q: i for i, q in enumerate(A.states)}
    n = len(A.states)
    rows = [1 << i for i in range(n)]
    dec_into = [0] * n
    for t in A.transitions:
        if t.op == NOOP:
            rows[index[t.src]] |= 1 << index[t.dst]
        elif t.op == DEC:
            dec_into[index[t.src]] |= 1 << index[t.dst]
    incs = [(index[t.src], index[t.dst]) for t in A.transitions if t.op == INC]
    changed = True
    while changed:
        changed = False
        for p, p2 in incs:
            mask = rows[p2]
            gain = 0
            while mask:
                low = mask & -mask
                gain |= dec_into[low.bit_length() - 1]
                mask ^= low
            if gain & ~rows[p]:
                rows[p] |= gain
                changed = True
        for p in range(n):
            mask = rows[p]
            seen = 0
            todo = mask
            while todo:
                low = todo & -todo
                todo ^= low
                seen |= low
                extra = rows[low.bit_length() - 1] & ~mask
                if extra:
                    mask |= extra
                    todo |= extra & ~seen
            if mask != rows[p]:
                rows[p] = mask
                changed = True
    names = A.states
    out = set()
    for p in range(n):
        mask = rows[p]
        while mask:
            low = mask & -mask
            out.add((names[p], names[low.bit_length() - 1]))
            mask ^= low
    return out


@dataclass(frozen=True)
class Pda:
    """Pushdown automaton given by its transition list.  Actions are
    ("internal",), ("push", x), ("pop", x), ("bottom",) and ("return",).
    "bottom" only checks that the stack is empty; "return" pops whatever
    symbol is on top and moves to the state named by it (its dst is None)."""

    states: tuple
    alphabet: tuple
    stack_alphabet: tuple
    initial: object
    final: object
    transitions: tuple

    def out(self, state):
        table = self.__dict__.get("_out")
        if table is None:
            table = {}
            for t in self.transitions:
                table.setdefault(t[0], []).append(t)
            object.__setattr__(self, "_out", table)
        return table.get(state, ())


PDA_START, PDA_ACCEPT = "start", "accept"


def matching_stack_alphabet_size(n: int, letters: int) -> int:
    return n * n + n * n * letters


def build_matching_pda(A: Oca, prune: bool = False) -> Pda:
    """PDA whose runs rebuild runs of A up to Parikh image, working inwards
    from both ends.  A state (p, q) owes a well-matched run from p to q;
    matched increment/decrement pairs are consumed together (the second
    letter through a transient state (p, q, b)); a split at a guessed
    middle state pushes one half as an obligation.  Only pairs are pushed.

    prune=True keeps only what is needed to rebuild every run the way the
    height argument does it: pairs joined by a well-matched run; moves from
    the right only once the left end opens with an increment; splits only
    right after the block opened at the left end closes.  The Parikh image
    and the height bound are unchanged.
    """
    _require_simple(A)
    Q = A.states
    noops_from, noops_into, incs_from, decs_into = {}, {}, {}, {}
    for t in A.transitions:
        if t.op == NOOP:
            noops_from.setdefault(t.src, []).append(t)
            noops_into.setdefault(t.dst, []).append(t)
        elif t.op == INC:
            incs_from.setdefault(t.src, []).append(t)
        else:
            decs_into.setdefault(t.dst, []).append(t)
    if prune:
        good = well_matched_pairs(A)
        pairs = [(p, q) for p in Q for q in Q if (p, q) in good]
        decs_from = {}
        for ts_ in decs_into.values():
            for t in ts_:
                decs_from.setdefault(t.src, []).append(t)
        # pairs joined by a run that opens with an increment and ends with
        # the decrement matching it
        block = {(up.src, down.dst)
                 for p, q in good
                 for up in A.into[p] if up.op == INC
                 for down in decs_from.get(q, ())}
    else:
        pairs = [(p, q) for p in Q for q in Q]
        good = set(pairs)
        block = good

    def split_points(p, q):
        if not prune:
            return Q
        if p not in incs_from or q not in decs_into:
            return ()
        return [r for r in Q if (p, r) in block and (r, q) in good]

    ts = [(PDA_START, EPS, ("internal",), (A.initial, f)) for f in sorted(A.finals) if (A.initial, f) in good]
    triples = set()
    for p, q in pairs:
        here = (p, q)
        for t in noops_from.get(p, ()):
            if (t.dst, q) in good:
                ts.append((here, t.label, ("internal",), (t.dst, q)))
        if not prune or p in incs_from:
            for t in noops_into.get(q, ()):
                if (p, t.src) in good:
                    ts.append((here, t.label, ("internal",), (p, t.src)))
        for up in incs_from.get(p, ()):
            for down in decs_into.get(q, ()):
                inner = (up.dst, down.src)
                if inner not in good:
                    continue
                if down.label is None:
                    ts.append((here, up.label, ("internal",), inner))
                else:
                    mid = inner + (down.label,)
                    triples.add(mid)
                    ts.append((here, up.label, ("internal",), mid))
        for r in split_points(p, q):
            ts.append((here, EPS, ("push", (r, q)), (p, r)))
            ts.append((here, EPS, ("push", (p, r)), (r, q)))
        if p == q:
            ts.append((here, EPS, ("return",), None))
            ts.append((here, EPS, ("bottom",), PDA_ACCEPT))
    mids = sorted(triples, key=repr)
    ts.extend((mid, mid[2], ("internal",), mid[:2]) for mid in mids)
    states = (PDA_START, PDA_ACCEPT) + tuple(pairs) + tuple(mids)
    return Pda(states, A.alphabet, tuple(pairs), PDA_START, PDA_ACCEPT, tuple(ts))


def stack_height_for(R: int) -> int:
    return 1 + math.ceil(math.log2(R + 1))


def bounded_stack_state_count(pda_states: int, stack_symbols: int, h: int) -> int:
    return pda_states * sum(stack_symbols ** i for i in range(h + 1))


def pda_to_nfa_bounded_stack(P: Pda, h: int, trimmed: bool = False,
                             budget: int | None = DEFAULT_STATE_BUDGET) -> Oca:
    """NFA over configurations (state, stack) with stack height at most h.

    trimmed=False builds every configuration; trimmed=True explores only the
    configurations reachable from the start and keeps those that can still
    accept.  The budget caps the number of configurations materialised.
    """
    if h < 0:
        raise ValueError("stack height must be non-negative")
    if trimmed:
        return _bounded_stack_reachable(P, h, budget)
    total = bounded_stack_state_count(len(P.states), len(P.stack_alphabet), h)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} states exceed the budget of {budget}")
    stacks = [()]
    layer = [()]
    for _ in range(h):
        layer = [s + (x,) for s in layer for x in P.stack_alphabet]
        stacks.extend(layer)
    names = {}

    def name(state, stack):
        key = (state, stack)
        if key not in names:
            names[key] = f"c{len(names)}"
        return names[key]

    for s in P.states:
        for st in stacks:
            name(s, st)
    ts = []
    for s in P.states:
        for st in stacks:
            for nxt, stack in _moves(P, s, st, h):
                ts.append((name(s, st), nxt[0], ZERO, name(nxt[1], stack)))
    return make_oca("nfa", ts, name(P.initial, ()), [name(P.final, ())], list(names.values()), P.alphabet)


def _moves(P: Pda, state, stack, h):
    """Successors as ((label, state'), stack'); the stack top is last."""
    for _, label, action, dst in P.out(state):
        kind = action[0]
        if kind == "internal":
            yield (label, dst), stack
        elif kind == "push":
            if len(stack) < h:
                yield (label, dst), stack + (action[1],)
        elif kind == "pop":
            if stack and stack[-1] == action[1]:
                yield (label, dst), stack[:-1]
        elif kind == "return":
            if stack:
                yield (label, stack[-1]), stack[:-1]
        elif not stack:
            yield (label, dst), stack


def _bounded_stack_reachable(P: Pda, h: int, budget):
    # configurations and edges live in flat int arrays; stacks are interned
    # as (parent, top) chains so a configuration key is a single int
    nq = len(P.states)
    qi = {s: i for i, s in enumerate(P.states)}
    labels = [EPS] + list(P.alphabet)
    li = {a: i for i, a in enumerate(labels)}
    syms = {x: i for i, x in enumerate(P.stack_alphabet)}
    nsym = len(syms)
    codes = {"internal": 0, "push": 1, "pop": 2, "bottom": 3, "return": 4}
    moves = [[] for _ in range(nq)]
    for src, label, action, dst in P.transitions:
        sym = syms[action[1]] if len(action) > 1 else -1
        moves[qi[src]].append((codes[action[0]], sym, li[label], -1 if dst is None else qi[dst]))
    # state entered when a symbol is returned to
    sym_state = [qi.get(x, -1) for x in P.stack_alphabet]
    parent, top, depth = array("i", [0]), array("i", [-1]), array("i", [0])
    child = {}
    init = qi[P.initial]
    index = {init: 0}
    conf_q, conf_s = array("i", [init]), array("i", [0])
    e_src, e_lab, e_dst = array("i"), array("i"), array("i")
    node = 0
    while node < len(conf_q):
        q, s = conf_q[node], conf_s[node]
        seen = set()
        for kind, sym, lab, dst in moves[q]:
            if kind == 0:
                t = s
            elif kind == 1:
                if depth[s] >= h:
                    continue
                t = child.get(s * nsym + sym)
                if t is None:
                    t = len(parent)
                    child[s * nsym + sym] = t
                    parent.append(s)
                    top.append(sym)
                    depth.append(depth[s] + 1)
            elif kind == 2:
                if top[s] != sym:
                    continue
                t = parent[s]
            elif kind == 4:
                if not s:
                    continue
                dst = sym_state[top[s]]
                t = parent[s]
            elif s:
                continue
            else:
                t = 0
            key = t * nq + dst
            nxt = index.get(key)
            if nxt is None:
                nxt = len(conf_q)
                index[key] = nxt
                conf_q.append(dst)
                conf_s.append(t)
                if budget is not None and nxt + 1 > budget:
                    raise BudgetExceeded(f"more than {budget} reachable configurations")
            if (lab, nxt) in seen:
                continue
            seen.add((lab, nxt))
            e_src.append(node)
            e_lab.append(lab)
            e_dst.append(nxt)
        node += 1
    goal = index.get(qi[P.final])
    del index, child, conf_q, conf_s, parent, top, depth
    n, m = node, len(e_src)
    # reverse adjacency in compressed form
    start = array("i", bytes(4 * (n + 1)))
    for d in e_dst:
        start[d + 1] += 1
    for i in range(n):
        start[i + 1] += start[i]
    fill = array("i", start)
    rev = array("i", bytes(4 * m))
    for k in range(m):
        d = e_dst[k]
        rev[fill[d]] = e_src[k]
        fill[d] += 1
    del fill
    alive = bytearray(n)
    if goal is not None:
        alive[goal] = 1
        work = [goal]
        while work:
            v = work.pop()
            for k in range(start[v], start[v + 1]):
                u = rev[k]
                if not alive[u]:
                    alive[u] = 1
                    work.append(u)
    alive[0] = 1
    del rev, start
    names = [f"c{i}" if alive[i] else None for i in range(n)]
    ts = tuple(Transition(names[s], labels[a], ZERO, names[d])
               for s, a, d in zip(e_src, e_lab, e_dst) if alive[s] and alive[d])
    states = tuple(x for x in names if x is not None)
    finals = frozenset([names[goal]]) if goal is not None else frozenset()
    return Oca("nfa", states, tuple(sorted(set(P.alphabet))), "c0", finals, ts)


def default_reversals(K: int) -> int:
    return 2 * K * K + K


def pair_automaton(piece: Oca, K: int, R: int, h: int | None = None,
                   budget: int | None = DEFAULT_STATE_BUDGET) -> Oca:
    """NFA Parikh-equivalent to the words the band automaton of piece
    accepts with at most R reversals."""
    h = stack_height_for(R) if h is None else h
    restricted = trim(reversal_restrict(build_band_automaton(trim(piece), K), R))
    pda = build_matching_pda(restricted, prune=True)
    return pda_to_nfa_bounded_stack(pda, h, trimmed=True, budget=budget)


@dataclass
class GeneralReport:
    K: int
    reversals: int
    stack_height: int
    skeleton_states: int
    letter_edges: int
    largest_pair: int
    states: int

    @property
    def bound(self) -> int:
        """|A^K| + K^2 max |B^{pq}|, plus two gadget states per letter edge
        of the skeleton."""
        return self.skeleton_states + 2 * self.letter_edges + self.K * self.K * self.largest_pair


def parikh_nfa_general(A: Oca, reversals: int | None = None, stack_height: int | None = None,
                       state_budget: int | None = DEFAULT_STATE_BUDGET, report: list | None = None) -> Oca:
    """Parikh-equivalent NFA for a simple OCA with K = |Q|.

    reversals defaults to 2K^2 + K and stack_height to 1 + ceil(log2(R+1)).
    The state budget applies to each pair automaton and to the glued
    result.  When report is a list, a GeneralReport is appended to it.
    """
    _require_simple(A)
    K = len(A.states)
    R = default_reversals(K) if reversals is None else reversals
    h = stack_height_for(R) if stack_height is None else stack_height
    sizes = []

    def per_pair(p, q, piece):
        N = pair_automaton(piece, K, R, h, state_budget)
        sizes.append(len(N.states))
        return N

    out = lift_abstraction(A, K, "parikh", per_pair)
    if state_budget is not None and len(out.states) > state_budget:
        raise BudgetExceeded(f"{len(out.states)} states exceed the budget of {state_budget}")
    if report is not None:
        skeleton = build_skeleton(A, K)
        letter_edges = sum(1 for t in skeleton.transitions if t.label in A.alphabet)
        report.append(GeneralReport(K, R, h, len(skeleton.states), letter_edges,
                                    max(sizes, default=0), len(out.states)))
    return out
