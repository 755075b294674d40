"""Parikh-equivalent NFAs for a fixed alphabet, by synthesizing a semilinear
set from short accepting runs and the short cycle pairs ("directions") that
can be pumped into them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import (
    EPS,
    ZERO,
    Config,
    DimensionMismatch,
    InvalidAutomaton,
    Oca,
    make_oca,
)
from .oracle import enumerate_parikh, nfa_parikh
from .reduction import epsilon_to_letter


@dataclass(frozen=True)
class LinearSet:
    base: tuple
    periods: tuple = ()

    def contains(self, v) -> bool:
        """Membership by bounded search over the period coefficients."""
        if len(v) != len(self.base):
            raise DimensionMismatch
        rest = tuple(x - b for x, b in zip(v, self.base))
        return _decompose(rest, self.periods)


@lru_cache(maxsize=1 << 16)
def _decompose(rest, periods) -> bool:
    if any(x < 0 for x in rest):
        return False
    if not any(rest):
        return True
    if not periods:
        return False
    p, others = periods[0], periods[1:]
    k = 0
    while all(x - k * y >= 0 for x, y in zip(rest, p)):
        if _decompose(tuple(x - k * y for x, y in zip(rest, p)), others):
            return True
        k += 1
    return False


@dataclass(frozen=True)
class SemilinearSet:
    components: tuple
    dim: int

    def contains(self, v) -> bool:
        return any(c.contains(v) for c in self.components)

    def points(self, norm_bound: int) -> set:
        """Elements of norm at most norm_bound."""
        found = set()
        for c in self.components:
            if sum(c.base) > norm_bound:
                continue
            todo = [c.base]
            seen = {c.base}
            while todo:
                v = todo.pop()
                found.add(v)
                for p in c.periods:
                    w = tuple(x + y for x, y in zip(v, p))
                    if sum(w) <= norm_bound and w not in seen:
                        seen.add(w)
                        todo.append(w)
        return found


@dataclass(frozen=True)
class BoundConfig:
    """s_len bounds base vectors, L_dir bounds direction length (strictly),
    E_max bounds the counter effect of a direction's first cycle."""

    s_len: int
    L_dir: int
    E_max: int

    def __post_init__(self):
        if min(self.s_len, self.L_dir, self.E_max) <= 0:
            raise ValueError("all bounds must be positive")

    @classmethod
    def default(cls, n: int, s_len: int = 4) -> "BoundConfig":
        return cls(s_len=s_len, L_dir=2 * n ** 3 + 1, E_max=n ** 3)


@dataclass(frozen=True)
class Direction:
    alpha: tuple
    beta: tuple


def _require(A: Oca, v=None):
    if A.kind != "simple":
        raise InvalidAutomaton("expected a simple OCA")
    if v is not None and len(v) != len(A.alphabet):
        raise DimensionMismatch(f"vector {v} against alphabet {A.alphabet}")


def counter_cap(A: Oca, start: Config, vmax: tuple) -> int:
    """Largest counter value the search visits.  Without ε moves a run
    reading v changes the counter by at most |v|, so the cap is exact; ε
    moves get |Q|^2 + 1 extra headroom."""
    slack = len(A.states) ** 2 + 1 if A.has_epsilon else 0
    return start.counter + sum(vmax) + slack


def _reach(A: Oca, start: Config, vmax: tuple) -> dict:
    """Every configuration reachable from start with a Parikh image bounded
    componentwise by vmax, mapped to the set of those images."""
    key = ("reach", start, vmax)
    table = A.memo.get(key)
    if table is not None:
        return table
    index = {a: i for i, a in enumerate(A.alphabet)}
    cap = counter_cap(A, start, vmax)
    zero = (0,) * len(vmax)
    table = {start: {zero}}
    todo = [(start.state, start.counter, zero)]
    while todo:
        state, counter, vec = todo.pop()
        for t in A.out[state]:
            value = counter + t.op
            if value < 0 or value > cap:
                continue
            if t.label is None:
                w = vec
            else:
                i = index[t.label]
                if vec[i] == vmax[i]:
                    continue
                w = vec[:i] + (vec[i] + 1,) + vec[i + 1:]
            seen = table.setdefault(Config(t.dst, value), set())
            if w not in seen:
                seen.add(w)
                todo.append((t.dst, value, w))
    A.memo[key] = table
    return table


def parikh_run_exists(A: Oca, frm: Config, to: Config, v: tuple) -> bool:
    """Is there a run from frm to to whose Parikh image is exactly v?"""
    _require(A, v)
    frm, to, v = Config(*frm), Config(*to), tuple(v)
    return v in _reach(A, frm, v).get(to, ())


def _minus(v, w):
    return tuple(x - y for x, y in zip(v, w))


def _plus(v, w):
    return tuple(x + y for x, y in zip(v, w))


def _leq(v, w):
    return all(x <= y for x, y in zip(v, w))


def _chain(A: Oca, prefix: set, frm: Config, to: Config, v: tuple) -> set:
    """Extend the set of partial images accumulated up to frm by runs from
    frm to to, keeping only totals bounded by v."""
    out = set()
    for u in prefix:
        for w in _reach(A, frm, _minus(v, u)).get(to, ()):
            out.add(_plus(u, w))
    return out


def accepting_run_through_configs(A: Oca, C, v: tuple) -> bool:
    """Does an accepting run with image v visit the configurations of C in
    order?  Consecutive entries may coincide in a single position."""
    _require(A, v)
    v = tuple(v)
    if len(C) != 2 * len(A.alphabet):
        raise DimensionMismatch("C must hold 2|Σ| configurations")
    points = [Config(A.initial, 0)] + [Config(*c) for c in C] + [Config(A.final, 0)]
    partial = {(0,) * len(v)}
    for a, b in zip(points, points[1:]):
        partial = _chain(A, partial, a, b, v)
        if not partial:
            return False
    return v in partial


def _direction_at(A: Oca, first: Config, second: Config, v: tuple, bounds: BoundConfig) -> bool:
    """A direction with image v whose first cycle sits at `first` and whose
    second cycle sits at the later configuration `second`."""
    key = ("dir", first, second, v, bounds.L_dir, bounds.E_max)
    hit = A.memo.get(key)
    if hit is not None:
        return hit
    answer = False
    size = sum(v)
    if 0 < size < bounds.L_dir:
        zero = (0,) * len(v)
        for x in range(min(bounds.E_max, size) + 1):
            raised = Config(first.state, first.counter + x)
            for v1 in _reach(A, first, v).get(raised, ()):
                v2 = _minus(v, v1)
                if x == 0 and v1 != zero and v2 != zero:
                    continue
                top = Config(second.state, second.counter + x)
                if v2 in _reach(A, top, v2).get(second, ()):
                    answer = True
                    break
            if answer:
                break
    A.memo[key] = answer
    return answer


def direction_exists_for_configs(A: Oca, C, v: tuple, bounds: BoundConfig) -> bool:
    """Some ordered pair of entries of C makes a direction with image v
    available."""
    _require(A, v)
    C = [Config(*c) for c in C]
    v = tuple(v)
    return any(_direction_at(A, C[i], C[j], v, bounds) for i in range(len(C)) for j in range(i, len(C)))


def check_tuple(A: Oca, v: tuple, vs, bounds: BoundConfig) -> bool:
    """Is there an accepting run with image v at which directions with the
    images in vs are all available?

    Searches the configuration sequences C position by position.  Every
    entry of C hosts the first cycle, the second cycle or both cycles of one
    pending direction; entries may repeat, which covers a position hosting
    several roles.  Counters are bounded by |v|.
    """
    _require(A, v)
    v = tuple(v)
    vs = tuple(tuple(p) for p in vs)
    if len(vs) > len(A.alphabet):
        raise DimensionMismatch("at most |Σ| directions")
    for p in vs:
        if len(p) != len(v):
            raise DimensionMismatch(p)
    start = Config(A.initial, 0)
    goal = Config(A.final, 0)
    zero = (0,) * len(v)
    failed = set()

    def search(last: Config, partial: frozenset, status: tuple) -> bool:
        key = (last, partial, status)
        if key in failed:
            return False
        if all(s == "done" for s in status):
            if v in _chain(A, partial, last, goal, v):
                return True
            failed.add(key)
            return False
        candidates = {}
        for u in partial:
            for conf, images in _reach(A, last, _minus(v, u)).items():
                bucket = candidates.setdefault(conf, set())
                bucket.update(_plus(u, w) for w in images)
        for conf in sorted(candidates):
            nxt = frozenset(candidates[conf])
            for k, s in enumerate(status):
                if s == "done":
                    continue
                if s == "open":
                    if _direction_at(A, conf, conf, vs[k], bounds):
                        if search(conf, nxt, status[:k] + ("done",) + status[k + 1:]):
                            return True
                    if search(conf, nxt, status[:k] + (conf,) + status[k + 1:]):
                        return True
                elif _direction_at(A, s, conf, vs[k], bounds):
                    if search(conf, nxt, status[:k] + ("done",) + status[k + 1:]):
                        return True
        failed.add(key)
        return False

    return search(start, frozenset([zero]), ("open",) * len(vs))


def _vectors(dim: int, norm_cap: int):
    """All vectors of the given dimension with norm at most norm_cap."""
    if dim == 0:
        yield ()
        return
    for first in range(norm_cap + 1):
        for rest in _vectors(dim - 1, norm_cap - first):
            yield (first,) + rest


def _accepted_bases(A: Oca, s_len: int) -> list:
    dim = len(A.alphabet)
    start = Config(A.initial, 0)
    images = _reach(A, start, (s_len,) * dim).get(Config(A.final, 0), ())
    return sorted(b for b in images if sum(b) <= s_len)


def _cycle_images(A: Oca, bounds: BoundConfig) -> dict:
    """For each state, the (effect, image) pairs of its cycles shorter than
    L_dir, computed from a counter high enough to never touch 0."""
    top = bounds.L_dir
    dim = len(A.alphabet)
    cap = (top - 1,) * dim
    out = {}
    for q in A.states:
        start = Config(q, top)
        pairs = set()
        for conf, images in _reach(A, start, cap).items():
            if conf.state != q:
                continue
            for w in images:
                if sum(w) < top:
                    pairs.add((conf.counter - top, w))
        out[q] = pairs
    return out


def _period_candidates(A: Oca, bounds: BoundConfig) -> list:
    """Images of cycle pairs that could form a direction somewhere; a cheap
    necessary condition that prunes the period search."""
    cycles = _cycle_images(A, bounds)
    ups = {}
    downs = {}
    for pairs in cycles.values():
        for effect, w in pairs:
            if 0 <= effect <= bounds.E_max:
                ups.setdefault(effect, set()).add(w)
            if -bounds.E_max <= effect <= 0:
                downs.setdefault(-effect, set()).add(w)
    zero = (0,) * len(A.alphabet)
    found = set()
    for x, firsts in ups.items():
        for w1 in firsts:
            for w2 in downs.get(x, ()):
                if x == 0 and w1 != zero and w2 != zero:
                    continue
                u = _plus(w1, w2)
                if 0 < sum(u) < bounds.L_dir:
                    found.add(u)
    return sorted(found)


def construct_semilinear(A: Oca, bounds: BoundConfig, prune: bool = True) -> SemilinearSet:
    """Union of Lin(b, P) over accepted bases |b| <= s_len and period tuples
    P (at most |Σ| vectors, each shorter than L_dir) passing check_tuple.
    Sound for any bounds.

    Bases are visited by increasing norm.  With prune=True a pair (b, P)
    whose linear set is contained in an already emitted one is neither
    checked nor emitted; the union is the same.
    """
    _require(A)
    dim = len(A.alphabet)
    candidates = _period_candidates(A, bounds)
    components = []
    # bitmasks over component indices: which components generate each
    # candidate period, and which contain the current base
    generates = {p: 0 for p in candidates}
    state = {"here": 0}

    def covered(P):
        mask = state["here"]
        for p in P:
            mask &= generates[p]
        return mask != 0

    def holds(b, P):
        if prune and covered(P):
            return True
        if check_tuple(A, b, P, bounds):
            bit = 1 << len(components)
            components.append(LinearSet(b, P))
            for p in candidates:
                if _decompose(p, P):
                    generates[p] |= bit
            state["here"] |= bit
            return True
        return False

    for b in sorted(_accepted_bases(A, bounds.s_len), key=lambda v: (sum(v), v)):
        state["here"] = sum(1 << i for i, c in enumerate(components) if c.contains(b))
        holds(b, ())
        level = [(p,) for p in candidates if holds(b, (p,))]
        singles = [P[0] for P in level]
        size = 1
        while level and size < dim:
            valid = set(level)
            grown = []
            for P in level:
                for p in singles:
                    if p <= P[-1]:
                        continue
                    Q = P + (p,)
                    if all(Q[:i] + Q[i + 1:] in valid for i in range(len(Q) - 1)) and holds(b, Q):
                        grown.append(Q)
            level = grown
            size += 1
    if prune:
        components = _drop_subsumed(components)
    return SemilinearSet(tuple(components), dim)


def _drop_subsumed(components) -> list:
    """Remove components contained in another one (same sufficient test as
    during construction)."""
    def inside(c, d):
        return d.contains(c.base) and all(_decompose(p, d.periods) for p in c.periods)

    kept = []
    for i, c in enumerate(components):
        if not any(inside(c, d) and (not inside(d, c) or j < i)
                   for j, d in enumerate(components) if j != i):
            kept.append(c)
    return kept


def erase_coordinate(S: SemilinearSet, index: int) -> SemilinearSet:
    """Project away one coordinate; periods that become zero are dropped."""
    def cut(v):
        return v[:index] + v[index + 1:]

    comps = []
    seen = set()
    for c in S.components:
        periods = tuple(sorted({cut(p) for p in c.periods if any(cut(p))}))
        item = LinearSet(cut(c.base), periods)
        if item not in seen:
            seen.add(item)
            comps.append(item)
    return SemilinearSet(tuple(comps), S.dim - 1)


def _spell(v, alphabet):
    return [a for a, k in zip(alphabet, v) for _ in range(k)]


def semilinear_to_nfa(S: SemilinearSet, alphabet) -> Oca:
    """One component per linear set: a path spelling the base (letters in
    alphabet order) to a hub carrying one cycle per period.  Has
    sum(|base| + sum |period|) + 1 states."""
    alphabet = tuple(alphabet)
    if S.dim != len(alphabet):
        raise DimensionMismatch("semilinear set and alphabet differ in dimension")
    init = "sl:init"
    states = [init]
    ts = []
    finals = []
    for i, c in enumerate(S.components):
        base = _spell(c.base, alphabet)
        periods = [_spell(p, alphabet) for p in c.periods]
        if base:
            path = [f"sl:{i}:b{k}" for k in range(1, len(base) + 1)]
            states.extend(path)
            hops = [init] + path
            ts.extend((hops[k], a, ZERO, hops[k + 1]) for k, a in enumerate(base))
            hub = path[-1]
        elif periods:
            hub = f"sl:{i}:p0.0"
            ts.append((init, EPS, ZERO, hub))
        else:
            finals.append(init)
            continue
        finals.append(hub)
        for j, word in enumerate(periods):
            ring = [f"sl:{i}:p{j}.{k}" for k in range(len(word))]
            if not base and j == 0:
                states.extend(ring)
            else:
                states.extend(ring)
                ts.append((hub, EPS, ZERO, ring[0]))
                ts.append((ring[0], EPS, ZERO, hub))
            cycle = ring + [ring[0]]
            ts.extend((cycle[k], a, ZERO, cycle[k + 1]) for k, a in enumerate(word))
    return make_oca("nfa", ts, init, finals, states, alphabet)


def semilinear_state_count(S: SemilinearSet) -> int:
    return sum(sum(c.base) + sum(sum(p) for p in c.periods) for c in S.components) + 1


def parikh_semilinear(A: Oca, bounds: BoundConfig) -> SemilinearSet:
    """Semilinear set over A's own alphabet (ε handled by a fresh letter)."""
    if A.kind != "simple":
        raise InvalidAutomaton("expected a simple OCA")
    B, letter = epsilon_to_letter(A)
    S = construct_semilinear(B, bounds)
    if B is not A:
        S = erase_coordinate(S, B.alphabet.index(letter))
    return S


def deepening_schedule(n: int, rounds: int):
    """Bounds tried by iterative deepening: s_len doubles, L_dir follows it
    until the default 2n^3 + 1 is reached."""
    top = BoundConfig.default(n)
    s_len = 2
    for _ in range(rounds):
        yield BoundConfig(s_len=s_len, L_dir=min(top.L_dir, s_len + 1), E_max=top.E_max)
        s_len *= 2


def parikh_nfa_fixed(A: Oca, bounds: BoundConfig | None = None, deepen: bool = False,
                     check_norm: int = 8, rounds: int = 5) -> Oca:
    """Parikh-equivalent NFA for a simple OCA.

    With deepen=True the bounds grow along deepening_schedule until the image
    of the result up to check_norm matches the brute-force image of A (or
    the rounds run out).  The last NFA built is returned either way.
    """
    if not deepen:
        bounds = bounds or BoundConfig.default(len(A.states))
        return semilinear_to_nfa(parikh_semilinear(A, bounds), A.alphabet)
    target = enumerate_parikh(A, check_norm)
    N = None
    for b in deepening_schedule(len(A.states), rounds):
        N = semilinear_to_nfa(parikh_semilinear(A, b), A.alphabet)
        if nfa_parikh(N, check_norm) == target:
            break
    return N


def reachable_images_dp(A: Oca, frm, v) -> dict:
    """Expose the dynamic-programming table behind parikh_run_exists."""
    _require(A, v)
    return _reach(A, Config(*frm), tuple(v))

