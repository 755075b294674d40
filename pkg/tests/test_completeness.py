import itertools

import pytest

from helpers import A_ab, hand_loop_counting
from ocabstract.completeness import (
    DyckSequence,
    NotDyck,
    NotLoopCounting,
    NotRba,
    NotReversalBounded,
    Rba,
    SumOutOfRange,
    as_rba,
    flatten_bound,
    flatten_size_bound,
    flatten_to_rba,
    hard_automaton,
    hard_size_literal,
    hard_size_reported,
    is_loop_counting,
    is_removable,
    live_letters,
    loop_counting_constants,
    reduce_to_hard_full,
    removable_subset,
    restrict_letters,
    to_loop_counting,
)
from ocabstract.core import count_reversals, expand_extended, make_oca, paper_size, trim
from ocabstract.oracle import enumerate_language, enumerate_parikh, nfa_parikh
from ocabstract.parikh_fixed import parikh_nfa_fixed
from ocabstract.reduction import apply_substitution


def test_hard_two():
    H = hard_automaton(2)
    loops = {t.label: t.op for t in H.transitions if t.src == t.dst}
    assert H.states == ("q1", "q2")
    assert loops == {"a1_1": 1, "a1_2": 2, "a2_1": -1, "a2_2": -2}
    assert [t.label for t in H.transitions if t.src != t.dst] == ["c1_2"]
    assert hard_size_reported(2) == 3


def test_hard_one_accepts_only_empty_word():
    assert enumerate_parikh(expand_extended(hard_automaton(1)), 4) == {(0,)}


def test_hard_two_has_balanced_vector():
    assert (1, 0, 1, 0, 1) in enumerate_parikh(expand_extended(hard_automaton(2)), 4)


@pytest.mark.parametrize("n", range(1, 7))
def test_hard_structure(n):
    H = hard_automaton(n)
    loops = [t for t in H.transitions if t.src == t.dst]
    assert len(H.states) == n and len(loops) == n * n
    assert len(H.transitions) - len(loops) == n * (n - 1) // 2
    assert hard_size_reported(n) == n * (n + 1) // 2
    assert paper_size(H) == hard_size_literal(n) == n + n * n * (n - 1) // 2


def test_hard_size_figures_differ_from_two_on():
    assert hard_size_reported(1) == hard_size_literal(1)
    assert all(hard_size_reported(n) < hard_size_literal(n) for n in range(2, 8))


# ---------------------------------------------------------------- Dyck


def test_dyck_examples():
    assert removable_subset([1, -1], 1, 1) == {1, 2}
    I = removable_subset([1, 1, -1], 1, 1)
    assert I == {1, 2, 3} and len(I) <= 6


def test_dyck_errors():
    with pytest.raises(NotDyck):
        DyckSequence((-1, 1), 1, 1)
    with pytest.raises(NotDyck):
        DyckSequence((2,), 1, 1)
    with pytest.raises(NotDyck):
        DyckSequence((1, -1, 1, -1), 1, 1)
    with pytest.raises(SumOutOfRange):
        removable_subset([1, 1], 1, 1)


def dyck_sequences(n, N):
    for xs in itertools.product(range(-N, N + 1), repeat=n):
        total = 0
        for x in xs:
            total += x
            if total < 0:
                break
        else:
            yield xs


def test_dyck_small_exhaustive():
    for n in range(7):
        for xs in dyck_sequences(n, 2):
            if 0 <= sum(xs) <= 2:
                x = DyckSequence(xs, max(1, count_reversals(xs)), 2)
                I = removable_subset(x)
                assert is_removable(xs, I) and len(I) <= x.bound


def test_dyck_long_sequences_use_descent(rng):
    for _ in range(300):
        N = rng.choice([1, 2])
        xs, total, up = [], 0, True
        for _ in range(rng.randint(20, 60)):
            if rng.random() < 0.1:
                up = not up
            x = rng.randint(0, N) if up else -rng.randint(0, N)
            if total + x < 0:
                x = 0
            xs.append(x)
            total += x
        if total > N:
            continue
        r = max(1, count_reversals(xs))
        I = removable_subset(xs, r, N)
        assert is_removable(xs, I) and len(I) <= 2 * r * (2 * N * N + N)


# ---------------------------------------------------------------- RBA


def test_rba_validator():
    A = make_oca("extended", [("p", "a", 1, "p"), ("p", "b", -1, "p")], "p", ["p"])
    with pytest.raises(NotRba):
        as_rba(A)
    B = make_oca("extended", [("p", "a", 0, "q"), ("q", "b", 0, "p")], "p", ["p"])
    with pytest.raises(NotRba):
        as_rba(B)
    R = as_rba(hand_loop_counting()[0])
    assert all(R.order[t.src] < R.order[t.dst] for t in R.automaton.transitions if t.src != t.dst)
    with pytest.raises(NotRba):
        Rba(R.automaton, {q: 0 for q in R.automaton.states})


def test_flatten_anbn():
    A = A_ab()
    R, sigma = flatten_to_rba(A, 1)
    B = R.automaton
    n = len(A.states)
    assert len(B.states) == n * (flatten_bound(n) + 1) * 2
    assert sigma.size <= n * (n + 1)
    assert paper_size(B) <= flatten_size_bound(n, 1)
    assert as_rba(B).automaton is not None
    out = trim(expand_extended(apply_substitution(B, sigma)))
    assert enumerate_parikh(out, 6) == enumerate_parikh(A, 6)


def test_flatten_detects_too_many_reversals():
    A = make_oca("simple", [("p", "a", 1, "p"), ("p", "b", -1, "p")], "p", ["p"])
    with pytest.raises(NotReversalBounded):
        flatten_to_rba(A, 1)


def test_loop_counting_constants():
    assert loop_counting_constants(2) == (4, 36, 76)


def test_loop_counting_shape_and_inclusion():
    A = make_oca("extended", [("p", "a", 1, "p"), ("p", "e", 0, "p"), ("p", "c", 0, "f"),
                              ("f", "b", -1, "f"), ("f", "g", 0, "f")], "p", ["f"])
    R = as_rba(A)
    B, K = to_loop_counting(R)
    N, M, K2 = loop_counting_constants(paper_size(A))
    assert K == K2
    assert len(B.automaton.states) == len(A.states) * (2 * K + 1) * (M + 1)
    assert is_loop_counting(B.automaton)
    words = enumerate_language(A, 4)
    assert len(words) > 5
    assert words <= enumerate_language(B.automaton, 4)


def test_loop_counting_needs_rba():
    with pytest.raises(NotRba):
        to_loop_counting(A_ab())


def test_reduce_structure():
    for A in hand_loop_counting():
        out = reduce_to_hard_full(as_rba(A))
        assert out.m == len(A.states) + 1
        values = sorted(out.chi.values())
        assert len(set(values)) == len(values) and 1 <= values[0] and values[-1] <= 2 * out.m
        assert out.chi["pre"] == 1 and out.chi["f"] == 2 * out.m
        assert out.sigma.size <= 2


def test_reduce_needs_loop_counting():
    A = make_oca("extended", [("p", "a", 1, "q")], "p", ["q"])
    with pytest.raises(NotLoopCounting):
        reduce_to_hard_full(as_rba(A))


def test_reduce_two_state_parikh():
    A = hand_loop_counting()[0]
    out = reduce_to_hard_full(as_rba(A))
    H = restrict_letters(hard_automaton(2 * out.m), live_letters(out.sigma))
    P = parikh_nfa_fixed(expand_extended(H), deepen=True)
    got = nfa_parikh(apply_substitution(P, out.sigma), 6)
    assert got == enumerate_parikh(A, 6)
