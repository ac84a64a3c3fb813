
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_assignment, lev_dp, ned_dp, semantic_brute
from vtrkit.marked import SENTINEL, MarkedTranscript, Token, parse_marked
from vtrkit.scoring import (
    RewardConfig,
    composite_reward,
    hungarian_match,
    levenshtein,
    ned,
    ned_matrix,
    ocr_baseline_reward,
    semantic_score,
    structural_score,
)


# -- ned --------------------------------------------------------------------

def test_ned_examples():
    assert ned("abc", "abc") == 0.0
    assert ned("kitten", "sitting") == pytest.approx(3 / 7, abs=1e-12)
    assert ned("a", "") == 1.0
    assert ned("", "") == 0.0


def test_ned_counts_scalar_values_not_bytes():
    assert levenshtein("菜单", "菜单") == 0
    assert levenshtein("菜单", "菜") == 1
    assert levenshtein("\U0001F600x", "x") == 1


@given(st.text(max_size=20), st.text(max_size=20))
def test_ned_matches_dp_oracle(a, b):
    assert levenshtein(a, b) == lev_dp(a, b)
    assert ned(a, b) == ned(b, a)


@settings(max_examples=40)
@given(st.text("abc", min_size=60, max_size=140), st.text("abc", max_size=140))
def test_long_strings_fall_back_to_dp(a, b):
    assert levenshtein(a, b) == lev_dp(a, b)


@given(st.lists(st.text("abcd", max_size=70), max_size=5), st.lists(st.text("abcd", max_size=70), max_size=5))
def test_ned_matrix_matches_pairwise(rows, cols):
    m = ned_matrix(rows, cols)
    assert m.shape == (len(rows), len(cols))
    for i, a in enumerate(rows):
        for j, b in enumerate(cols):
            assert m[i, j] == ned_dp(a, b)


@given(st.text("abcde", max_size=10), st.text("abcde", max_size=10), st.text("abcde", max_size=10))
def test_levenshtein_triangle_inequality(a, b, c):
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


# -- hungarian --------------------------------------------------------------

def test_hungarian_examples():
    assert sorted(hungarian_match([[0.2, 0.9], [0.8, 0.1]])) == [(0, 0), (1, 1)]
    eye = 1 - np.eye(4)
    assert hungarian_match(eye) == [(i, i) for i in range(4)]
    assert hungarian_match([[0, 1, 1], [1, 1, 0]]) == [(0, 0), (1, 2)]
    assert hungarian_match(np.zeros((0, 3))) == []
    assert hungarian_match([]) == []


def test_hungarian_rejects_bad_costs():
    with pytest.raises(ValueError):
        hungarian_match([[1.0, -0.5]])
    with pytest.raises(ValueError):
        hungarian_match([[1.0, float("nan")]])


def test_hungarian_ties_are_lexicographic():
    # every assignment costs the same
    assert hungarian_match(np.ones((3, 3))) == [(0, 0), (1, 1), (2, 2)]
    # more rows than columns: earliest rows get matched first
    assert hungarian_match(np.ones((4, 2))) == [(0, 0), (1, 1)]


@settings(max_examples=300)
@given(
    st.integers(1, 6).flatmap(
        lambda m: st.integers(1, 6).flatmap(
            lambda n: st.lists(st.lists(st.integers(0, 4), min_size=n, max_size=n), min_size=m, max_size=m)
        )
    )
)
def test_hungarian_matches_brute_force_with_ties(costs):
    pairs = hungarian_match(costs)
    best_cost, best_pairs = brute_assignment(costs)
    assert sum(costs[i][j] for i, j in pairs) == best_cost
    assert pairs == best_pairs
    assert len(pairs) == min(len(costs), len(costs[0]))


# -- semantic ---------------------------------------------------------------

def test_semantic_examples():
    assert semantic_score(["hello", "world"], parse_marked("world hello", "en"))[0] == 1.0
    s, matching, unmatched = semantic_score(["hello", "world"], parse_marked("hallo", "en"))
    assert s == pytest.approx(0.4, abs=1e-12)
    assert matching == [(0, 0, pytest.approx(0.2))] and unmatched == 1
    assert semantic_score(["a"], parse_marked("", "en"))[0] == 0.0
    assert semantic_score(["cat"], parse_marked("c[[a]]t", "en"))[0] == pytest.approx(2 / 3, abs=1e-12)
    assert semantic_score([], parse_marked("", "en"))[0] == 1.0


words = st.lists(st.text("abc", min_size=1, max_size=4), max_size=4)


@settings(max_examples=150)
@given(words, words)
def test_semantic_matches_exhaustive_partial_matchings(target, pred):
    t = MarkedTranscript(tuple(Token.word(w) for w in pred), "en")
    assert semantic_score(target, t)[0] == pytest.approx(semantic_brute(target, pred), abs=1e-12)


@given(words, words, st.randoms())
def test_semantic_permutation_invariant(target, pred, rnd):
    t = MarkedTranscript(tuple(Token.word(w) for w in pred), "en")
    base = semantic_score(target, t)[0]
    shuffled_pred = pred[:]
    rnd.shuffle(shuffled_pred)
    shuffled_target = target[:]
    rnd.shuffle(shuffled_target)
    t2 = MarkedTranscript(tuple(Token.word(w) for w in shuffled_pred), "en")
    assert semantic_score(shuffled_target, t2)[0] == pytest.approx(base, abs=1e-12)


@given(st.lists(st.text("abcxyz", min_size=1, max_size=6), min_size=1, max_size=5), st.randoms())
def test_semantic_self_is_one_and_flags_only_lower(target, rnd):
    toks = [Token.word(w) for w in target]
    t = MarkedTranscript(tuple(toks), "en")
    prev = semantic_score(target, t)[0]
    assert prev == 1.0
    # add flags one at a time
    positions = [(i, j) for i, w in enumerate(target) for j in range(len(w))]
    rnd.shuffle(positions)
    flags = {i: set() for i in range(len(target))}
    for i, j in positions:
        flags[i].add(j)
        t = MarkedTranscript(tuple(Token.word(w, flags[k]) for k, w in enumerate(target)), "en")
        cur = semantic_score(target, t)[0]
        assert cur <= prev + 1e-12
        prev = cur


# -- structural -------------------------------------------------------------

@pytest.mark.parametrize(
    "n_a, n_p, omega, expected",
    [(0, 7, 5, 1.0), (1, 10, 5, 0.5), (3, 10, 5, 0.0), (2, 8, 1, 0.75), (0, 0, 5, 1.0)],
)
def test_structural_examples(n_a, n_p, omega, expected):
    assert structural_score(n_a, n_p, omega) == pytest.approx(expected, abs=1e-12)


def test_structural_rejects_contract_violation():
    with pytest.raises(ValueError):
        structural_score(4, 3, 5)


@given(st.integers(1, 200).flatmap(lambda n: st.tuples(st.integers(0, n), st.integers(0, n), st.just(n))),
       st.floats(0.01, 50))
def test_structural_monotone_and_bounded(pair, omega):
    a, b, n = pair
    lo, hi = min(a, b), max(a, b)
    s_lo, s_hi = structural_score(lo, n, omega), structural_score(hi, n, omega)
    assert 0.0 <= s_hi <= s_lo <= 1.0


@given(st.integers(1, 100).flatmap(lambda n: st.tuples(st.integers(0, n), st.integers(0, n), st.just(n))),
       st.floats(1.0, 10.0), st.floats(1.0, 10.0))
def test_structural_ordering_independent_of_omega(pair, w1, w2):
    a, b, n = pair
    s = [(structural_score(a, n, w), structural_score(b, n, w)) for w in (w1, w2)]
    if all(0 < v < 1 for v in s[0] + s[1]):
        assert (s[0][0] < s[0][1]) == (s[1][0] < s[1][1])


# -- composite --------------------------------------------------------------

def test_composite_examples():
    r = composite_reward("hello world", "hello world", "en")
    assert (r.semantic, r.quality, r.reward) == (1.0, 1.0, 1.0)
    r = composite_reward("cat", "c[[a]]t", "en")
    assert r.semantic == pytest.approx(2 / 3, abs=1e-12)
    assert r.quality == 0.0
    assert r.reward == pytest.approx(1 / 3, abs=1e-12)
    r = composite_reward("ab cd", "", "en")
    assert (r.semantic, r.quality, r.reward) == (0.0, 1.0, 0.5)


def test_composite_zh():
    r = composite_reward("菜单2024", "菜[[单]]2024", "zh")
    assert r.semantic == pytest.approx(2 / 3, abs=1e-12)
    assert (r.n_anomalous, r.n_total) == (1, 6)


def test_composite_rejects_sentinel_in_target():
    with pytest.raises(ValueError):
        composite_reward("a" + SENTINEL, "a", "en")


def test_composite_propagates_parse_error():
    from vtrkit.marked import MarkedTextError

    with pytest.raises(MarkedTextError):
        composite_reward("cat", "[[x", "en")


@given(st.lists(st.text("abc", min_size=1, max_size=4), max_size=5),
       st.lists(st.tuples(st.text("abc", min_size=1, max_size=4), st.booleans()), max_size=5),
       st.floats(0.5, 10), st.floats(0, 1))
def test_report_recomputes(target, pred, omega, w):
    toks = [Token.word(t, [0] if bad else []) for t, bad in pred]
    raw = " ".join(t.serialize() for t in toks)
    cfg = RewardConfig(omega, w, 1 - w)
    r = composite_reward(" ".join(target), raw, "en", cfg)
    assert abs(r.reward - (cfg.w_semantic * r.semantic + cfg.w_quality * r.quality)) <= 1e-12
    for v in (r.semantic, r.quality, r.reward):
        assert 0.0 <= v <= 1.0


def test_reward_config_validation():
    with pytest.raises(ValueError):
        RewardConfig(omega=0)
    with pytest.raises(ValueError):
        RewardConfig(w_semantic=0.7, w_quality=0.7)
    cfg = RewardConfig.with_overrides(w_semantic=0.8)
    assert cfg.w_quality == pytest.approx(0.2)


# -- baseline ---------------------------------------------------------------

def test_baseline_examples():
    assert ocr_baseline_reward("abcdefghij", "abXdefghij") == pytest.approx(0.9, abs=1e-12)
    assert ocr_baseline_reward("abc", "abc") == 1.0
    assert ocr_baseline_reward("ab", "wxyz") == 0.0
    with pytest.raises(ValueError):
        ocr_baseline_reward("", "x")
