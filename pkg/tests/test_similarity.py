from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from rapidfuzz.distance import Levenshtein

from clonehunt.graph import AttributeProfile, SocialGraph
from clonehunt.similarity import (
    SimilarityMatrix,
    augment,
    candidate_pairs,
    compute_k,
    levenshtein,
    name_similarity,
    profile_similarity,
    similarity_matrix,
    top_k_pairs,
    top_similar_pairs,
)
from clonehunt.synthetic import SynthParams, generate_synthetic

from conftest import make_graph


def test_name_similarity_examples():
    assert name_similarity("Sara Abraham", "Sara Abraham") == 1.0
    # "Abraham" -> "Abram": drop 'h' and one 'a'
    assert levenshtein("Sara Abraham", "Sara Abram") == 2
    assert name_similarity("Sara Abraham", "Sara Abram") == pytest.approx(1 - 2 / 12)
    assert name_similarity("Sara Abraham", "") == 0.0
    assert name_similarity("", "") == 1.0


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="abcde ", max_size=10), st.text(alphabet="abcde ", max_size=10))
def test_levenshtein_agrees_with_reference(a, b):
    assert levenshtein(a, b) == Levenshtein.distance(a, b) == levenshtein(b, a)


def victim_profile(degree="Master's"):
    return AttributeProfile("Sara Abraham", "Female", "Arcadia University", degree, "Owens",
                            "Web Developer", 1980, "USA", "Single")


def test_profile_similarity_examples():
    assert profile_similarity(victim_profile(), victim_profile()) == 1.0
    assert profile_similarity(victim_profile(), victim_profile("Bachelor")) == pytest.approx(8 / 9)
    a = AttributeProfile("abc", "F", "s1", "d1", "e1", "p1", 1900, "l1", "r1")
    b = AttributeProfile("xyz", "M", "s2", "d2", "e2", "p2", 1901, "l2", "r2")
    assert profile_similarity(a, b) == 0.0
    # absent on both sides is not a match
    assert profile_similarity(AttributeProfile("q"), AttributeProfile("q")) == pytest.approx(1 / 9)


profiles = st.builds(
    AttributeProfile,
    name=st.text(alphabet="ab", min_size=1, max_size=5),
    gender=st.none() | st.sampled_from(["F", "M"]),
    school=st.none() | st.sampled_from(["s1", "s2"]),
    degree=st.none() | st.sampled_from(["d1"]),
    birth_year=st.none() | st.sampled_from([1980, 1981]),
)


@given(profiles, profiles)
def test_profile_similarity_symmetric_bounded(a, b):
    s = profile_similarity(a, b)
    assert s == profile_similarity(b, a)
    assert 0.0 <= s <= 1.0


def test_similarity_matrix_fixture(fixture20):
    C = similarity_matrix(fixture20)
    assert np.array_equal(C.values, C.values.T)
    assert np.all(np.diag(C.values) == 0)
    assert C.score(35, 36) > C.score(35, 174)
    for u, v in [(35, 36), (463, 1237), (32, 1081)]:
        assert C.score(u, v) == profile_similarity(fixture20.profile(u), fixture20.profile(v))


def test_similarity_matrix_identical_pair():
    g = make_graph(2, names=["Ann", "Ann"])
    assert similarity_matrix(g).values.tolist() == [[0.0, 1 / 9], [1 / 9, 0.0]]
    p = AttributeProfile("Ann", "F", "s", "d", "e", "p", 1990, "l", "r")
    g2 = SocialGraph.build({0: p, 1: p})
    assert similarity_matrix(g2).values[0, 1] == 1.0


@pytest.mark.parametrize("alpha, K", [(0.68, 34), (0.78, 39), (0.88, 44), (1, 50)])
def test_compute_k_table(alpha, K):
    assert compute_k(alpha, 50) == K


def test_compute_k_edge_cases():
    assert compute_k(0.5, 0) == 0
    assert compute_k(0.29, 100) == 29  # 28.999999999999996 in binary
    assert compute_k(0.5, 3) == 1


def test_top_k_small():
    C = SimilarityMatrix(np.array([0, 1, 2]), np.array([[0, 0.9, 0.5], [0.9, 0, 0.1], [0.5, 0.1, 0]]))
    assert top_k_pairs(C, 0) == set()
    assert top_k_pairs(C, 1) == {(0, 1)}
    assert top_k_pairs(C, 3) == {(0, 1), (0, 2), (1, 2)}
    with pytest.raises(ValueError):
        top_k_pairs(C, 4)


def test_top_k_tie_break():
    C = SimilarityMatrix(np.array([5, 6, 7]), np.array([[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]]))
    assert top_k_pairs(C, 2) == {(5, 6), (5, 7)}


def brute_top_k(C, K):
    ids = C.node_ids
    pairs = [(-C.values[a, b], int(ids[a]), int(ids[b])) for a, b in combinations(range(C.n), 2)]
    return {(u, v) for _, u, v in sorted(pairs)[:K]}


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 9), st.data())
def test_top_k_matches_brute_force_sort(n, data):
    vals = data.draw(st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]), min_size=n * n, max_size=n * n))
    M = np.array(vals).reshape(n, n)
    M = np.triu(M, 1)
    M = M + M.T
    C = SimilarityMatrix(np.arange(n) * 3, M)
    K = data.draw(st.integers(0, n * (n - 1) // 2))
    assert top_k_pairs(C, K) == brute_top_k(C, K)


def test_top_k_monotone_in_alpha():
    g = generate_synthetic(SynthParams(node_count=80, avg_degree=4, seed=1))
    C = similarity_matrix(g)
    prev = set()
    for alpha in [0, 0.1, 0.3, 0.68, 0.78, 0.88, 1.0, 2.0]:
        cur = top_k_pairs(C, compute_k(alpha, g.edge_count))
        assert prev <= cur
        prev = cur


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_streaming_top_equals_dense(seed):
    g = generate_synthetic(SynthParams(node_count=150, avg_degree=5, name_duplication_rate=0.1, seed=seed))
    C = similarity_matrix(g)
    for K in [0, 1, 37, 375, 2000]:
        sp = top_similar_pairs(g, K, block=16)
        got = {(g.node_id(a), g.node_id(b)) for a, b in zip(sp.i, sp.j)}
        assert got == top_k_pairs(C, K)
        assert np.array_equal(sp.score, np.sort(sp.score)[::-1])


def test_blocking_path_scores_match_exact_scores():
    g = generate_synthetic(SynthParams(node_count=400, avg_degree=6, name_duplication_rate=0.05, seed=4))
    C = similarity_matrix(g)
    sp = top_similar_pairs(g, 300, exact_limit=100)
    assert len(sp) == 300
    for a, b, s in zip(sp.i, sp.j, sp.score):
        assert s == C.values[a, b]
    i, j = candidate_pairs(g)
    assert np.all(i < j)
    # every duplicated name pair is a candidate
    names = {}
    for k, p in enumerate(g.profiles):
        names.setdefault(p.name, []).append(k)
    cands = set(zip(i.tolist(), j.tolist()))
    for group in names.values():
        for a, b in combinations(group, 2):
            assert (a, b) in cands


def test_augment():
    g = make_graph(4, [(0, 1), (1, 2)])
    A = g.adjacency_matrix().toarray()
    W0 = augment(g, set())
    assert np.array_equal(W0.W.toarray(), A)
    W = augment(g, {(1, 0), (2, 3)})
    dense = W.W.toarray()
    assert dense[0, 1] == dense[1, 0] == 2
    assert dense[2, 3] == dense[3, 2] == 1
    assert np.array_equal(dense, dense.T) and not dense.diagonal().any()
    assert np.all(dense >= A)
    assert W.augmented_pairs == {(0, 1), (2, 3)}
    with pytest.raises(Exception, match="unknown node"):
        augment(g, {(0, 99)})
