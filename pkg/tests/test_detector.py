import json

import pytest

from clonehunt.detector import (
    CLONE,
    GENUINE,
    UNVERIFIED,
    CloneDetector,
    DetectionConfig,
    DetectionError,
    GroundTruthOracle,
    StochasticOracle,
    Suspect,
    VerificationError,
    community_of,
    detect,
    extract_profile,
    filter_candidates,
    rank_suspects,
    search_similar_names,
    verify_suspects,
)
from clonehunt.mcl import ClusterSet
from clonehunt.strength import SrScore
from clonehunt.weights import WeightedEdgeSet, weigh_graph

from conftest import make_graph


@pytest.fixture(scope="module")
def detector(fixture20_clone):
    g, clone = fixture20_clone
    return CloneDetector(g, DetectionConfig(oracle=GroundTruthOracle({clone})))


def test_extract_profile(fixture20):
    p = extract_profile(fixture20, 35)
    assert (p.name, p.school, p.employer) == ("Sara Abraham", "Arcadia University", "Owens")
    assert extract_profile(fixture20, 35) == p
    with pytest.raises(KeyError):
        extract_profile(fixture20, 9999)


def test_community_of():
    single = ClusterSet([(1, 2, 3)], {1: 0, 2: 0, 3: 0})
    assert community_of(single, 2) == 0
    three = ClusterSet([(1,), (2, 5), (3,)], {1: 0, 2: 1, 5: 1, 3: 2})
    assert community_of(three, 5) == 1
    with pytest.raises(KeyError):
        community_of(three, 9)


def test_search_and_filter_on_fixture(detector, fixture20_clone):
    g, clone = fixture20_clone
    members = detector.clustering.clusters[detector.clustering.cluster_of(35)]
    found = search_similar_names(g, members, 35, 0.75)
    assert set(found) == {clone, 36, 463}
    assert 35 not in found
    kept = filter_candidates(g, 35, found)
    assert {c for c, _ in kept} == {clone, 36}
    assert dict(kept)[clone] == {32, 174, 1236, 2411}
    exact = search_similar_names(g, members, 35, 1.0)
    assert all(g.profile(n).name == "Sara Abraham" for n in exact)


def test_search_order_and_threshold():
    g = make_graph(4, names=["Anna", "Anna", "Anne", "Bob"])
    assert search_similar_names(g, range(4), 0, 0.7) == [1, 2]
    assert search_similar_names(g, range(4), 0, 1.0) == [1]
    assert search_similar_names(g, range(4), 0, 0.0) == [1, 2, 3]


def test_filter_candidates_rules():
    g = make_graph(5, [(0, 1), (0, 2), (3, 1)])
    assert filter_candidates(g, 0, [3, 4]) == [(3, frozenset({1}))]
    assert filter_candidates(g, 0, [1]) == []  # direct friend
    assert filter_candidates(g, 0, []) == []


def test_rank_suspects():
    g = make_graph(6, [(0, 1), (0, 2), (3, 1), (4, 1), (4, 2)], likes={1: {"x"}, 4: {"x"}})
    ws = weigh_graph(g)
    ranked = rank_suspects(ws, g, 0, [4, 3])
    assert [c for c, _ in ranked] == [3, 4]
    assert ranked[0][1].value <= ranked[1][1].value
    assert rank_suspects(ws, g, 0, [3]) == [(3, ranked[0][1])]
    # equal SR: lower id first
    sym = make_graph(4, [(0, 1), (2, 1), (3, 1)])
    ws0 = WeightedEdgeSet({e: 1 for e in sym.edges()})
    assert [c for c, _ in rank_suspects(ws0, sym, 0, [3, 2])] == [2, 3]


def suspects(*ids):
    return [Suspect(i, SrScore(0), ()) for i in ids]


def test_verify_suspects_policies():
    oracle = GroundTruthOracle({2, 3})
    assert verify_suspects(0, suspects(1, 2, 3), oracle) == [GENUINE, CLONE, CLONE]
    assert verify_suspects(0, suspects(1, 2, 3), oracle, "first_hit") == [GENUINE, CLONE, UNVERIFIED]
    assert verify_suspects(0, suspects(1, 4), oracle) == [GENUINE, GENUINE]
    assert verify_suspects(0, [], oracle) == []
    assert verify_suspects(0, suspects(1), None) == [UNVERIFIED]
    with pytest.raises(ValueError):
        verify_suspects(0, suspects(1), oracle, "sometimes")


def test_verify_failure_carries_partial_verdicts():
    def flaky(victim, cand, mutual):
        if cand == 3:
            raise RuntimeError("verifier offline")
        return GENUINE

    with pytest.raises(VerificationError) as err:
        verify_suspects(0, suspects(1, 2, 3, 4), flaky)
    assert err.value.verdicts == [GENUINE, GENUINE]
    with pytest.raises(VerificationError):
        verify_suspects(0, suspects(1), lambda *a: "maybe")


def test_stochastic_oracle_is_order_independent():
    o = StochasticOracle({10}, 0.9, 0.1, seed=4)
    a = [o(1, c) for c in range(20)]
    b = [o(1, c) for c in reversed(range(20))][::-1]
    assert a == b
    always = StochasticOracle({10}, 1.0, 0.0)
    assert always(1, 10) == CLONE and always(1, 11) == GENUINE
    with pytest.raises(ValueError):
        StochasticOracle({1}, 1.5, 0)


def test_detect_end_to_end(detector, fixture20_clone):
    g, clone = fixture20_clone
    rep = detector.detect(35)
    assert [s.node for s in rep.candidates] == [clone, 36]
    assert rep.clones == [clone]
    assert [s.verdict for s in rep.candidates] == [CLONE, GENUINE]
    srs = [s.sr.value for s in rep.candidates]
    assert srs == sorted(srs)
    friends = g.neighbors(35)
    members = set(detector.clustering.clusters[rep.community])
    for s in rep.candidates:
        assert s.node not in friends and s.node != 35
        assert s.node in members
        assert s.mutual_friends


def test_detect_is_deterministic(fixture20_clone):
    g, clone = fixture20_clone
    cfg = DetectionConfig(oracle=StochasticOracle({clone}, seed=3))
    a = detect(g, 35, cfg).to_json()
    b = detect(g, 35, cfg).to_json()
    assert a == b
    doc = json.loads(a)
    assert set(doc) == {"victim", "community", "candidates"}
    assert set(doc["candidates"][0]) == {"id", "sr", "degenerate", "mutual_friends", "verdict"}


def test_detect_no_similar_names(fixture20_clone):
    g, _ = fixture20_clone
    rep = detect(g, 1081)
    assert rep.candidates == [] and rep.clones == []


def test_detect_errors(fixture20_clone):
    g, clone = fixture20_clone
    with pytest.raises(DetectionError) as err:
        detect(g, 9999)
    assert err.value.stage == "extract"

    def broken(*a):
        raise RuntimeError("down")

    with pytest.raises(DetectionError) as err:
        detect(g, 35, DetectionConfig(oracle=broken))
    assert err.value.stage == "verify"


def test_config_validation():
    with pytest.raises(ValueError):
        DetectionConfig(name_threshold=1.5)
    with pytest.raises(ValueError):
        DetectionConfig(stop_policy="never")
