"""Clone-detection pipeline: cluster, extract, search, select, rank, verify.

The graph-wide work (attribute augmentation, MCL, edge weights) depends only
on the graph and configuration, so :class:`CloneDetector` computes it once and
reuses it for every victim query.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Literal

import numpy as np

from .graph import AttributeProfile, SocialGraph
from .mcl import ClusterSet, MclParams, run_mcl
from .similarity import AugmentedAdjacency, augmented_adjacency, name_similarity
from .strength import SrScore, strength_of_relationship
from .weights import WeightedEdgeSet, weigh_graph

CLONE, GENUINE, UNVERIFIED = "clone", "genuine", "unverified"
Verdict = Literal["clone", "genuine", "unverified"]
VerificationOracle = Callable[[int, int, frozenset], str]


class DetectionError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


class VerificationError(RuntimeError):
    """The oracle failed; ``verdicts`` holds what was decided before the failure."""

    def __init__(self, cause: BaseException, verdicts: list[str]):
        self.cause = cause
        self.verdicts = verdicts
        super().__init__(f"verification failed after {len(verdicts)} verdict(s): {cause}")


class GroundTruthOracle:
    """Flags exactly the known clones."""

    def __init__(self, clones: Iterable[int]):
        self.clones = frozenset(int(c) for c in clones)

    def __call__(self, victim: int, candidate: int, mutual_friends=frozenset()) -> str:
        return CLONE if candidate in self.clones else GENUINE


class StochasticOracle:
    """Imperfect verifier: flags clones with ``tp_rate`` and genuine users with ``fp_rate``.

    Each decision draws from a generator seeded by ``(seed, victim, candidate)``,
    so verdicts do not depend on query order.
    """

    def __init__(self, clones: Iterable[int], tp_rate: float = 0.9, fp_rate: float = 0.1, seed: int = 0):
        if not (0 <= tp_rate <= 1 and 0 <= fp_rate <= 1):
            raise ValueError("rates must lie in [0, 1]")
        self.clones = frozenset(int(c) for c in clones)
        self.tp_rate, self.fp_rate, self.seed = tp_rate, fp_rate, seed

    def __call__(self, victim: int, candidate: int, mutual_friends=frozenset()) -> str:
        rate = self.tp_rate if candidate in self.clones else self.fp_rate
        u = np.random.default_rng([self.seed, int(victim), int(candidate)]).random()
        return CLONE if u < rate else GENUINE


@dataclass(frozen=True)
class DetectionConfig:
    alpha: float = 0.68
    mcl: MclParams = field(default_factory=MclParams)
    name_threshold: float = 0.75
    oracle: VerificationOracle | None = None
    stop_policy: str = "exhaustive"
    threads: int = 1

    def __post_init__(self):
        if not 0 <= self.name_threshold <= 1:
            raise ValueError("name_threshold must lie in [0, 1]")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.stop_policy not in ("exhaustive", "first_hit"):
            raise ValueError(f"unknown stop_policy {self.stop_policy!r}")


@dataclass(frozen=True)
class Suspect:
    node: int
    sr: SrScore
    mutual_friends: tuple[int, ...]
    verdict: str = UNVERIFIED


@dataclass(frozen=True)
class SuspectReport:
    victim: int
    community: int
    candidates: list[Suspect]

    def to_dict(self) -> dict:
        return {
            "victim": self.victim,
            "community": self.community,
            "candidates": [
                {
                    "id": s.node,
                    "sr": float(s.sr.value),
                    "degenerate": s.sr.degenerate,
                    "mutual_friends": list(s.mutual_friends),
                    "verdict": s.verdict,
                }
                for s in self.candidates
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @property
    def clones(self) -> list[int]:
        return [s.node for s in self.candidates if s.verdict == CLONE]


# -- individual stages ----------------------------------------------------------


def extract_profile(graph: SocialGraph, victim: int) -> AttributeProfile:
    return graph.profile(victim)


def community_of(clustering: ClusterSet, v: int) -> int:
    return clustering.cluster_of(v)


def search_similar_names(graph: SocialGraph, cluster: Iterable[int], victim: int, theta: float) -> list[int]:
    """Members of ``cluster`` whose name similarity to the victim is at least ``theta``.

    Ordered by descending similarity, then ascending id; the victim is never included.
    """
    target = graph.profile(victim).name
    scored = []
    for n in cluster:
        if n == victim:
            continue
        s = name_similarity(graph.profile(n).name, target)
        if s >= theta:
            scored.append((-s, n))
    return [n for _, n in sorted(scored)]


def filter_candidates(graph: SocialGraph, victim: int, candidates: Iterable[int]) -> list[tuple[int, frozenset[int]]]:
    """Keep candidates that share a friend with the victim but are not its friends."""
    friends = graph.neighbors(victim)
    out = []
    for c in candidates:
        if c == victim or c in friends:
            continue
        mutual = friends & graph.neighbors(c)
        if mutual:
            out.append((c, mutual))
    return out


def rank_suspects(weights: WeightedEdgeSet, graph: SocialGraph, victim: int, suspects) -> list[tuple[int, SrScore]]:
    """Sort suspects by ascending SR value, ties by ascending id.

    ``suspects`` may hold bare ids or ``(id, mutual_friends)`` tuples.
    """
    ids = [s[0] if isinstance(s, tuple) else s for s in suspects]
    scored = [(c, strength_of_relationship(weights, graph, victim, c)) for c in ids]
    return sorted(scored, key=lambda t: (t[1].value, t[0]))


def verify_suspects(
    victim: int,
    ranked: list[Suspect],
    oracle: VerificationOracle | None,
    stop_policy: str = "exhaustive",
) -> list[str]:
    """Query the oracle in ascending-SR order and return one verdict per suspect.

    With ``stop_policy="first_hit"`` verification halts at the first clone
    verdict; remaining suspects stay unverified. Without an oracle every
    suspect is unverified.
    """
    if stop_policy not in ("exhaustive", "first_hit"):
        raise ValueError(f"unknown stop_policy {stop_policy!r}")
    verdicts: list[str] = []
    if oracle is None:
        return [UNVERIFIED] * len(ranked)
    for s in ranked:
        if stop_policy == "first_hit" and CLONE in verdicts:
            verdicts.append(UNVERIFIED)
            continue
        try:
            v = oracle(victim, s.node, frozenset(s.mutual_friends))
        except Exception as exc:
            raise VerificationError(exc, verdicts) from exc
        if v not in (CLONE, GENUINE):
            raise VerificationError(ValueError(f"oracle returned {v!r}"), verdicts)
        verdicts.append(v)
    return verdicts


# -- orchestration --------------------------------------------------------------


class CloneDetector:
    """Runs the pipeline for many victims over one graph, caching shared stages."""

    def __init__(self, graph: SocialGraph, config: DetectionConfig | None = None):
        self.graph = graph
        self.config = config or DetectionConfig()

    @cached_property
    def augmented(self) -> AugmentedAdjacency:
        return self._stage("augment", augmented_adjacency, self.graph, self.config.alpha, self.config.threads)

    @cached_property
    def clustering(self) -> ClusterSet:
        return self._stage("cluster", run_mcl, self.augmented, self.config.mcl, self.config.threads)

    @cached_property
    def weights(self) -> WeightedEdgeSet:
        return self._stage("weigh", weigh_graph, self.graph)

    @staticmethod
    def _stage(name, fn, *args):
        try:
            return fn(*args)
        except DetectionError:
            raise
        except Exception as exc:
            raise DetectionError(name, exc) from exc

    def detect(self, victim: int) -> SuspectReport:
        g, cfg = self.graph, self.config
        self._stage("extract", extract_profile, g, victim)
        community = self._stage("community", community_of, self.clustering, victim)
        members = self.clustering.clusters[community]
        found = self._stage("search", search_similar_names, g, members, victim, cfg.name_threshold)
        selected = self._stage("select", filter_candidates, g, victim, found)
        mutual = dict(selected)
        ranked = self._stage("rank", rank_suspects, self.weights, g, victim, selected)
        suspects = [Suspect(c, sr, tuple(sorted(mutual[c]))) for c, sr in ranked]
        try:
            verdicts = verify_suspects(victim, suspects, cfg.oracle, cfg.stop_policy)
        except VerificationError as exc:
            raise DetectionError("verify", exc) from exc
        final = [
            Suspect(s.node, s.sr, s.mutual_friends, v) for s, v in zip(suspects, verdicts)
        ]
        return SuspectReport(int(victim), community, final)


def detect(graph: SocialGraph, victim: int, config: DetectionConfig | None = None) -> SuspectReport:
    """One-shot pipeline for a single victim."""
    if victim not in graph:
        raise DetectionError("extract", KeyError(f"unknown node id {victim!r}"))
    return CloneDetector(graph, config).detect(victim)
