"""Clone injection, TP/FP evaluation, alpha sweeps and similarity rates."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .detector import CloneDetector, DetectionConfig, StochasticOracle
from .graph import CATEGORICAL_FIELDS, SocialGraph
from .mcl import ClusterSet, MclParams, run_mcl
from .similarity import augmented_adjacency, compute_k
from .synthetic import SynthParams, build_fixture20, generate_synthetic


@dataclass(frozen=True)
class CloneInjectionSpec:
    """How to forge a clone of ``victim``.

    Fractions are shares of the victim's friends (``friend_fraction``), of the
    clone's new friends it interacts with (``interaction_fraction``), and of
    the victim's liked pages / shared URLs the clone copies. ``friends``, when
    given, fixes the befriended set instead of sampling it.
    """

    victim: int
    attribute_perturbations: dict = field(default_factory=dict)
    friend_fraction: float = 0.5
    interaction_fraction: float = 0.0
    like_overlap: float = 0.0
    url_overlap: float = 0.0
    seed: int = 0
    friends: tuple[int, ...] | None = None
    clone_id: int | None = None

    def __post_init__(self):
        for name in ("friend_fraction", "interaction_fraction", "like_overlap", "url_overlap"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        bad = set(self.attribute_perturbations) - {"name", *CATEGORICAL_FIELDS}
        if bad:
            raise ValueError(f"unknown attribute(s) {sorted(bad)}")

    @classmethod
    def from_dict(cls, doc: dict) -> "CloneInjectionSpec":
        doc = dict(doc)
        pert = doc.pop("attribute_perturbations", {}) or {}
        if isinstance(pert, list):
            pert = {k: v for k, v in pert}
        if doc.get("friends") is not None:
            doc["friends"] = tuple(int(x) for x in doc["friends"])
        return cls(attribute_perturbations=dict(pert), **doc)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["friends"] = list(self.friends) if self.friends is not None else None
        return d


def _sample(rng, items, fraction):
    items = sorted(items)
    k = int(round(fraction * len(items)))
    if k == 0:
        return []
    return [items[i] for i in sorted(rng.choice(len(items), size=k, replace=False))]


def _forge(graph: SocialGraph, spec: CloneInjectionSpec):
    """Profile, friends, interaction partners, likes and URLs of one forged account."""
    rng = np.random.default_rng(spec.seed)
    victim = spec.victim
    vfriends = graph.neighbors(victim)
    if spec.friends is not None:
        stray = set(spec.friends) - vfriends
        if stray:
            raise ValueError(f"clone friends {sorted(stray)} are not friends of the victim")
        friends = sorted(spec.friends)
    else:
        friends = _sample(rng, vfriends, spec.friend_fraction)
    partners = _sample(rng, friends, spec.interaction_fraction)
    likes = _sample(rng, graph.page_likes(victim), spec.like_overlap)
    urls = _sample(rng, graph.urls(victim), spec.url_overlap)
    profile = graph.profile(victim).replace(**spec.attribute_perturbations)
    return profile, friends, partners, likes, urls


def _with_forgeries(graph: SocialGraph, forged: dict) -> SocialGraph:
    rec = graph.to_records()
    profiles = dict(rec["nodes"])
    page_likes = dict(rec["pagelikes"])
    shared = dict(rec["urls"])
    edges, inter = rec["edges"], rec["interactions"]
    for clone, (profile, friends, partners, likes, urls) in forged.items():
        profiles[clone] = profile
        edges += [(clone, f) for f in friends]
        inter += [(clone, f) for f in partners]
        if likes:
            page_likes[clone] = likes
        if urls:
            shared[clone] = urls
    return SocialGraph.build(profiles, edges, inter, page_likes, shared)


def inject_clone(graph: SocialGraph, spec: CloneInjectionSpec) -> tuple[SocialGraph, int]:
    """Return a copy of ``graph`` with one forged profile added, and the clone's id.

    The clone copies the victim's profile with ``attribute_perturbations``
    applied, befriends a seeded sample of the victim's friends (never the
    victim itself) and copies the requested share of interactions, likes and
    URLs.
    """
    if spec.victim not in graph:
        raise KeyError(f"unknown victim {spec.victim!r}")
    clone = spec.clone_id if spec.clone_id is not None else int(graph.node_ids.max()) + 1
    if clone in graph:
        raise ValueError(f"clone id {clone} already exists")
    return _with_forgeries(graph, {clone: _forge(graph, spec)}), clone


def fixture20_clone_spec() -> CloneInjectionSpec:
    """The reference forgery of user 35: degree changed to Bachelor, four of its five friends."""
    return CloneInjectionSpec(
        victim=35,
        attribute_perturbations={"degree": "Bachelor"},
        friends=(32, 174, 1236, 2411),
        interaction_fraction=0.0,
        like_overlap=1 / 3,
        url_overlap=1 / 3,
        seed=35,
    )


def build_fixture20_clone() -> tuple[SocialGraph, int]:
    return inject_clone(build_fixture20(), fixture20_clone_spec())


# -- TP / FP -----------------------------------------------------------------------


@dataclass
class EvalReport:
    injected: int
    tp: int
    fp: int
    flagged: list[int] = field(default_factory=list)
    per_victim: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["victim", "community", "candidates", "flagged", "true_clones_flagged"])
        for row in self.per_victim:
            w.writerow([
                row["victim"], row["community"], len(row["candidates"]),
                " ".join(map(str, row["flagged"])), " ".join(map(str, row["true_clones_flagged"])),
            ])
        w.writerow(["TOTAL", "", "", self.tp + self.fp, self.tp])
        return buf.getvalue()


def evaluate(
    graph: SocialGraph,
    ground_truth: Iterable[int],
    victims: Sequence[int],
    config: DetectionConfig | None = None,
) -> EvalReport:
    """Run detection for each victim and count flagged clones (TP) and flagged genuine nodes (FP).

    Counting is per node: a node flagged for several victims counts once.
    """
    truth = frozenset(int(x) for x in ground_truth)
    missing = [x for x in truth if x not in graph]
    if missing:
        raise KeyError(f"ground-truth ids not in graph: {sorted(missing)}")
    detector = CloneDetector(graph, config)
    flagged: set[int] = set()
    rows = []
    for v in victims:
        report = detector.detect(v)
        hits = report.clones
        flagged.update(hits)
        rows.append({
            "victim": int(v),
            "community": report.community,
            "candidates": [s.node for s in report.candidates],
            "flagged": hits,
            "true_clones_flagged": [h for h in hits if h in truth],
        })
    tp = len(flagged & truth)
    return EvalReport(len(truth), tp, len(flagged) - tp, sorted(flagged), rows)


# -- similarity rate and alpha sweep ------------------------------------------------


def similarity_rate(clustering: ClusterSet, augmented_pairs, edges) -> list[float]:
    """Per cluster: augmented pairs inside it over all W-pairs (edges ∪ augmented) inside it."""
    aug = {(min(u, v), max(u, v)) for u, v in augmented_pairs}
    real = {(min(u, v), max(u, v)) for u, v in edges}
    inside_aug = [0] * len(clustering)
    inside_all = [0] * len(clustering)
    where = clustering.assignment
    for u, v in aug | real:
        cu, cv = where.get(u), where.get(v)
        if cu is not None and cu == cv:
            inside_all[cu] += 1
            if (u, v) in aug:
                inside_aug[cu] += 1
    return [a / t if t else 0.0 for a, t in zip(inside_aug, inside_all)]


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    K: int
    n_clusters: int
    sizes: tuple[int, ...]
    similarity_rates: tuple[float, ...]
    converged: bool


def alpha_sweep(graph: SocialGraph, alphas: Sequence[float], mcl: MclParams | None = None) -> list[SweepRow]:
    if not alphas:
        raise ValueError("alphas must be non-empty")
    rows = []
    edges = list(graph.edges())
    for a in alphas:
        W = augmented_adjacency(graph, a)
        cs = run_mcl(W, mcl)
        rows.append(SweepRow(
            float(a),
            compute_k(a, graph.edge_count),
            len(cs),
            tuple(len(c) for c in cs.clusters),
            tuple(similarity_rate(cs, W.augmented_pairs, edges)),
            cs.converged,
        ))
    return rows


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "K", "clusters", "sizes", "similarity_rates", "converged"])
    for r in rows:
        w.writerow([
            f"{r.alpha:g}", r.K, r.n_clusters,
            " ".join(map(str, r.sizes)),
            " ".join(f"{x:.4f}" for x in r.similarity_rates),
            r.converged,
        ])
    return buf.getvalue()


def sweep_to_json(rows: Sequence[SweepRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2)


# -- synthetic benchmark -------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkRow:
    clones: int
    mean_tp: float
    mean_fp: float
    tps: tuple[int, ...]
    fps: tuple[int, ...]


def inject_many(graph: SocialGraph, count: int, seed: int, min_degree: int = 4, **spec_kw) -> tuple[SocialGraph, dict[int, int]]:
    """Inject ``count`` clones of distinct random victims; returns the graph and ``{clone: victim}``.

    Clones are forged against the original graph, so no clone befriends another.
    """
    rng = np.random.default_rng(seed)
    eligible = [v for v in graph.nodes if graph.degree(v) >= min_degree]
    if count > len(eligible):
        raise ValueError(f"only {len(eligible)} eligible victims for {count} clones")
    victims = sorted(int(x) for x in rng.choice(eligible, size=count, replace=False))
    kw = {"friend_fraction": 0.5, "interaction_fraction": 0.0, "like_overlap": 0.25, "url_overlap": 0.25}
    kw.update(spec_kw)
    first = int(graph.node_ids.max()) + 1 if len(graph) else 0
    forged, truth = {}, {}
    for k, v in enumerate(victims):
        field_name = CATEGORICAL_FIELDS[int(rng.integers(0, len(CATEGORICAL_FIELDS)))]
        value = 1999 if field_name == "birth_year" else "forged"
        spec = CloneInjectionSpec(v, {field_name: value}, seed=seed * 100_003 + k, **kw)
        forged[first + k] = _forge(graph, spec)
        truth[first + k] = v
    return _with_forgeries(graph, forged), truth


def clone_benchmark(
    counts: Sequence[int] = (5, 10, 20, 35, 50),
    seeds: Sequence[int] = range(20),
    synth: SynthParams | None = None,
    config: DetectionConfig | None = None,
    tp_rate: float = 0.9,
    fp_rate: float = 0.1,
) -> list[BenchmarkRow]:
    """Mean TP and FP over seeds for several injected-clone counts.

    For each seed a synthetic base graph is generated, ``count`` clones are
    injected and every victim is evaluated with a seeded stochastic oracle.
    """
    synth = synth or SynthParams(node_count=2000, avg_degree=10)
    config = config or DetectionConfig()
    rows = []
    bases = {s: generate_synthetic(SynthParams(**{**asdict(synth), "seed": s})) for s in seeds}
    for count in counts:
        tps, fps = [], []
        for s in seeds:
            g, truth = inject_many(bases[s], count, seed=s)
            oracle = StochasticOracle(truth, tp_rate, fp_rate, seed=s)
            cfg = DetectionConfig(config.alpha, config.mcl, config.name_threshold, oracle, config.stop_policy, config.threads)
            rep = evaluate(g, truth, sorted(set(truth.values())), cfg)
            tps.append(rep.tp)
            fps.append(rep.fp)
        rows.append(BenchmarkRow(count, float(np.mean(tps)), float(np.mean(fps)), tuple(tps), tuple(fps)))
    return rows

