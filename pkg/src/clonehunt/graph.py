"""Social graph data model, ingestion and serialization.

A :class:`SocialGraph` holds the friendship topology together with the
per-user attribute profiles and the three behavioural sets used for edge
weighting (interaction counterparties, liked pages and shared URLs).

External node ids are arbitrary non-negative integers; internally every node
is remapped to a dense index in ``[0, n)`` ordered by external id so that the
matrix code can address rows and columns directly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np
import scipy.sparse as sp

CATEGORICAL_FIELDS = (
    "gender",
    "school",
    "degree",
    "employer",
    "position",
    "birth_year",
    "location",
    "relationship",
)
NODE_COLUMNS = ("id", "name") + CATEGORICAL_FIELDS


class GraphError(ValueError):
    """Raised for structurally invalid graphs or unreadable input files."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class AttributeProfile:
    """Public profile attributes of one user. ``None`` marks an absent value."""

    name: str
    gender: str | None = None
    school: str | None = None
    degree: str | None = None
    employer: str | None = None
    position: str | None = None
    birth_year: int | None = None
    location: str | None = None
    relationship: str | None = None

    def __post_init__(self):
        if not self.name:
            raise GraphError("profile name must be non-empty")
        if self.birth_year is not None and not 1850 <= self.birth_year <= 2100:
            raise GraphError(f"birth_year {self.birth_year} outside [1850, 2100]")

    def missing_fields(self) -> list[str]:
        return [f for f in CATEGORICAL_FIELDS if getattr(self, f) is None]

    def replace(self, **changes) -> "AttributeProfile":
        data = asdict(self)
        unknown = set(changes) - set(data)
        if unknown:
            raise GraphError(f"unknown profile field(s): {sorted(unknown)}")
        data.update(changes)
        return AttributeProfile(**data)


class SocialGraph:
    """Immutable undirected social graph with attribute and behaviour data.

    Build instances with :meth:`SocialGraph.build`, :func:`load_graph` or the
    generators in :mod:`clonehunt.synthetic`; the constructor assumes its
    arguments are already validated and dense-indexed.
    """

    __slots__ = ("_ids", "_index", "_profiles", "_adj", "_inter", "_likes", "_urls", "_edges")

    def __init__(self, ids, profiles, adj, inter, likes, urls):
        self._ids = np.asarray(ids, dtype=np.int64)
        self._index = {int(x): i for i, x in enumerate(self._ids)}
        self._profiles = tuple(profiles)
        self._adj = tuple(adj)
        self._inter = tuple(inter)
        self._likes = tuple(likes)
        self._urls = tuple(urls)
        self._edges = None

    @classmethod
    def build(
        cls,
        profiles: Mapping[int, AttributeProfile],
        edges: Iterable[tuple[int, int]] = (),
        interactions: Iterable[tuple[int, int]] = (),
        page_likes: Mapping[int, Iterable[str]] | None = None,
        urls: Mapping[int, Iterable[str]] | None = None,
    ) -> "SocialGraph":
        """Validate raw records and return a graph.

        Edges and interactions are symmetrized; duplicate and reversed rows
        collapse. Self-loops and references to undeclared nodes raise
        :class:`GraphError`.
        """
        ids = sorted(int(k) for k in profiles)
        if any(i < 0 for i in ids):
            raise GraphError("node ids must be non-negative")
        index = {x: i for i, x in enumerate(ids)}
        n = len(ids)

        def idx(x, what):
            try:
                return index[int(x)]
            except KeyError:
                raise GraphError(f"{what} references undeclared node {x}") from None

        adj = [set() for _ in range(n)]
        for u, v in edges:
            a, b = idx(u, "edge"), idx(v, "edge")
            if a == b:
                raise GraphError(f"self-loop on node {u}")
            adj[a].add(b)
            adj[b].add(a)
        inter = [set() for _ in range(n)]
        for u, v in interactions:
            a, b = idx(u, "interaction"), idx(v, "interaction")
            if a == b:
                raise GraphError(f"self-interaction on node {u}")
            inter[a].add(b)
            inter[b].add(a)
        likes = [frozenset()] * n
        for k, vals in (page_likes or {}).items():
            likes[idx(k, "page like")] = frozenset(str(p) for p in vals)
        shared = [frozenset()] * n
        for k, vals in (urls or {}).items():
            shared[idx(k, "url")] = frozenset(str(p) for p in vals)
        return cls(
            ids,
            [profiles[x] for x in ids],
            [frozenset(s) for s in adj],
            [frozenset(s) for s in inter],
            likes,
            shared,
        )

    # -- sizes and ids -----------------------------------------------------

    def __len__(self) -> int:
        return len(self._ids)

    @property
    def node_ids(self) -> np.ndarray:
        return self._ids

    @property
    def nodes(self) -> list[int]:
        return self._ids.tolist()

    @property
    def edge_count(self) -> int:
        return len(self.edge_index_array())

    def __contains__(self, node) -> bool:
        return int(node) in self._index

    def index(self, node: int) -> int:
        """Dense internal index of external id ``node``."""
        try:
            return self._index[int(node)]
        except (KeyError, TypeError, ValueError):
            raise KeyError(f"unknown node id {node!r}") from None

    def node_id(self, i: int) -> int:
        return int(self._ids[i])

    # -- per-node accessors (external ids) ----------------------------------

    def profile(self, node: int) -> AttributeProfile:
        return self._profiles[self.index(node)]

    @property
    def profiles(self) -> tuple[AttributeProfile, ...]:
        """Profiles in internal index order."""
        return self._profiles

    def neighbors(self, node: int) -> frozenset[int]:
        ids = self._ids
        return frozenset(int(ids[j]) for j in self._adj[self.index(node)])

    def degree(self, node: int) -> int:
        return len(self._adj[self.index(node)])

    def interactions(self, node: int) -> frozenset[int]:
        ids = self._ids
        return frozenset(int(ids[j]) for j in self._inter[self.index(node)])

    def page_likes(self, node: int) -> frozenset[str]:
        return self._likes[self.index(node)]

    def urls(self, node: int) -> frozenset[str]:
        return self._urls[self.index(node)]

    def has_edge(self, u: int, v: int) -> bool:
        return self.index(v) in self._adj[self.index(u)]

    # -- internal-index views used by the numeric modules -------------------

    def adj_index(self, i: int) -> frozenset[int]:
        return self._adj[i]

    def inter_index(self, i: int) -> frozenset[int]:
        return self._inter[i]

    def likes_index(self, i: int) -> frozenset[str]:
        return self._likes[i]

    def urls_index(self, i: int) -> frozenset[str]:
        return self._urls[i]

    def edge_index_array(self) -> np.ndarray:
        """``(m, 2)`` int array of internal edges with ``i < j``, sorted."""
        if self._edges is None:
            rows = [(i, j) for i, nb in enumerate(self._adj) for j in nb if i < j]
            arr = np.array(sorted(rows), dtype=np.int64).reshape(-1, 2)
            arr.setflags(write=False)
            self._edges = arr
        return self._edges

    def edges(self) -> Iterator[tuple[int, int]]:
        """Undirected edges as ``(u, v)`` external-id pairs with ``u < v``."""
        ids = self._ids
        for i, j in self.edge_index_array():
            yield int(ids[i]), int(ids[j])

    def adjacency_matrix(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency in internal index order."""
        n = len(self)
        e = self.edge_index_array()
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(len(rows), dtype=np.int8)
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    def interaction_pairs(self) -> Iterator[tuple[int, int]]:
        ids = self._ids
        for i, nb in enumerate(self._inter):
            for j in sorted(nb):
                if i < j:
                    yield int(ids[i]), int(ids[j])

    def to_records(self) -> dict:
        """Plain-python view of the five collections, in canonical order."""
        return {
            "nodes": {int(x): p for x, p in zip(self._ids, self._profiles)},
            "edges": list(self.edges()),
            "interactions": list(self.interaction_pairs()),
            "pagelikes": {int(x): sorted(s) for x, s in zip(self._ids, self._likes) if s},
            "urls": {int(x): sorted(s) for x, s in zip(self._ids, self._urls) if s},
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, SocialGraph):
            return NotImplemented
        return (
            np.array_equal(self._ids, other._ids)
            and self._profiles == other._profiles
            and self._adj == other._adj
            and self._inter == other._inter
            and self._likes == other._likes
            and self._urls == other._urls
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"SocialGraph(nodes={len(self)}, edges={self.edge_count})"


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    node_count: int
    edge_count: int
    avg_degree: float
    orphan_records: list[str] = field(default_factory=list)
    links_per_node: float = 0.0  # |E| / |V|, the "links per user" dataset figure

    def to_dict(self) -> dict:
        return asdict(self)


def validate(graph: SocialGraph) -> ValidationReport:
    """Summarize size and average degree; flag isolated nodes and missing attributes."""
    n = len(graph)
    m = graph.edge_count
    notes = []
    for i, (node, prof) in enumerate(zip(graph.nodes, graph.profiles)):
        missing = prof.missing_fields()
        if missing:
            notes.append(f"node {node}: missing {', '.join(missing)}")
        if not graph.adj_index(i):
            notes.append(f"node {node}: isolated (no friendship edges)")
    return ValidationReport(n, m, 2 * m / n if n else 0.0, notes, m / n if n else 0.0)


# -- ingestion ----------------------------------------------------------------


@dataclass(frozen=True)
class LoadOptions:
    """Ingestion options.

    ``format`` is ``"auto"`` (directory -> CSV, file -> JSON), ``"csv"`` or
    ``"json"``. With ``strict`` set, all five CSV files must be present;
    otherwise only ``nodes.csv`` and ``edges.csv`` are required.
    """

    format: str = "auto"
    strict: bool = False


_PAIR_FILES = {
    "edges": ("edges.csv", ("src", "dst")),
    "interactions": ("interactions.csv", ("src", "dst")),
    "pagelikes": ("pagelikes.csv", ("node", "page_id")),
    "urls": ("urls.csv", ("node", "url_id")),
}


def _parse_int(text: str, path, line: int, what: str) -> int:
    try:
        value = int(text.strip())
    except (ValueError, AttributeError):
        raise GraphError(f"malformed {what} {text!r}", path, line) from None
    if value < 0:
        raise GraphError(f"negative {what} {value}", path, line)
    return value


def _profile_from_row(row: Mapping[str, str | None], path, line: int) -> AttributeProfile:
    values = {}
    for col in CATEGORICAL_FIELDS:
        raw = row.get(col)
        raw = raw.strip() if raw is not None else ""
        if raw == "":
            values[col] = None
        elif col == "birth_year":
            values[col] = _parse_int(raw, path, line, "birth_year")
        else:
            values[col] = raw
    try:
        return AttributeProfile(name=(row.get("name") or "").strip(), **values)
    except GraphError as exc:
        raise GraphError(str(exc), path, line) from None


def _read_csv(path: Path, header: tuple[str, ...]):
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None:
            raise GraphError("missing header row", path, 1)
        cols = [c.strip() for c in first]
        missing = [c for c in header if c not in cols]
        if missing:
            raise GraphError(f"header lacks column(s) {missing}", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(cols):
                raise GraphError(f"expected {len(cols)} fields, got {len(row)}", path, lineno)
            yield lineno, dict(zip(cols, row))


def _load_csv_dir(root: Path, opts: LoadOptions) -> SocialGraph:
    nodes_path = root / "nodes.csv"
    if not nodes_path.exists():
        raise GraphError("missing file", nodes_path)
    profiles: dict[int, AttributeProfile] = {}
    for line, row in _read_csv(nodes_path, NODE_COLUMNS):
        nid = _parse_int(row["id"], nodes_path, line, "node id")
        if nid in profiles:
            raise GraphError(f"duplicate node id {nid}", nodes_path, line)
        profiles[nid] = _profile_from_row(row, nodes_path, line)

    pairs: dict[str, list] = {}
    for key, (fname, header) in _PAIR_FILES.items():
        path = root / fname
        pairs[key] = []
        if not path.exists():
            if key == "edges" or opts.strict:
                raise GraphError("missing file", path)
            continue
        for line, row in _read_csv(path, header):
            a = _parse_int(row[header[0]], path, line, header[0])
            if a not in profiles:
                raise GraphError(f"row references undeclared node {a}", path, line)
            if key in ("edges", "interactions"):
                b = _parse_int(row[header[1]], path, line, header[1])
                if b not in profiles:
                    raise GraphError(f"row references undeclared node {b}", path, line)
                if a == b:
                    raise GraphError(f"self-loop on node {a}", path, line)
                pairs[key].append((a, b))
            else:
                value = row[header[1]].strip()
                if not value:
                    raise GraphError(f"empty {header[1]}", path, line)
                pairs[key].append((a, value))

    return SocialGraph.build(
        profiles,
        pairs["edges"],
        pairs["interactions"],
        _group(pairs["pagelikes"]),
        _group(pairs["urls"]),
    )


def _group(rows) -> dict[int, set[str]]:
    out: dict[int, set[str]] = {}
    for node, value in rows:
        out.setdefault(node, set()).add(value)
    return out


def _load_json(path: Path) -> SocialGraph:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise GraphError("missing file", path) from None
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise GraphError("JSON document must be an object with a 'nodes' list", path)

    profiles: dict[int, AttributeProfile] = {}
    for k, rec in enumerate(doc["nodes"]):
        where = f"nodes[{k}]"
        try:
            nid = int(rec["id"])
        except (KeyError, TypeError, ValueError):
            raise GraphError(f"{where}: missing or malformed id", path) from None
        if nid < 0:
            raise GraphError(f"{where}: negative node id", path)
        if nid in profiles:
            raise GraphError(f"{where}: duplicate node id {nid}", path)
        row = {c: (None if rec.get(c) is None else str(rec.get(c))) for c in CATEGORICAL_FIELDS}
        row["name"] = rec.get("name")
        try:
            profiles[nid] = _profile_from_row(row, path, None)
        except GraphError as exc:
            raise GraphError(f"{where}: {exc}", path) from None

    def pairs(key):
        out = []
        for k, item in enumerate(doc.get(key, [])):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise GraphError(f"{key}[{k}]: expected a two-element list", path)
            out.append(tuple(item))
        return out

    def int_pairs(key):
        out = []
        for k, (a, b) in enumerate(pairs(key)):
            try:
                out.append((int(a), int(b)))
            except (TypeError, ValueError):
                raise GraphError(f"{key}[{k}]: malformed node id", path) from None
        return out

    try:
        return SocialGraph.build(
            profiles,
            int_pairs("edges"),
            int_pairs("interactions"),
            _group((int(a), str(b)) for a, b in pairs("pagelikes")),
            _group((int(a), str(b)) for a, b in pairs("urls")),
        )
    except GraphError as exc:
        raise GraphError(str(exc), path) from None


def load_graph(dataset_path: str | Path, format_config: LoadOptions | None = None) -> SocialGraph:
    """Load a graph from a CSV directory or a single JSON file.

    Args:
        dataset_path: directory holding ``nodes.csv`` etc., or a ``.json`` file.
        format_config: ingestion options; defaults to ``LoadOptions()``.

    Raises:
        GraphError: on missing files, malformed rows, duplicate ids or rows
            referencing undeclared nodes. The message carries file and line.
    """
    opts = format_config or LoadOptions()
    path = Path(dataset_path)
    fmt = opts.format
    if fmt == "auto":
        fmt = "csv" if path.is_dir() else "json"
    if fmt == "csv":
        if not path.is_dir():
            raise GraphError("dataset directory not found", path)
        return _load_csv_dir(path, opts)
    if fmt == "json":
        return _load_json(path)
    raise GraphError(f"unknown format {opts.format!r}")


def _profile_cells(p: AttributeProfile) -> list[str]:
    return [p.name] + ["" if getattr(p, c) is None else str(getattr(p, c)) for c in CATEGORICAL_FIELDS]


def save_graph(graph: SocialGraph, path: str | Path, format: str = "auto") -> Path:
    """Write ``graph`` as a CSV directory (default) or, for ``*.json`` paths, a JSON file."""
    path = Path(path)
    if format == "auto":
        format = "json" if path.suffix.lower() == ".json" else "csv"
    rec = graph.to_records()
    if format == "json":
        doc = {
            "nodes": [
                {"id": nid, **{f.name: getattr(p, f.name) for f in fields(p)}}
                for nid, p in rec["nodes"].items()
            ],
            "edges": [list(e) for e in rec["edges"]],
            "interactions": [list(e) for e in rec["interactions"]],
            "pagelikes": [[n, v] for n, vals in rec["pagelikes"].items() for v in vals],
            "urls": [[n, v] for n, vals in rec["urls"].items() for v in vals],
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
        return path

    path.mkdir(parents=True, exist_ok=True)

    def write(name, header, rows):
        with (path / name).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)

    write("nodes.csv", NODE_COLUMNS, ([nid] + _profile_cells(p) for nid, p in rec["nodes"].items()))
    write("edges.csv", ("src", "dst"), rec["edges"])
    write("interactions.csv", ("src", "dst"), rec["interactions"])
    write("pagelikes.csv", ("node", "page_id"), ([n, v] for n, vals in rec["pagelikes"].items() for v in vals))
    write("urls.csv", ("node", "url_id"), ([n, v] for n, vals in rec["urls"].items() for v in vals))
    return path
