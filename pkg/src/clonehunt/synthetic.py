"""Reference fixture and random social-graph generator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import AttributeProfile, SocialGraph

# id, name, gender, school, degree, employer, position, birth_year, location, relationship
_FIXTURE20_ROWS = [
    (32, "NikoParda", "Female", "Harvard University", "PhD", "East Man", "Manager", 1979, "USA", "Single"),
    (35, "Sara Abraham", "Female", "Arcadia University", "Master's", "Owens", "Web Developer", 1980, "USA", "Single"),
    (36, "Sara Abraham", "Female", "Carolina University", "Master's", "Owens", "Web Developer", 1980, "USA", "Single"),
    (174, "David Ernox", "Male", "Michigan University", "Master's", "Qpass", "Java Developer", 1984, "USA", "Single"),
    (463, "Sara Abram", "Female", "Michigan University", "Master's", "AppNet", "Web Developer", 1985, "USA", "Single"),
    (1236, "Tom Banho", "Male", "Acaedia University", "Bachelor", "Xing", "Network Manager", 1979, "USA", "Married"),
    (2411, "Rose Milan", "Female", "Koln University", "PhD", "Axvert", "Manager", 1972, "USA", "Single"),
    (33, "Hanry Dabuo", "Male", "Dublin High school", "Diploma", "Sonic", "Secretary", 1970, "UK", "Married"),
    (34, "Rosa Morada", "Female", "Franklin High school", "Diploma", "Sonic", "Bookkeeping", 1974, "UK", "Married"),
    (163, "Charls Selvin", "Male", "Pietersburg University", "Bachelor", "Sony", "Accountant", 1979, "UK", "Married"),
    (4013, "SeolDiao", "Male", "Chester University", "Master's", "Maxtor", "Database Administrator", 1983, "France", "Single"),
    (4014, "Lore Parsan", "Female", "Pietersburg University", "Bachelor", "Sonic", "Database Administrator", 1982, "Spain", "Single"),
    (4023, "Carolin Wolf", "Female", "Franklin High school", "Diploma", "Sony", "Bookkeeping", 1979, "Germany", "Married"),
    (1081, "Alex Monata", "Male", "Lowa University", "Master's", "Sony", "Electrical Engineer", 1986, "UK", "Married"),
    (37, "Silvia Jacson", "Female", "Carolina University", "Bachelor", "MySpace", "Computer Data Clerk", 1978, "Australia", "Married"),
    (1187, "Shery Monaten", "Female", "Dublin High school", "Diploma", "MySpace", "Buyer", 1968, "Australia", "Single"),
    (1195, "Melina Diyana", "Female", "Pietersburg University", "PhD", "MySpace", "Call Center Assistant", 1989, "Australia", "Single"),
    (1234, "LinaEghose", "Female", "Gabelino High school", "Diploma", "Amgen", "Buyer", 1980, "Canada", "Single"),
    (1235, "MariyanaPlanta", "Female", "Iowa University", "Bachelor", "Amgen", "Electrical Engineer", 1987, "Canada", "Single"),
    (1237, "Toney Cazola", "Male", "Carolina University", "Bachelor", "Amgen", "Call center Operator", 1978, "Canada", "Single"),
]

# Three regional groups (USA; UK/Europe; Australia/Canada), dense inside and
# joined by three bridges. 50 edges in total.
_FIXTURE20_EDGES = [
    # USA
    (35, 32), (35, 174), (35, 1236), (35, 2411), (35, 463),
    (36, 32), (36, 174), (36, 2411), (36, 463), (36, 1236),
    (32, 174), (32, 2411), (32, 1236), (174, 1236), (1236, 2411),
    (463, 174), (463, 2411), (174, 2411),
    # UK / Europe
    (33, 34), (33, 163), (33, 1081), (33, 4023), (34, 4023), (34, 163),
    (34, 1081), (34, 4014), (163, 4014), (163, 1081), (163, 4013),
    (4013, 4014), (4013, 1081), (4013, 4023), (4014, 4023), (4023, 1081),
    # Australia / Canada
    (37, 1187), (37, 1195), (37, 1237), (37, 1234), (1187, 1195), (1187, 1234),
    (1187, 1235), (1195, 1237), (1195, 1235), (1195, 1234), (1234, 1235),
    (1234, 1237), (1235, 1237),
    # bridges
    (32, 33), (1236, 1237), (1081, 37),
]

# Friends who actually interact (wall posts, comments, tags).
_FIXTURE20_INTERACTIONS = [
    (35, 32), (35, 174), (35, 1236), (35, 2411), (35, 463),
    (36, 32), (36, 174), (36, 2411), (36, 463), (36, 1236),
    (32, 174), (32, 2411), (32, 1236), (174, 1236), (1236, 2411),
    (463, 174), (463, 2411), (174, 2411),
    (33, 34), (33, 163), (34, 4023), (163, 4014), (4013, 1081), (4023, 1081),
    (37, 1187), (37, 1195), (1187, 1234), (1234, 1235), (1235, 1237),
]

_FIXTURE20_LIKES = {
    32: ["owens-careers", "usa-tech-news"],
    35: ["owens-careers", "web-dev-weekly", "usa-tech-news"],
    36: ["owens-careers", "web-dev-weekly", "usa-tech-news"],
    174: ["java-devs", "usa-tech-news", "web-dev-weekly"],
    463: ["web-dev-weekly", "appnet-team"],
    1236: ["usa-tech-news", "network-admins"],
    2411: ["owens-careers", "usa-tech-news"],
    33: ["sonic-staff", "uk-daily"],
    34: ["sonic-staff", "uk-daily"],
    163: ["sony-europe", "uk-daily"],
    4013: ["db-admins"],
    4014: ["db-admins", "sonic-staff"],
    4023: ["sony-europe"],
    1081: ["sony-europe", "uk-daily"],
    37: ["myspace-team", "aus-news"],
    1187: ["myspace-team", "aus-news"],
    1195: ["myspace-team"],
    1234: ["amgen-staff", "canada-today"],
    1235: ["amgen-staff", "canada-today"],
    1237: ["amgen-staff"],
}

_FIXTURE20_URLS = {
    32: ["u/harvard-alumni", "u/us-news-1"],
    35: ["u/us-news-1", "u/webdev-tips", "u/owens-blog"],
    36: ["u/us-news-1", "u/webdev-tips", "u/owens-blog", "u/carolina"],
    174: ["u/java-tips", "u/us-news-1"],
    463: ["u/webdev-tips"],
    1236: ["u/us-news-1"],
    2411: ["u/owens-blog", "u/us-news-1"],
    33: ["u/uk-news"],
    34: ["u/uk-news"],
    163: ["u/uk-news", "u/sony"],
    1081: ["u/sony"],
    37: ["u/aus-news"],
    1187: ["u/aus-news"],
    1234: ["u/ca-news"],
    1235: ["u/ca-news"],
}


def fixture20_profiles() -> dict[int, AttributeProfile]:
    return {
        row[0]: AttributeProfile(*row[1:])
        for row in _FIXTURE20_ROWS
    }


def build_fixture20() -> SocialGraph:
    """The 20-user reference graph: published attributes, synthesized 50-edge topology."""
    return SocialGraph.build(
        fixture20_profiles(),
        _FIXTURE20_EDGES,
        _FIXTURE20_INTERACTIONS,
        _FIXTURE20_LIKES,
        _FIXTURE20_URLS,
    )


@dataclass(frozen=True)
class SynthParams:
    """Parameters of :func:`generate_synthetic`.

    Nodes are split into consecutive communities of ``community_size``; each
    community has a home location and small pools of schools, employers,
    pages and URLs that its members draw from with high probability, so
    attribute similarity and topology are correlated.
    """

    node_count: int = 1000
    avg_degree: float = 10.0
    community_size: int = 50
    intra_fraction: float = 0.85
    n_first_names: int = 300
    n_last_names: int = 1000
    n_schools: int = 200
    n_employers: int = 300
    n_positions: int = 60
    n_locations: int = 40
    name_duplication_rate: float = 0.01
    interaction_density: float = 0.5
    pages_per_node: int = 4
    urls_per_node: int = 3
    seed: int = 0

    def __post_init__(self):
        for name in ("node_count", "community_size", "n_first_names", "n_last_names", "n_schools",
                     "n_employers", "n_positions", "n_locations"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.avg_degree < 0:
            raise ValueError("avg_degree must be non-negative")
        for name in ("intra_fraction", "name_duplication_rate", "interaction_density"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")


_SYLLABLES = ["ka", "ri", "mo", "sa", "le", "na", "to", "vi", "da", "el", "an", "or", "mi", "ra", "be", "lu",
              "so", "ne", "ti", "ha", "jo", "ma", "ze", "ko", "pa", "ul", "in", "es", "go", "fe"]


def _words(rng, count, parts):
    out, seen = [], set()
    while len(out) < count:
        w = "".join(rng.choice(_SYLLABLES, size=rng.integers(parts[0], parts[1] + 1))).capitalize()
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def _sample_edges(rng, n, community, size, target, intra_fraction):
    """Draw ``target`` distinct undirected pairs, ``intra_fraction`` of them inside communities."""
    chosen: dict[int, None] = {}
    n_intra = int(round(target * intra_fraction))
    comm_start = community * size
    comm_len = np.minimum(size, n - comm_start)
    intra_cap = int(np.sum(comm_len * (comm_len - 1) // 2))
    n_intra = min(n_intra, intra_cap)

    def draw(k, intra):
        u = rng.integers(0, n, size=k)
        if intra:
            c = community[u]
            v = comm_start[c] + rng.integers(0, 1 << 62, size=k) % comm_len[c]
        else:
            v = rng.integers(0, n, size=k)
        ok = u != v
        lo, hi = np.minimum(u, v)[ok], np.maximum(u, v)[ok]
        return lo * n + hi

    for quota, intra in ((n_intra, True), (target, False)):
        stall = 0
        while len(chosen) < quota:
            before = len(chosen)
            need = quota - len(chosen)
            for code in draw(max(2 * need, 64), intra).tolist():
                if code not in chosen:
                    chosen[code] = None
                    if len(chosen) == quota:
                        break
            stall = stall + 1 if len(chosen) == before else 0
            if stall > 50:
                raise ValueError("could not place the requested number of edges")
    codes = np.fromiter(chosen, dtype=np.int64, count=len(chosen))
    return codes // n, codes % n


def generate_synthetic(params: SynthParams) -> SocialGraph:
    """Random community-structured social graph, deterministic per ``params.seed``.

    Node ids are ``0 .. node_count-1``. The edge count is exactly
    ``round(node_count * avg_degree / 2)``.

    Raises:
        ValueError: if more edges are requested than the node count allows.
    """
    p = params
    rng = np.random.default_rng(p.seed)
    n = p.node_count
    target = int(round(n * p.avg_degree / 2))
    if n == 1:
        target = 0
    if target > n * (n - 1) // 2:
        raise ValueError(f"avg_degree {p.avg_degree} infeasible for {n} nodes")
    size = p.community_size
    community = np.arange(n) // size
    n_comm = int(community[-1]) + 1

    firsts = _words(rng, p.n_first_names, (2, 3))
    lasts = _words(rng, p.n_last_names, (2, 4))
    schools = [f"{w} University" for w in _words(rng, p.n_schools, (2, 3))]
    employers = [f"{w} Corp" for w in _words(rng, p.n_employers, (2, 3))]
    positions = [f"{w} Officer" for w in _words(rng, p.n_positions, (2, 2))]
    locations = _words(rng, p.n_locations, (2, 3))
    degrees = ["Diploma", "Bachelor", "Master's", "PhD"]
    genders = ["Female", "Male"]
    statuses = ["Single", "Married", "Engaged"]

    home_loc = rng.integers(0, p.n_locations, size=n_comm)
    school_pool = rng.integers(0, p.n_schools, size=(n_comm, 3))
    employer_pool = rng.integers(0, p.n_employers, size=(n_comm, 3))

    def pick(local_prob, pool_row, vocab_size):
        if rng.random() < local_prob:
            return int(pool_row[rng.integers(0, len(pool_row))])
        return int(rng.integers(0, vocab_size))

    names = []
    for i in range(n):
        c = community[i]
        peers = range(c * size, i)
        if len(peers) and rng.random() < p.name_duplication_rate:
            names.append(names[int(rng.choice(peers))])
        else:
            names.append(f"{firsts[rng.integers(0, len(firsts))]} {lasts[rng.integers(0, len(lasts))]}")
    profiles = {}
    for i in range(n):
        c = community[i]
        profiles[i] = AttributeProfile(
            name=names[i],
            gender=genders[rng.integers(0, 2)],
            school=schools[pick(0.7, school_pool[c], p.n_schools)],
            degree=degrees[rng.integers(0, len(degrees))],
            employer=employers[pick(0.7, employer_pool[c], p.n_employers)],
            position=positions[rng.integers(0, p.n_positions)],
            birth_year=int(rng.integers(1950, 2006)),
            location=locations[home_loc[c] if rng.random() < 0.9 else rng.integers(0, p.n_locations)],
            relationship=statuses[rng.integers(0, len(statuses))],
        )

    u, v = _sample_edges(rng, n, community, size, target, p.intra_fraction)
    edges = list(zip(u.tolist(), v.tolist()))
    active = rng.random(len(edges)) < p.interaction_density
    interactions = [e for e, a in zip(edges, active) if a]

    def behaviour(per_node, pool_size, prefix):
        out = {}
        for i in range(n):
            c = int(community[i])
            k = rng.integers(0, per_node + 1) if per_node else 0
            items = set()
            for _ in range(k):
                if rng.random() < 0.7:
                    items.add(f"{prefix}{c}-{rng.integers(0, pool_size)}")
                else:
                    items.add(f"{prefix}g-{rng.integers(0, 50 * pool_size)}")
            if items:
                out[i] = items
        return out

    likes = behaviour(p.pages_per_node, 8, "page")
    urls = behaviour(p.urls_per_node, 6, "url")
    return SocialGraph.build(profiles, edges, interactions, likes, urls)
