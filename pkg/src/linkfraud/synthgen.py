"""Seeded generators for genuine, freemium and premium follower regimes.

Each generator builds one *service*: a handful of customer accounts (the
egos) and the follower accounts delivered to them. Graph-level statistics
are band-targeted: a freemium service is first calibrated analytically so
its expected egonet density, transitivity and reciprocity sit at the band
centres, then sampled, measured, and resampled until it lands inside the
bands or the attempt budget runs out.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from . import netmetrics
from .attrstats import PowerLawModel
from .errors import GenerationError, ValidationError
from .graph_store import (
    AccountAttributes,
    DirectedGraph,
    NodeId,
    write_attributes,
    write_edges,
    write_labels,
)
from .subnet import extract_egonet

REGIMES = ("genuine", "freemium", "premium_naive", "premium_smart")
PREMIUM = ("premium_naive", "premium_smart")
SHORT = {"genuine": "gen", "freemium": "fre", "premium_naive": "pna", "premium_smart": "psm"}
MAX_ATTEMPTS = 50
BAND_METRICS = ("density", "transitivity", "reciprocity", "overlap")

FREEMIUM_BANDS = {
    "density": (0.045, 0.075),
    "transitivity": (0.24, 0.34),
    "reciprocity": (0.36, 0.46),
    "overlap": (0.7, 0.9),
}
PREMIUM_BANDS = {
    "high": {
        "density": (0.0, 0.003),
        "transitivity": (0.0, 0.001),
        "reciprocity": (0.0, 0.0),
        "overlap": (0.95, 1.0),
    },
    "low": {
        "density": (0.0, 0.003),
        "transitivity": (0.0, 0.001),
        "reciprocity": (0.0, 0.0),
        "overlap": (0.0, 0.05),
    },
}

# structural constants
HIGH_REUSE_SLACK = 0.004  # extra pool accounts per delivered follower, high reuse
LOW_REUSE_POOL = 40  # pool size as a multiple of per-customer delivery, low reuse
PREMIUM_CUSTOMER_UNIVERSE = 2  # other customers per delivered follower
PREMIUM_BIPARTITE = 0.0125  # share of the customer universe each fake account follows
FREEMIUM_FRIENDS = 20
FREEMIUM_FRIEND_UNIVERSE = 10
GENUINE_FRIENDS = 10
GENUINE_COMMUNITY_DEGREE = 15.0
GENUINE_RECIPROCAL = 0.35


def default_bands(regime: str, reuse: str = "high") -> dict:
    if regime == "freemium":
        return dict(FREEMIUM_BANDS)
    if regime in PREMIUM:
        return dict(PREMIUM_BANDS[reuse])
    return {}


@lru_cache(maxsize=1)
def _shipped_attribute_params() -> dict:
    text = resources.files("linkfraud").joinpath("data/regimes.json").read_text(encoding="utf-8")
    return json.loads(text)


def attribute_params(regime: str) -> dict:
    """Copy of the shipped attribute distributions for ``regime``."""
    return copy.deepcopy(_shipped_attribute_params()[regime])


@dataclass(frozen=True)
class RegimeParams:
    regime: str
    n_followers: int = 1000
    n_customers: int = 2
    reuse: str = "high"
    seed: int = 0
    # None -> default bands for the regime; {} -> sample without band checks
    bands: Mapping | None = None
    overlap: float = 0.8
    attributes: Mapping | None = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValidationError(f"unknown regime {self.regime!r}; expected one of {REGIMES}")
        if self.n_followers < 10:
            raise ValidationError("n_followers must be >= 10")
        if self.n_customers < 1:
            raise ValidationError("n_customers must be >= 1")
        if self.reuse not in ("high", "low"):
            raise ValidationError("reuse must be 'high' or 'low'")
        if not 0.0 < self.overlap <= 1.0:
            raise ValidationError("overlap must be in (0, 1]")
        for name, band in (self.bands or {}).items():
            if name not in BAND_METRICS:
                raise ValidationError(f"unknown band metric {name!r}")
            lo, hi = band
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValidationError(f"band {name}={band} must satisfy 0 <= lo <= hi <= 1")

    def resolved_bands(self) -> dict:
        if self.bands is None:
            return default_bands(self.regime, self.reuse)
        return {k: tuple(v) for k, v in self.bands.items()}

    def resolved_attributes(self) -> dict:
        params = attribute_params(self.regime)
        for name, override in (self.attributes or {}).items():
            params[name] = dict(override)
        return params

    def to_dict(self) -> dict:
        d = {
            "regime": self.regime,
            "n_followers": self.n_followers,
            "n_customers": self.n_customers,
            "reuse": self.reuse,
            "seed": self.seed,
            "overlap": self.overlap,
        }
        if self.bands is not None:
            d["bands"] = {k: list(v) for k, v in self.bands.items()}
        if self.attributes is not None:
            d["attributes"] = dict(self.attributes)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "RegimeParams":
        known = {"regime", "n_followers", "n_customers", "reuse", "seed", "bands", "overlap", "attributes"}
        extra = set(d) - known - {"count"}
        if extra:
            raise ValidationError(f"unknown regime parameter(s) {sorted(extra)}")
        kwargs = {k: d[k] for k in known if k in d}
        if "bands" in kwargs and kwargs["bands"] is not None:
            kwargs["bands"] = {k: tuple(v) for k, v in kwargs["bands"].items()}
        return cls(**kwargs)


@dataclass(frozen=True)
class ServiceInfo:
    regime: str
    customers: tuple
    metrics: dict = field(default_factory=dict)
    attempts: int = 1


@dataclass
class LabeledCorpus:
    graph: DirectedGraph
    attributes: dict  # NodeId -> AccountAttributes
    labels: dict  # customer NodeId -> genuine | fraud
    regimes: dict  # customer NodeId -> regime
    services: dict  # service id -> ServiceInfo

    @property
    def customers(self) -> list:
        return sorted(self.labels)

    def followers(self, customer: NodeId) -> set:
        return set(self.graph.in_neighbors(customer))

    def write(self, out_dir) -> None:
        """Write edges.csv, attributes.csv, labels.csv and services.csv."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_edges(self.graph, out_dir / "edges.csv")
        write_attributes(self.attributes, out_dir / "attributes.csv")
        write_labels(self.labels, out_dir / "labels.csv")
        with (out_dir / "services.csv").open("w", encoding="utf-8", newline="") as fh:
            fh.write("service,regime,customer\n")
            for sid in sorted(self.services):
                info = self.services[sid]
                for c in info.customers:
                    fh.write(f"{sid},{info.regime},{c}\n")


# -- attribute sampling -----------------------------------------------------


def _sample_count(rng, spec, n):
    ranks = PowerLawModel(float(spec["alpha"]), int(spec["support"])).sample(n, rng)
    return (int(spec.get("offset", 0)) + int(spec.get("step", 1)) * ranks).astype(np.int64)


def _sample_label(rng, spec, n, dominant=None):
    labels = list(spec["labels"])
    w = np.asarray(spec["weights"], dtype=float)
    out = [labels[i] for i in rng.choice(len(labels), size=n, p=w / w.sum())]
    share = spec.get("dominant")
    if dominant is not None and share:
        keep = rng.random(n) < share
        out = [dominant if k else v for k, v in zip(keep, out)]
    return out


def _sample_descriptions(rng, spec, n):
    words, fillers = spec["words"], spec.get("fillers", [])
    lo, hi = int(spec.get("min_words", 2)), int(spec.get("max_words", 8))
    missing = rng.random(n) < float(spec.get("p_missing", 0.0))
    out = []
    for i in range(n):
        k = int(rng.integers(lo, hi + 1))
        toks = []
        for _ in range(k):
            if fillers and rng.random() < 0.3:
                toks.append(fillers[int(rng.integers(len(fillers)))])
            else:
                toks.append(words[int(rng.integers(len(words)))])
        text = " ".join(toks)[:160].strip()
        out.append(None if missing[i] or not text else text)
    return out


def sample_attributes(rng, params: Mapping, ids: Sequence[NodeId], dominant_lang=None) -> dict:
    """Draw an AccountAttributes record for each id from regime ``params``."""
    n = len(ids)
    if n == 0:
        return {}
    cols: dict = {}
    years = params["created_year"]["weights"]
    ylabels = sorted(years)
    yw = np.asarray([years[y] for y in ylabels], dtype=float)
    cols["created_year"] = [int(ylabels[i]) for i in rng.choice(len(ylabels), size=n, p=yw / yw.sum())]
    for f in ("default_profile", "default_profile_image", "geo_enabled", "protected", "verified"):
        cols[f] = list(rng.random(n) < float(params[f]["p"]))
    for f in ("favorites_count", "followers_count", "friends_count", "listed_count", "statuses_count"):
        cols[f] = _sample_count(rng, params[f], n).tolist()
    cols["lang"] = _sample_label(rng, params["lang"], n, dominant_lang)
    cols["utc_offset"] = _sample_label(rng, params["utc_offset"], n)
    cols["description"] = _sample_descriptions(rng, params["description"], n)
    out = {}
    for i, acc in enumerate(ids):
        rec = {k: v[i] for k, v in cols.items()}
        for f in ("default_profile", "default_profile_image", "geo_enabled", "protected", "verified"):
            rec[f] = bool(rec[f])
        out[acc] = AccountAttributes(account=acc, **rec)
    return out


# -- graph pieces -----------------------------------------------------------


def _clustered_pairs(rng, clusters: np.ndarray, p_in: float, p_out: float, q: float):
    """Sample an undirected clustered graph and orient it.

    Returns (src, dst) index arrays. Each connected pair is mutual with
    probability ``q``, otherwise a single edge in a random direction.
    """
    n = len(clusters)
    if n < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    i, j = np.triu_indices(n, 1)
    prob = np.where(clusters[i] == clusters[j], p_in, p_out)
    hit = rng.random(len(i)) < prob
    i, j = i[hit], j[hit]
    mutual = rng.random(len(i)) < q
    flip = rng.random(len(i)) < 0.5
    one = np.where(flip, j, i)
    two = np.where(flip, i, j)
    src = np.concatenate([one, two[mutual]])
    dst = np.concatenate([two, one[mutual]])
    return src, dst


@dataclass
class _Service:
    regime: str
    customers: list
    followers: dict  # customer -> list of follower ids
    edges: list
    nodes: list
    attrs: dict
    metrics: dict = field(default_factory=dict)
    attempts: int = 1


def measure_service(graph: DirectedGraph, customers: Sequence[NodeId]) -> dict:
    """Egonet density/transitivity/reciprocity and minimum pairwise overlap."""
    view = extract_egonet(graph, customers)
    rep = netmetrics.metric_report(view)
    out = {"density": rep.density, "transitivity": rep.transitivity, "reciprocity": rep.reciprocity}
    overlaps = []
    fsets = [set(graph.in_neighbors(c)) for c in customers]
    for a in range(len(fsets)):
        for b in range(a + 1, len(fsets)):
            if fsets[a] and fsets[b]:
                overlaps.append(netmetrics.overlap_coefficient(fsets[a], fsets[b]))
    out["overlap"] = min(overlaps) if overlaps else None
    return out


def within_bands(metrics: Mapping, bands: Mapping, tol: float = 1e-12) -> bool:
    for name, (lo, hi) in bands.items():
        v = metrics.get(name)
        if v is None:
            if name == "overlap":
                continue
            return False
        if v < lo - tol or v > hi + tol:
            return False
    return True


def _band_center(bands, name, fallback):
    lo, hi = bands.get(name, fallback)
    return 0.5 * (lo + hi)


# -- freemium calibration -----------------------------------------------------


def _c2(x):
    return x * (x - 1) / 2.0


def _c3(x):
    return x * (x - 1) * (x - 2) / 6.0


class _FreemiumModel:
    """Expected egonet statistics of a clustered, reciprocal follower pool."""

    def __init__(self, clusters, members, ego_sets, ego_links):
        k = int(clusters.max()) + 1 if len(clusters) else 1
        cm = clusters[members]
        self.u = len(members)
        self.n_egos = len(ego_sets)
        s = np.bincount(cm, minlength=k).astype(float)
        self.s = s
        self.wp = float(np.sum(_c2(s)))
        self.bp = _c2(self.u) - self.wp
        self.t_same = float(np.sum(_c3(s)))
        self.t_two = float(np.sum(_c2(s) * (self.u - s)))
        self.t_diff = _c3(self.u) - self.t_same - self.t_two
        self.ego_w, self.ego_b, self.ego_wedges = [], [], 0.0
        for es in ego_sets:
            t = np.bincount(clusters[es], minlength=k).astype(float)
            w = float(np.sum(_c2(t)))
            self.ego_w.append(w)
            self.ego_b.append(_c2(len(es)) - w)
            self.ego_wedges += _c2(len(es))
        self.ego_w = np.asarray(self.ego_w)
        self.ego_b = np.asarray(self.ego_b)
        self.member_size = s[cm]  # cluster size of each member
        self.ego_links = ego_links.astype(float)
        self.e_ego = float(ego_links.sum())
        self.n = self.u + self.n_egos

    def transitivity(self, p_in, p_out):
        tri = (
            self.t_same * p_in**3
            + self.t_two * p_in * p_out**2
            + self.t_diff * p_out**3
            + float(np.sum(self.ego_w * p_in + self.ego_b * p_out))
        )
        sk = self.member_size
        mean = self.ego_links + (sk - 1) * p_in + (self.u - sk) * p_out
        var = (sk - 1) * p_in * (1 - p_in) + (self.u - sk) * p_out * (1 - p_out)
        wedges = self.ego_wedges + float(np.sum((var + mean**2 - mean) / 2.0))
        return 3.0 * tri / wedges if wedges > 0 else 0.0

    def solve(self, density, reciprocity, transitivity):
        """Return (p_in, p_out, q, feasible)."""
        total = density * self.n * (self.n - 1)
        conn = total - self.e_ego - reciprocity * total / 2.0
        if conn <= 0 or self.wp <= 0:
            return 0.0, 0.0, 0.0, False
        q = reciprocity * total / (2.0 * conn)
        feasible = q <= 1.0
        q = min(q, 1.0)
        lo = max(0.0, (conn - self.wp) / self.bp) if self.bp > 0 else 0.0
        hi = conn / (self.wp + self.bp)
        if lo > hi:
            return 1.0, 1.0, q, False

        def p_in_of(p_out):
            return (conn - self.bp * p_out) / self.wp

        def f(p_out):
            return self.transitivity(p_in_of(p_out), p_out) - transitivity

        if f(lo) < 0:
            return p_in_of(lo), lo, q, False
        if f(hi) > 0:
            return p_in_of(hi), hi, q, feasible
        p_out = brentq(f, lo, hi, xtol=1e-12)
        return p_in_of(p_out), p_out, q, feasible


def _freemium_structure(rng, p: RegimeParams, targets):
    n = p.n_followers
    pool = max(n, int(round(n / p.overlap)))
    picks = [np.sort(rng.choice(pool, size=n, replace=False)) for _ in range(p.n_customers)]
    ego_links = np.zeros(pool, dtype=np.int64)
    for pk in picks:
        ego_links[pk] += 1
    members = np.flatnonzero(ego_links)
    assign = rng.random(pool)
    best = None
    for k in range(3, max(3, len(members) // 4) + 1):
        clusters = np.minimum((assign * k).astype(np.int64), k - 1)
        model = _FreemiumModel(clusters, members, picks, ego_links[members])
        p_in, p_out, q, ok = model.solve(*targets)
        if ok and p_in <= 1.0:
            best = (clusters, p_in, p_out, q)
            break
        if best is None:
            best = (clusters, min(p_in, 1.0), p_out, q)
    return pool, picks, best


# -- service builders -----------------------------------------------------------


def _ids(prefix, kind, n):
    return [f"{prefix}:{kind}{i}" for i in range(n)]


def _friends(rng, n_accounts, per_account, universe):
    """Each account follows ``per_account`` distinct indices in ``range(universe)``."""
    per_account = min(per_account, universe)
    out = []
    for _ in range(n_accounts):
        out.append(np.sort(rng.choice(universe, size=per_account, replace=False)))
    return out


def _build_genuine(rng, p: RegimeParams, prefix: str) -> _Service:
    gparams = p.resolved_attributes()
    customers = _ids(prefix, "c", p.n_customers)
    cust_attrs = sample_attributes(rng, attribute_params("genuine"), customers)
    edges, nodes, attrs, followers = [], list(customers), dict(cust_attrs), {}
    for ci, c in enumerate(customers):
        n = p.n_followers
        fids = [f"{prefix}:c{ci}f{j}" for j in range(n)]
        k = int(rng.integers(3, 9))
        clusters = rng.integers(0, k, size=n)
        size = max(n / k, 2.0)
        p_in = min(0.6, GENUINE_COMMUNITY_DEGREE / size)
        src, dst = _clustered_pairs(rng, clusters, p_in, 0.02 * p_in, GENUINE_RECIPROCAL)
        edges += [(fids[a], fids[b]) for a, b in zip(src.tolist(), dst.tolist())]
        edges += [(f, c) for f in fids]
        universe = FREEMIUM_FRIEND_UNIVERSE * n
        for f, fr in zip(fids, _friends(rng, n, GENUINE_FRIENDS, universe)):
            edges += [(f, f"{prefix}:c{ci}x{m}") for m in fr.tolist()]
        nodes += fids
        attrs.update(sample_attributes(rng, gparams, fids, dominant_lang=cust_attrs[c].lang))
        followers[c] = fids
    return _Service("genuine", customers, followers, edges, nodes, attrs)


def _build_freemium(rng, p: RegimeParams, prefix: str) -> _Service:
    bands = p.resolved_bands()
    targets = (
        _band_center(bands, "density", FREEMIUM_BANDS["density"]),
        _band_center(bands, "reciprocity", FREEMIUM_BANDS["reciprocity"]),
        _band_center(bands, "transitivity", FREEMIUM_BANDS["transitivity"]),
    )
    pool, picks, (clusters, p_in, p_out, q) = _freemium_structure(rng, p, targets)
    customers = _ids(prefix, "c", p.n_customers)
    fids = _ids(prefix, "f", pool)
    src, dst = _clustered_pairs(rng, clusters, p_in, p_out, q)
    edges = [(fids[a], fids[b]) for a, b in zip(src.tolist(), dst.tolist())]
    followers = {}
    for c, pk in zip(customers, picks):
        followers[c] = [fids[i] for i in pk.tolist()]
        edges += [(f, c) for f in followers[c]]
    universe = FREEMIUM_FRIEND_UNIVERSE * pool
    for f, fr in zip(fids, _friends(rng, pool, FREEMIUM_FRIENDS, universe)):
        edges += [(f, f"{prefix}:x{m}") for m in fr.tolist()]
    attrs = sample_attributes(rng, attribute_params("genuine"), customers)
    attrs.update(sample_attributes(rng, p.resolved_attributes(), fids))
    return _Service("freemium", customers, followers, edges, customers + fids, attrs)


def _build_premium(rng, p: RegimeParams, prefix: str) -> _Service:
    n = p.n_followers
    if p.reuse == "high":
        pool = n + max(1, math.ceil(HIGH_REUSE_SLACK * n))
    else:
        pool = LOW_REUSE_POOL * n
    picks = [np.sort(rng.choice(pool, size=n, replace=False)) for _ in range(p.n_customers)]
    used = np.unique(np.concatenate(picks))
    customers = _ids(prefix, "c", p.n_customers)
    name = {int(i): f"{prefix}:f{int(i)}" for i in used}
    fids = [name[int(i)] for i in used]
    edges, followers = [], {}
    for c, pk in zip(customers, picks):
        followers[c] = [name[int(i)] for i in pk]
        edges += [(f, c) for f in followers[c]]
    universe = PREMIUM_CUSTOMER_UNIVERSE * n
    per = max(1, int(round(PREMIUM_BIPARTITE * universe)))
    for f, fr in zip(fids, _friends(rng, len(fids), per, universe)):
        edges += [(f, f"{prefix}:x{m}") for m in fr.tolist()]
    attrs = sample_attributes(rng, attribute_params("genuine"), customers)
    attrs.update(sample_attributes(rng, p.resolved_attributes(), fids))
    return _Service(p.regime, customers, followers, edges, customers + fids, attrs)


_BUILDERS = {
    "genuine": _build_genuine,
    "freemium": _build_freemium,
    "premium_naive": _build_premium,
    "premium_smart": _build_premium,
}


def _generate_service(p: RegimeParams, prefix: str, spawn_key: tuple) -> _Service:
    bands = p.resolved_bands()
    last = None
    for attempt in range(MAX_ATTEMPTS):
        ss = np.random.SeedSequence(entropy=p.seed, spawn_key=spawn_key + (attempt,))
        rng = np.random.default_rng(ss)
        svc = _BUILDERS[p.regime](rng, p, prefix)
        if not bands:
            svc.attempts = attempt + 1
            return svc
        g = DirectedGraph(svc.edges, svc.nodes)
        metrics = measure_service(g, svc.customers)
        last = metrics
        if within_bands(metrics, bands):
            svc.metrics = metrics
            svc.attempts = attempt + 1
            return svc
    raise GenerationError(
        f"{p.regime} service {prefix!r} missed bands {bands} after {MAX_ATTEMPTS} attempts; last={last}"
    )


def _assemble(services: Sequence[tuple[str, _Service]]) -> LabeledCorpus:
    edges, nodes, attrs, labels, regimes, infos = [], [], {}, {}, {}, {}
    seen = set()
    for sid, svc in services:
        for v in svc.nodes:
            if v in seen:
                raise GenerationError(f"node id collision on {v!r}")
        seen.update(svc.nodes)
        edges += svc.edges
        nodes += svc.nodes
        attrs.update(svc.attrs)
        lab = "genuine" if svc.regime == "genuine" else "fraud"
        for c in svc.customers:
            labels[c] = lab
            regimes[c] = svc.regime
        infos[sid] = ServiceInfo(svc.regime, tuple(svc.customers), dict(svc.metrics), svc.attempts)
    return LabeledCorpus(DirectedGraph(edges, nodes), attrs, labels, regimes, infos)


def _single(p: RegimeParams, allowed) -> LabeledCorpus:
    if p.regime not in allowed:
        raise ValidationError(f"regime {p.regime!r} not accepted here (expected {allowed})")
    prefix = f"{SHORT[p.regime]}0s0"
    return _assemble([(prefix, _generate_service(p, prefix, (0, 0)))])


def gen_genuine(p: RegimeParams) -> LabeledCorpus:
    """Customers whose followers form 3-8 communities and share a dominant language."""
    return _single(p, ("genuine",))


def gen_freemium(p: RegimeParams) -> LabeledCorpus:
    """Customers served from one shared pool of reciprocally trading real accounts."""
    return _single(p, ("freemium",))


def gen_premium(p: RegimeParams) -> LabeledCorpus:
    """Customers served from a pool of synthetic accounts that only follow customers."""
    return _single(p, PREMIUM)


def gen_corpus(spec: Sequence[tuple[RegimeParams, int]]) -> LabeledCorpus:
    """Union of services until each regime reaches its requested customer count.

    Customers are grouped into services of ``n_customers`` (the last one may
    be smaller); every service gets its own namespace and seed stream.
    """
    spec = list(spec)
    if not spec:
        raise ValidationError("corpus spec is empty")
    regimes = {p.regime for p, _ in spec}
    if "genuine" not in regimes or len(regimes) < 2:
        raise ValidationError("corpus needs genuine plus at least one other regime")
    services = []
    for si, (p, count) in enumerate(spec):
        if count < 1:
            raise ValidationError(f"customer count for {p.regime} must be >= 1")
        n_svc = math.ceil(count / p.n_customers)
        for k in range(n_svc):
            size = min(p.n_customers, count - k * p.n_customers)
            sub = RegimeParams(**{**p.__dict__, "n_customers": size})
            prefix = f"{SHORT[p.regime]}{si}s{k}"
            services.append((prefix, _generate_service(sub, prefix, (si, k))))
    return _assemble(services)


DEFAULT_CORPUS = {
    "seed": 7,
    "regimes": [
        {"regime": "genuine", "count": 200, "n_followers": 100, "n_customers": 2},
        {"regime": "freemium", "count": 150, "n_followers": 100, "n_customers": 2},
        {"regime": "premium_naive", "count": 157, "n_followers": 100, "n_customers": 2, "bands": {}},
    ],
}


def corpus_spec_from_config(config: Mapping, seed: int | None = None) -> list:
    """Turn a ``{"seed": .., "regimes": [{"regime": .., "count": .., ...}]}`` config into a spec."""
    base_seed = config.get("seed", 0) if seed is None else seed
    out = []
    for entry in config.get("regimes", []):
        entry = dict(entry)
        count = int(entry.pop("count", 1))
        entry.setdefault("seed", base_seed)
        if seed is not None:
            entry["seed"] = seed
        out.append((RegimeParams.from_dict(entry), count))
    return out


def default_corpus(seed: int = 7) -> LabeledCorpus:
    return gen_corpus(corpus_spec_from_config(DEFAULT_CORPUS, seed=seed))
