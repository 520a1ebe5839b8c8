"""Attribute histograms and entropy, power-law entropy and exponent fitting,
and description token counts."""
from __future__ import annotations

import math
import re
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InsufficientDataError, SingularExponentError
from .graph_store import AccountAttributes

# Column order of the per-service entropy table.
ATTRIBUTES = (
    "created_year",
    "default_profile",
    "default_profile_image",
    "favorites_count",
    "followers_count",
    "friends_count",
    "listed_count",
    "statuses_count",
    "geo_enabled",
    "lang",
    "protected",
    "utc_offset",
    "verified",
)
ATTRIBUTE_KIND = {
    "created_year": "year",
    "default_profile": "bool",
    "default_profile_image": "bool",
    "favorites_count": "count",
    "followers_count": "count",
    "friends_count": "count",
    "listed_count": "count",
    "statuses_count": "count",
    "geo_enabled": "bool",
    "lang": "label",
    "protected": "bool",
    "utc_offset": "label",
    "verified": "bool",
}
FIRST_YEAR, LAST_YEAR = 2006, 2016
N_LANGUAGES = 35
N_TIMEZONES = 39


class Histogram:
    """Outcome -> count map. Only outcomes with a positive count are stored."""

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping | None = None):
        c = Counter()
        for k, v in (counts or {}).items():
            if v < 0:
                raise ValueError(f"negative count for outcome {k!r}")
            if v:
                c[k] = int(v)
        self._counts = c

    @classmethod
    def from_values(cls, values: Iterable) -> "Histogram":
        return cls(Counter(v for v in values if v is not None))

    @property
    def outcomes(self) -> dict:
        return dict(self._counts)

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    def __len__(self):
        return len(self._counts)

    def __repr__(self):
        return f"Histogram({dict(self._counts)!r})"


@dataclass(frozen=True)
class BinningScheme:
    """Logarithmic bins over [lo, hi]; values outside clamp to the end bins."""

    n_bins: int = 32
    lo: int = 1
    hi: int = 1_000_000

    @property
    def thresholds(self) -> tuple:
        # value v lands in bin b >= 1 iff v >= thresholds[b-1]
        return _thresholds(self.n_bins, self.lo, self.hi)

    def index(self, v) -> int:
        if v <= self.lo:
            return 0
        if v >= self.hi:
            return self.n_bins - 1
        return min(bisect_right(self.thresholds, v), self.n_bins - 1)


@lru_cache(maxsize=8)
def _thresholds(n_bins, lo, hi):
    span = math.log10(hi) - math.log10(lo)
    return tuple(lo * 10 ** (span * b / n_bins) for b in range(1, n_bins))


DEFAULT_BINS = BinningScheme()


def discretize_count(v: int, scheme: BinningScheme = DEFAULT_BINS) -> int:
    if v < 0:
        raise ValueError(f"count must be non-negative, got {v}")
    return scheme.index(v)


def entropy(h: Histogram) -> float:
    """Plug-in Shannon entropy in bits."""
    counts = [c for c in h.outcomes.values()]
    total = sum(counts)
    if total == 0:
        raise InsufficientDataError("entropy of an empty histogram")
    if len(counts) == 1:
        return 0.0
    # log2(N) - sum(c log2 c)/N is better conditioned than summing p log p
    s = math.fsum(c * math.log2(c) for c in counts)
    val = math.log2(total) - s / total
    return min(max(val, 0.0), math.log2(len(counts)))


def max_entropy(n: int) -> float:
    if n < 1:
        raise ValueError("outcome space must have at least one outcome")
    return math.log2(n)


def attribute_outcome(attr: str, value, scheme: BinningScheme = DEFAULT_BINS):
    """Map a raw attribute value onto its histogram outcome (None stays None)."""
    if value is None:
        return None
    if ATTRIBUTE_KIND[attr] == "count":
        return discretize_count(value, scheme)
    return value


def attribute_histograms(
    accounts: Iterable[AccountAttributes], scheme: BinningScheme = DEFAULT_BINS
) -> dict[str, Histogram]:
    accounts = list(accounts)
    return {
        a: Histogram.from_values(attribute_outcome(a, getattr(acc, a), scheme) for acc in accounts)
        for a in ATTRIBUTES
    }


def attribute_entropy_table(
    accounts: Iterable[AccountAttributes], scheme: BinningScheme = DEFAULT_BINS
) -> dict[str, float | None]:
    """Entropy of each attribute over ``accounts``; ``None`` where all values are missing."""
    accounts = list(accounts)
    if not accounts:
        raise InsufficientDataError("entropy table needs at least one account")
    out = {}
    for a, h in attribute_histograms(accounts, scheme).items():
        out[a] = entropy(h) if h.total else None
    return out


def outcome_space_sizes(
    accounts: Iterable[AccountAttributes] | None = None, scheme: BinningScheme = DEFAULT_BINS
) -> dict[str, int]:
    """Outcome-space size per attribute.

    Years default to 2006-2016, languages to 35 and timezones to 39; observed
    data can only widen these.
    """
    sizes = {}
    accounts = list(accounts or [])
    for a in ATTRIBUTES:
        kind = ATTRIBUTE_KIND[a]
        if kind == "bool":
            sizes[a] = 2
        elif kind == "count":
            sizes[a] = scheme.n_bins
        elif kind == "year":
            years = [acc.created_year for acc in accounts if acc.created_year is not None]
            lo = min([FIRST_YEAR] + years)
            hi = max([LAST_YEAR] + years)
            sizes[a] = hi - lo + 1
        else:
            default = N_LANGUAGES if a == "lang" else N_TIMEZONES
            observed = {getattr(acc, a) for acc in accounts} - {None}
            sizes[a] = max(default, len(observed))
    return sizes


def max_entropy_row(accounts=None, scheme: BinningScheme = DEFAULT_BINS) -> dict[str, float]:
    return {a: max_entropy(n) for a, n in outcome_space_sizes(accounts, scheme).items()}


# -- power laws -------------------------------------------------------------


@dataclass(frozen=True)
class PowerLawModel:
    """P(r) = C * r**-alpha over ranks r = 1..size, with C = 1 / H(size, alpha)."""

    alpha: float
    size: int

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.size < 1:
            raise ValueError("size must be >= 1")

    def weights(self) -> np.ndarray:
        r = np.arange(1, self.size + 1, dtype=float)
        return r ** -self.alpha

    @property
    def harmonic(self) -> float:
        """Generalized harmonic number H(size, alpha)."""
        return float(math.fsum(self.weights()))

    @property
    def normalizer(self) -> float:
        return 1.0 / self.harmonic

    def pmf(self) -> np.ndarray:
        return self.weights() * self.normalizer

    def cdf(self) -> np.ndarray:
        return _cdf(float(self.alpha), int(self.size)).copy()

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` ranks by inverting the cumulative distribution."""
        u = rng.random(n)
        idx = np.searchsorted(_cdf(float(self.alpha), int(self.size)), u, side="right")
        return np.minimum(idx, self.size - 1) + 1


@lru_cache(maxsize=64)
def _cdf(alpha: float, size: int) -> np.ndarray:
    c = np.cumsum(PowerLawModel(alpha, size).weights())
    c /= c[-1]
    c.flags.writeable = False
    return c


def powerlaw_entropy_exact(m: PowerLawModel) -> float:
    """Entropy in bits by direct summation over all ranks."""
    if m.size == 1:
        return 0.0
    r = np.arange(1, m.size + 1, dtype=float)
    w = r ** -m.alpha
    z = math.fsum(w)
    # H = log2 Z + alpha * sum(w log2 r) / Z
    return math.log2(z) + m.alpha * math.fsum(w * np.log2(r)) / z


def powerlaw_entropy_closed_form(m: PowerLawModel) -> float:
    """Entropy with the rank sums replaced by their integrals over [1, size]."""
    a, v = float(m.alpha), m.size
    if a <= 0:
        raise ValueError("closed form needs alpha > 0")
    if a == 1.0:
        raise SingularExponentError("closed form is singular at alpha = 1; use powerlaw_entropy_exact")
    if v < 2:
        raise ValueError("closed form needs size >= 2")
    c = m.normalizer
    vp = v ** (1.0 - a)
    first = -c * math.log2(c) * (vp - 1.0) / (1.0 - a)
    second = a * c * (-vp * ((a - 1.0) * math.log(v) + 1.0) + 1.0) / ((a - 1.0) ** 2 * math.log(2.0))
    return first + second


MIN_FIT_SAMPLES = 30


@dataclass(frozen=True)
class PowerLawFit:
    alpha_mle: float
    alpha_rank: float | None
    n: int
    divergent: bool = False

    def asdict(self) -> dict:
        return {
            "alpha_mle": None if math.isinf(self.alpha_mle) else self.alpha_mle,
            "alpha_rank": self.alpha_rank,
            "n": self.n,
            "divergent": self.divergent,
        }


def rank_frequency(counts: Iterable[int]) -> list[tuple[int, int]]:
    """(rank, frequency) of distinct values, most frequent first."""
    freq = sorted(Counter(int(c) for c in counts).values(), reverse=True)
    return [(i + 1, f) for i, f in enumerate(freq)]


def _rank_slope(points, min_frequency):
    if len(points) < 2:
        return None
    head = [(r, f) for r, f in points if f >= min_frequency]
    if len(head) < 3:
        head = points[: max(3, len(head))]
    if len(head) < 2:
        return None
    x = np.log([r for r, _ in head])
    y = np.log([f for _, f in head])
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def fit_powerlaw(counts: Sequence[int], min_frequency: int = 10) -> PowerLawFit:
    """Estimate a power-law exponent two ways.

    ``alpha_mle`` is the discrete maximum-likelihood approximation with
    x_min = 1. ``alpha_rank`` is the least-squares slope of the log-log
    rank-frequency curve, restricted to ranks whose frequency is at least
    ``min_frequency`` (the sparse tail is dominated by sampling noise).
    """
    x = np.asarray(list(counts), dtype=float)
    if x.size < MIN_FIT_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_FIT_SAMPLES} samples, got {x.size}")
    if np.any(x < 1):
        raise ValueError("power-law samples must all be >= 1")
    pts = rank_frequency(x.astype(np.int64))
    alpha_rank = _rank_slope(pts, min_frequency)
    if np.all(x == 1):
        # every likelihood term is maximised as alpha -> infinity
        return PowerLawFit(math.inf, alpha_rank, int(x.size), divergent=True)
    alpha_mle = 1.0 + x.size / float(np.sum(np.log(x / 0.5)))
    return PowerLawFit(float(alpha_mle), alpha_rank, int(x.size))


# -- description tokens -----------------------------------------------------

_TOKEN = re.compile(r"[^\W_]+")


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset:
    text = resources.files("linkfraud").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(
        w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#")
    )


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def token_frequency(descriptions: Iterable[str | None], stopwords=None) -> list[tuple[str, int]]:
    stop = default_stopwords() if stopwords is None else {s.lower() for s in stopwords}
    c = Counter()
    for d in descriptions:
        if not d:
            continue
        c.update(t for t in tokenize(d) if t not in stop)
    return sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))
