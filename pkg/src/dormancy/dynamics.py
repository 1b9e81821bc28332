"""Beauty Coefficient, awakening time and Sleeping Beauty selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import CitationSeries, CorpusIndex, DocType, yearly_citation_series
from .errors import EmptyCorpusError, EmptySeriesError

__all__ = [
    "BeautyResult",
    "CitationSeries",
    "SelectionConfig",
    "SleepingBeautyRecord",
    "awakening_time",
    "beauty",
    "beauty_coefficient",
    "corrected_citation_percentile",
    "select_sleeping_beauties",
]


@dataclass(frozen=True)
class BeautyResult:
    b: float
    t_m: int
    t_a: int
    awakening_year: int


@dataclass(frozen=True)
class SleepingBeautyRecord:
    id: str
    beauty: BeautyResult
    corrected_percentile: float

    @property
    def b(self) -> float:
        return self.beauty.b

    @property
    def t_m(self) -> int:
        return self.beauty.t_m

    @property
    def t_a(self) -> int:
        return self.beauty.t_a

    @property
    def awakening_year(self) -> int:
        return self.beauty.awakening_year

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "b": self.b,
            "t_m": self.t_m,
            "t_a": self.t_a,
            "awakening_year": self.awakening_year,
            "corrected_percentile": self.corrected_percentile,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SleepingBeautyRecord":
        return cls(
            d["id"],
            BeautyResult(float(d["b"]), int(d["t_m"]), int(d["t_a"]), int(d["awakening_year"])),
            float(d["corrected_percentile"]),
        )


def _counts(series) -> np.ndarray:
    counts = series.counts if isinstance(series, CitationSeries) else np.asarray(series, dtype=np.int64)
    if counts.size == 0:
        raise EmptySeriesError("citation series is empty")
    return counts


def beauty_coefficient(series) -> tuple[float, int]:
    """Return ``(B, t_m)`` for a yearly citation series.

    ``t_m`` is the earliest age with the maximum yearly count. B sums, over ages
    0..t_m, the gap between the straight line joining ``(0, c_0)`` and
    ``(t_m, c_tm)`` and the observed count, each gap divided by ``max(1, c_t)``.
    B is 0 when the peak is in the publication year.
    """
    c = _counts(series)
    t_m = int(np.argmax(c))
    if t_m == 0:
        return 0.0, 0
    c = c[: t_m + 1].astype(np.float64)
    t = np.arange(t_m + 1, dtype=np.float64)
    slope = (c[t_m] - c[0]) / t_m
    terms = (slope * t + c[0] - c) / np.maximum(1.0, c)
    return float(terms.sum()), t_m


def awakening_time(series) -> int:
    """Age in ``[0, t_m]`` farthest from the line joining the first and peak counts.

    The distance numerator is an integer, so the argmax (earliest on ties) is
    exact; the common denominator does not affect it.
    """
    c = _counts(series)
    t_m = int(np.argmax(c))
    if t_m == 0:
        return 0
    c = c[: t_m + 1]
    t = np.arange(t_m + 1, dtype=np.int64)
    d = np.abs((c[t_m] - c[0]) * t - t_m * c + t_m * c[0])
    return int(np.argmax(d))


def beauty(series: CitationSeries) -> BeautyResult:
    b, t_m = beauty_coefficient(series)
    t_a = awakening_time(series)
    return BeautyResult(b, t_m, t_a, series.pub_year + t_a)


def _percentile_array(index: CorpusIndex, horizon_year: int) -> np.ndarray:
    n = index.n_papers
    if n == 0:
        return np.zeros(0)
    totals = index.citation_totals(horizon_year).astype(np.int64)
    _, cohort = np.unique(
        np.stack([index.field_codes.astype(np.int64), index.years.astype(np.int64)]),
        axis=1,
        return_inverse=True,
    )
    cohort = cohort.ravel().astype(np.int64)
    keys = cohort * (int(totals.max()) + 1) + totals
    sorted_keys = np.sort(keys)
    sizes = np.bincount(cohort)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    left = np.searchsorted(sorted_keys, keys, "left")
    right = np.searchsorted(sorted_keys, keys, "right")
    lower = left - starts[cohort]
    equal = right - left
    size = sizes[cohort]
    pct = (lower + 0.5 * equal) / size
    pct[size == 1] = 1.0
    return pct


def corrected_citation_percentile(index: CorpusIndex, horizon_year: int | None = None) -> dict[str, float]:
    """Field- and year-corrected citation percentile of every paper.

    Within each (field_code, publication year) cohort, a paper's percentile is
    the share of the cohort with strictly fewer citations up to the horizon,
    plus half the share tied with it (itself included). Singleton cohorts get 1.0.
    """
    horizon = index.y_max if horizon_year is None else horizon_year
    pct = _percentile_array(index, horizon)
    return dict(zip(index.ids, pct.tolist()))


@dataclass(frozen=True)
class SelectionConfig:
    citation_pct: float = 0.95
    b_pct: float = 0.99
    doc_types: frozenset = field(default_factory=lambda: frozenset({DocType.ARTICLE, DocType.CONFERENCE_PAPER}))
    horizon: int | None = None
    per_field: bool = False


def select_sleeping_beauties(index: CorpusIndex, config: SelectionConfig | None = None, **overrides) -> list[SleepingBeautyRecord]:
    """Select the Sleeping Beauty population, sorted by id.

    Filters run in a fixed order: document type, corrected citation
    percentile ``>= citation_pct``, then Beauty Coefficient ``>=`` the
    ``b_pct`` quantile of the surviving papers' B values (globally, or within
    each field when ``per_field`` is set).
    """
    if config is None:
        config = SelectionConfig(**overrides)
    elif overrides:
        config = SelectionConfig(**{**config.__dict__, **overrides})
    if index.n_papers == 0:
        raise EmptyCorpusError("index contains no papers")
    horizon = index.y_max if config.horizon is None else config.horizon

    allowed = np.array([int(d) for d in config.doc_types], dtype=np.int8)
    pct = _percentile_array(index, horizon)
    mask = np.isin(index.doc_types, allowed) & (index.years <= horizon) & (pct >= config.citation_pct)
    survivors = np.flatnonzero(mask)
    if survivors.size == 0:
        return []

    results = []
    for node in survivors.tolist():
        pid = index.ids[node]
        results.append(beauty(yearly_citation_series(index, pid, horizon)))
    bs = np.array([r.b for r in results])

    if config.per_field:
        fields = index.field_codes[survivors]
        cutoff = np.empty_like(bs)
        for f in np.unique(fields):
            sel = fields == f
            cutoff[sel] = np.quantile(bs[sel], config.b_pct)
    else:
        cutoff = np.full_like(bs, np.quantile(bs, config.b_pct))

    out = [
        SleepingBeautyRecord(index.ids[node], res, float(pct[node]))
        for node, res, b, cut in zip(survivors.tolist(), results, bs, cutoff)
        if b >= cut
    ]
    out.sort(key=lambda r: r.id)
    return out
