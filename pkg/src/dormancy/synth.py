"""Seeded synthetic citation corpora and brute-force reference implementations.

The baseline corpus grows by cumulative advantage damped by recency: a paper
published in year ``Y`` draws its references from earlier papers with weight
``(indegree + k0) * 2 ** (-(Y - year) / half_life)``, without replacement.
Indegrees are refreshed once per publication year. Sleeping Beauty / Prince /
Storyteller structures can then be planted on top with known ground truth.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .corpus import (
    CITATIONS_HEADER,
    PAPERS_HEADER,
    DocType,
    EdgeList,
    PaperRecord,
    YearWindow,
    build_index,
)
from .dynamics import awakening_time, beauty_coefficient
from .errors import InfeasibleConfigError, InfeasibleSpecError
from .triad import AbsenceReason

RNG_NAME = "numpy.PCG64"
RNG_VERSION = 1
DOC_TYPE_PROBS = (0.80, 0.10, 0.07, 0.03)


@dataclass(frozen=True)
class SynthConfig:
    n_papers: int = 10_000
    y_min: int = 1970
    y_max: int = 2020
    refs_per_paper: int = 10
    attachment_offset: float = 1.0
    recency_half_life: float = 5.0
    fields: int = 5
    seed: int = 0
    same_year: bool = False

    def validate(self) -> None:
        if self.n_papers <= 0:
            raise InfeasibleConfigError("n_papers must be positive")
        if self.refs_per_paper < 1:
            raise InfeasibleConfigError("refs_per_paper must be >= 1")
        if self.y_min > self.y_max:
            raise InfeasibleConfigError("empty year range")
        if not self.attachment_offset > 0 or not self.recency_half_life > 0:
            raise InfeasibleConfigError("attachment_offset and recency_half_life must be positive")
        if self.fields < 1:
            raise InfeasibleConfigError("fields must be >= 1")

    @property
    def years(self) -> YearWindow:
        return YearWindow(self.y_min, self.y_max)


@dataclass(frozen=True)
class TriadSpec:
    """Shape of a planted triad.

    ``window`` is the pre-burst window ``[y_pr, awakening_year]``; by default it
    ends ``burst_years`` before the corpus end and starts half-way through the
    sleep. The SB is published ``sleep_years - 1`` years before the awakening year
    and bursts for ``burst_years`` afterwards.
    """

    sleep_years: int = 20
    burst_size: int = 50
    n_st: int = 6
    window: YearWindow | None = None
    burst_years: int = 5
    n_sb_only: int = 0
    n_pr_only: int = 0
    pr_cites_sb: bool = True
    pr_cocite_prob: float = 0.5
    st_cite_prob: float = 0.3
    member_cite_prob: float = 0.3
    extra_refs: int = 2


@dataclass(frozen=True)
class PlantedTriad:
    sb_id: str
    pr_id: str
    st_ids: tuple
    sleep_years: int
    burst_size: int
    sb_year: int = 0
    y_pr: int = 0
    awakening_year: int = 0
    sb_only_ids: tuple = ()
    pr_only_ids: tuple = ()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["st_ids"] = list(self.st_ids)
        d["sb_only_ids"] = list(self.sb_only_ids)
        d["pr_only_ids"] = list(self.pr_only_ids)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PlantedTriad":
        d = dict(d)
        for k in ("st_ids", "sb_only_ids", "pr_only_ids"):
            d[k] = tuple(d.get(k, ()))
        return cls(**d)


@dataclass
class SynthCorpus:
    config: SynthConfig
    papers: list
    citing: np.ndarray
    cited: np.ndarray
    planted: list = field(default_factory=list)
    n_base: int = 0

    @property
    def edges(self) -> EdgeList:
        years = np.array([p.year for p in self.papers], dtype=np.int64)
        ids = [p.id for p in self.papers]
        return EdgeList(ids, self.citing, self.cited, years[self.citing] if self.citing.size else [])

    def __iter__(self):
        yield self.papers
        yield self.edges

    def edge_pairs(self) -> list[tuple[str, str]]:
        return list(self.edges.pairs())

    def year_map(self) -> dict[str, int]:
        return {p.id: p.year for p in self.papers}

    def to_index(self):
        return build_index(self.papers, self.edges, self.config.y_min, self.config.y_max)

    def _append(self, papers, citing, cited) -> None:
        self.papers.extend(papers)
        self.citing = np.concatenate([self.citing, np.asarray(citing, dtype=np.int64)])
        self.cited = np.concatenate([self.cited, np.asarray(cited, dtype=np.int64)])

    def header_line(self) -> str:
        cfg = json.dumps(asdict(self.config), sort_keys=True, separators=(",", ":"))
        return f"# dormancy-synth rng={RNG_NAME} rng_version={RNG_VERSION} seed={self.config.seed} config={cfg}"

    def papers_tsv(self) -> str:
        lines = [self.header_line(), "\t".join(PAPERS_HEADER)]
        lines += [f"{p.id}\t{p.year}\t{p.doc_type.label}\t{p.field_code}" for p in self.papers]
        return "\n".join(lines) + "\n"

    def citations_tsv(self) -> str:
        ids = [p.id for p in self.papers]
        lines = [self.header_line(), "\t".join(CITATIONS_HEADER)]
        lines += [f"{ids[a]}\t{ids[b]}" for a, b in zip(self.citing.tolist(), self.cited.tolist())]
        return "\n".join(lines) + "\n"

    def ground_truth(self) -> dict:
        return {
            "rng": RNG_NAME,
            "rng_version": RNG_VERSION,
            "config": asdict(self.config),
            "planted": [t.to_dict() for t in self.planted],
        }

    def write(self, out_dir) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "papers": out / "papers.tsv",
            "citations": out / "citations.tsv",
            "ground_truth": out / "ground_truth.json",
        }
        paths["papers"].write_text(self.papers_tsv(), encoding="utf-8")
        paths["citations"].write_text(self.citations_tsv(), encoding="utf-8")
        paths["ground_truth"].write_text(json.dumps(self.ground_truth(), indent=2, sort_keys=True) + "\n")
        return paths


def _draw_distinct(rng, cdf: np.ndarray, n_rows: int, m: int, exclude=None) -> list[list[int]]:
    """Per row, the first ``m`` distinct indices of i.i.d. draws from ``cdf``.

    Keeping first occurrences of repeated weighted draws is sequential
    sampling without replacement.
    """
    total = cdf[-1]
    c = cdf.size
    over = 2 * m + 4
    idx = np.minimum(np.searchsorted(cdf, rng.random((n_rows, over)) * total, "right"), c - 1)
    rows = []
    for r, row in enumerate(idx.tolist()):
        ex = None if exclude is None else exclude[r]
        picked = [j for j in dict.fromkeys(row) if j != ex][:m]
        tries = 0
        while len(picked) < m:
            tries += 1
            if tries > 50:
                w = np.diff(np.concatenate([[0.0], cdf]))
                if ex is not None:
                    w[ex] = 0.0
                w[picked] = 0.0
                extra = rng.choice(c, m - len(picked), replace=False, p=w / w.sum())
                picked += extra.tolist()
                break
            more = np.minimum(np.searchsorted(cdf, rng.random(over) * total, "right"), c - 1)
            seen = set(picked)
            for j in more.tolist():
                if j not in seen and j != ex:
                    seen.add(j)
                    picked.append(j)
                    if len(picked) == m:
                        break
        rows.append(picked)
    return rows


def generate_ca_corpus(config: SynthConfig) -> SynthCorpus:
    """Generate a cumulative-advantage corpus; fully determined by ``config``."""
    config.validate()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    n, m = config.n_papers, config.refs_per_paper
    years = np.sort(rng.integers(config.y_min, config.y_max + 1, size=n))
    fields = rng.integers(0, config.fields, size=n)
    docs = rng.choice(len(DOC_TYPE_PROBS), size=n, p=DOC_TYPE_PROBS)
    width = max(7, len(str(n - 1)))
    papers = [
        PaperRecord(f"P{i:0{width}d}", int(y), DocType(int(d)), int(f))
        for i, (y, d, f) in enumerate(zip(years.tolist(), docs.tolist(), fields.tolist()))
    ]

    indeg = np.zeros(n, dtype=np.float64)
    citing_parts, cited_parts = [], []
    for year in range(config.y_min, config.y_max + 1):
        s = int(np.searchsorted(years, year, "left"))
        e = int(np.searchsorted(years, year, "right"))
        if s == e:
            continue
        n_cand = e if config.same_year else s
        block = np.arange(s, e)
        if n_cand == 0:
            continue
        age = year - years[:n_cand]
        w = (indeg[:n_cand] + config.attachment_offset) * np.exp2(-age / config.recency_half_life)
        cdf = np.cumsum(w)
        exclude = block.tolist() if config.same_year else None
        avail = n_cand - (1 if config.same_year else 0)
        if avail <= m:
            rows = [[j for j in range(n_cand) if exclude is None or j != exclude[r]] for r in range(block.size)]
        else:
            rows = _draw_distinct(rng, cdf, block.size, m, exclude)
        lens = [len(r) for r in rows]
        src = np.repeat(block, lens)
        dst = np.fromiter((j for r in rows for j in r), dtype=np.int64, count=sum(lens))
        citing_parts.append(src)
        cited_parts.append(dst)
        indeg += np.bincount(dst, minlength=n)

    citing = np.concatenate(citing_parts) if citing_parts else np.zeros(0, dtype=np.int64)
    cited = np.concatenate(cited_parts) if cited_parts else np.zeros(0, dtype=np.int64)
    return SynthCorpus(config, papers, citing.astype(np.int64), cited.astype(np.int64), [], n)


def baseline_rate(corpus: SynthCorpus) -> float:
    """Mean citations received per paper per year alive, over the base corpus."""
    cfg = corpus.config
    base = corpus.papers[: corpus.n_base]
    exposure = sum(cfg.y_max - p.year + 1 for p in base)
    in_base = np.count_nonzero(corpus.cited < corpus.n_base)
    return in_base / exposure if exposure else 0.0


def _spread_years(start: int, end: int, k: int) -> list[int]:
    span = end - start + 1
    return [start + (i * span) // k for i in range(k)]


def plant_triad(corpus: SynthCorpus, spec: TriadSpec = TriadSpec(), rng=None) -> PlantedTriad:
    """Insert an SB, its Prince, Storytellers and burst citers into ``corpus``.

    The SB is uncited until the Prince's year, collects the Storyteller (and
    optional SB-only) citations in ``[y_pr, awakening_year]``, then receives
    ``burst_size`` citations per year. Raises :class:`InfeasibleSpecError` if the
    timeline does not fit the corpus or if the planned SB series would not put
    the awakening in the intended year.
    """
    cfg = corpus.config
    k = len(corpus.planted)
    if rng is None:
        rng = np.random.default_rng([cfg.seed, 1 + k])
    if spec.sleep_years < 2 or spec.burst_years < 1 or spec.burst_size < 0 or spec.n_st < 0:
        raise InfeasibleSpecError(f"invalid triad spec {spec}")

    if spec.window is None:
        aw = cfg.y_max - spec.burst_years
        sb_year = aw - spec.sleep_years + 1
        y_pr = sb_year + spec.sleep_years // 2
    else:
        y_pr, aw = spec.window.start, spec.window.end
        sb_year = aw - spec.sleep_years + 1
    if sb_year < cfg.y_min or aw + spec.burst_years > cfg.y_max:
        raise InfeasibleSpecError("triad timeline does not fit the corpus years")
    if not sb_year < y_pr < aw:
        raise InfeasibleSpecError("Prince year must fall strictly inside the sleep")

    base_years = np.array([p.year for p in corpus.papers[: corpus.n_base]], dtype=np.int64)

    def extra(year: int) -> list[int]:
        avail = int(np.searchsorted(base_years, year, "left"))
        if avail == 0 or spec.extra_refs == 0:
            return []
        return sorted(rng.choice(avail, size=min(spec.extra_refs, avail), replace=False).tolist())

    field_code = int(rng.integers(0, cfg.fields))
    start = len(corpus.papers)
    tag = f"T{k:02d}"
    new_papers, citing, cited = [], [], []

    def add(pid: str, year: int, refs: list[int]) -> int:
        node = start + len(new_papers)
        new_papers.append(PaperRecord(pid, year, DocType.ARTICLE, field_code))
        for r in refs:
            citing.append(node)
            cited.append(r)
        return node

    sb = add(f"{tag}-SB", sb_year, extra(sb_year))
    pr = add(f"{tag}-PR", y_pr, ([sb] if spec.pr_cites_sb else []) + extra(y_pr))
    st_nodes = [
        add(f"{tag}-ST{i:03d}", y, [sb, pr] + extra(y))
        for i, y in enumerate(_spread_years(y_pr, aw, spec.n_st) if spec.n_st else [])
    ]
    so_nodes = [
        add(f"{tag}-SO{i:03d}", y, [sb] + extra(y))
        for i, y in enumerate(_spread_years(y_pr, aw, spec.n_sb_only) if spec.n_sb_only else [])
    ]
    po_nodes = [
        add(f"{tag}-PO{i:03d}", y, [pr] + extra(y))
        for i, y in enumerate(_spread_years(y_pr, aw, spec.n_pr_only) if spec.n_pr_only else [])
    ]
    others = so_nodes + po_nodes
    b = 0
    for year in range(aw + 1, aw + 1 + spec.burst_years):
        for _ in range(spec.burst_size):
            refs = [sb]
            if rng.random() < spec.pr_cocite_prob:
                refs.append(pr)
            if st_nodes and rng.random() < spec.st_cite_prob:
                refs.append(st_nodes[int(rng.integers(len(st_nodes)))])
            if others and rng.random() < spec.member_cite_prob:
                refs.append(others[int(rng.integers(len(others)))])
            add(f"{tag}-B{b:04d}", year, refs + extra(year))
            b += 1

    # planned SB series, checked against the detector's awakening rule
    ages = [new_papers[a - start].year - sb_year for a, b in zip(citing, cited) if b == sb]
    counts = np.bincount(np.array(ages, dtype=np.int64), minlength=cfg.y_max - sb_year + 1)
    if spec.burst_size > 0:
        _, t_m = beauty_coefficient(counts)
        if t_m != spec.sleep_years or awakening_time(counts) != aw - sb_year:
            raise InfeasibleSpecError(
                "planted citations move the awakening year; lower n_st / n_sb_only or raise burst_size"
            )

    corpus._append(new_papers, citing, cited)
    ids = [p.id for p in new_papers]
    triad = PlantedTriad(
        sb_id=ids[0],
        pr_id=ids[1],
        st_ids=tuple(ids[n - start] for n in st_nodes),
        sleep_years=spec.sleep_years,
        burst_size=spec.burst_size,
        sb_year=sb_year,
        y_pr=y_pr,
        awakening_year=aw,
        sb_only_ids=tuple(ids[n - start] for n in so_nodes),
        pr_only_ids=tuple(ids[n - start] for n in po_nodes),
    )
    corpus.planted.append(triad)
    return triad


# -- brute-force reference implementations -------------------------------------


@dataclass(frozen=True)
class OraclePrince:
    pr_id: str | None
    co_citation_count: int
    absence_reason: AbsenceReason


def _reference_sets(edges) -> dict[str, set]:
    refs = defaultdict(set)
    for a, b in edges:
        if a != b:
            refs[a].add(b)
    return refs


def oracle_prince(edges, years: dict, sb: str, awakening_year: int, cutoff: int, strict: bool = True) -> OraclePrince:
    """Exhaustive Prince search: score every paper in the corpus against every SB citer."""
    refs = _reference_sets(edges)
    citers = [c for c, rs in refs.items() if sb in rs]
    if not any(years[c] < awakening_year for c in citers):
        return OraclePrince(None, 0, AbsenceReason.NO_CITATIONS_BEFORE_BURST)
    counted = [c for c in citers if years[c] <= cutoff]
    best = None
    for p, y in years.items():
        if p == sb or (y >= awakening_year if strict else y > awakening_year):
            continue
        n = sum(1 for c in counted if p in refs[c])
        if n == 0:
            continue
        key = (-n, y, p)
        if best is None or key < best:
            best = key
    if best is None:
        return OraclePrince(None, 0, AbsenceReason.NO_CO_CITED_PAPERS)
    return OraclePrince(best[2], -best[0], AbsenceReason.NONE)


def oracle_storytellers(edges, years: dict, sb: str, pr: str, window: YearWindow) -> list[str]:
    """Every paper citing both ``sb`` and ``pr`` inside ``window``, in (year, id) order."""
    refs = _reference_sets(edges)
    hits = [c for c, rs in refs.items() if sb in rs and pr in rs and years[c] in window]
    return sorted(hits, key=lambda c: (years[c], c))
