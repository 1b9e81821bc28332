"""Prince detection, Storyteller extraction and citer-group partitioning."""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corpus import CorpusIndex, YearWindow
from .dynamics import SleepingBeautyRecord
from .errors import NoPrinceError, SamePaperError


class AbsenceReason(str, enum.Enum):
    NONE = "none"
    NO_CITATIONS_BEFORE_BURST = "no_citations_before_burst"
    NO_CO_CITED_PAPERS = "no_co_cited_papers"


@dataclass(frozen=True)
class TriadOptions:
    """Knobs for the ambiguous boundaries of the Prince/Storyteller definitions.

    prince_cutoff_year: last citer year counted for co-citation (None: corpus y_max).
    prince_strict: Prince must be published strictly before the awakening year.
    st_inclusive: Storytellers published in the awakening year itself count.
    """

    prince_cutoff_year: int | None = None
    prince_strict: bool = True
    st_inclusive: bool = True


@dataclass(frozen=True)
class PrinceRecord:
    sb_id: str
    pr_id: str | None
    co_citation_count: int
    y_pr: int | None
    absence_reason: AbsenceReason = AbsenceReason.NONE

    @property
    def present(self) -> bool:
        return self.pr_id is not None


@dataclass(frozen=True)
class TriadRecord:
    sb_id: str
    awakening_year: int
    prince: PrinceRecord
    storytellers: tuple = ()
    c_sb_window: int = 0
    c_pr_window: int = 0
    window: YearWindow | None = None

    @property
    def pr_id(self) -> str | None:
        return self.prince.pr_id

    @property
    def n_st(self) -> int:
        return len(self.storytellers)

    def to_dict(self) -> dict:
        return {
            "sb_id": self.sb_id,
            "pr_id": self.prince.pr_id,
            "absence_reason": self.prince.absence_reason.value,
            "y_pr": self.prince.y_pr,
            "co_citation_count": self.prince.co_citation_count,
            "awakening_year": self.awakening_year,
            "window": None if self.window is None else [self.window.start, self.window.end],
            "storytellers": list(self.storytellers),
            "c_sb_window": self.c_sb_window,
            "c_pr_window": self.c_pr_window,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TriadRecord":
        prince = PrinceRecord(
            d["sb_id"], d["pr_id"], int(d["co_citation_count"]), d["y_pr"], AbsenceReason(d["absence_reason"])
        )
        window = None if d.get("window") is None else YearWindow(*d["window"])
        return cls(
            d["sb_id"],
            int(d["awakening_year"]),
            prince,
            tuple(d["storytellers"]),
            int(d["c_sb_window"]),
            int(d["c_pr_window"]),
            window,
        )


@dataclass(frozen=True)
class GroupPartition:
    sb_only: frozenset
    pr_only: frozenset
    both: frozenset


def _sb_args(sb, awakening_year):
    if isinstance(sb, SleepingBeautyRecord):
        return sb.id, sb.awakening_year if awakening_year is None else awakening_year
    if awakening_year is None:
        raise TypeError("awakening_year is required when sb is given as an id")
    return sb, awakening_year


def co_citation_count(index: CorpusIndex, a: str, b: str, cutoff_year: int | None = None) -> int:
    """Number of papers published up to ``cutoff_year`` that cite both ``a`` and ``b``."""
    if a == b:
        raise SamePaperError(f"co-citation of {a!r} with itself")
    na, nb = index.node(a), index.node(b)
    cutoff = index.y_max if cutoff_year is None else cutoff_year
    return int(
        np.intersect1d(
            index.in_nodes_window(na, None, cutoff), index.in_nodes_window(nb, None, cutoff), assume_unique=True
        ).size
    )


def _gather_refs(index: CorpusIndex, citers: np.ndarray) -> np.ndarray:
    if citers.size == 0:
        return np.zeros(0, dtype=np.int64)
    lo = index.out_ptr[citers]
    hi = index.out_ptr[citers + 1]
    return np.concatenate([index.out_idx[a:b] for a, b in zip(lo.tolist(), hi.tolist())])


def find_prince(
    index: CorpusIndex, sb, options: TriadOptions = TriadOptions(), awakening_year: int | None = None
) -> PrinceRecord:
    """Paper most co-cited with ``sb`` among those published before its awakening.

    Candidates are reached through the references of the SB's citers, so only
    papers with at least one co-citation are ever scored. Ties go to the
    earlier publication year, then the smaller id.
    """
    sb_id, aw = _sb_args(sb, awakening_year)
    node = index.node(sb_id)
    cutoff = index.y_max if options.prince_cutoff_year is None else options.prince_cutoff_year

    if index.in_nodes_window(node, None, aw - 1).size == 0:
        return PrinceRecord(sb_id, None, 0, None, AbsenceReason.NO_CITATIONS_BEFORE_BURST)

    refs = _gather_refs(index, index.in_nodes_window(node, None, cutoff))
    refs = refs[refs != node]
    last_year = aw - 1 if options.prince_strict else aw
    refs = refs[index.years[refs] <= last_year]
    if refs.size == 0:
        return PrinceRecord(sb_id, None, 0, None, AbsenceReason.NO_CO_CITED_PAPERS)

    cand, counts = np.unique(refs, return_counts=True)
    best = int(counts.max())
    winner = int(cand[np.argmax(counts == best)])
    return PrinceRecord(sb_id, index.ids[winner], best, int(index.years[winner]))


def storyteller_window(prince: PrinceRecord, awakening_year: int, options: TriadOptions = TriadOptions()):
    """Return ``(start, end)`` of the pre-burst window; ``end < start`` means empty."""
    if not prince.present:
        raise NoPrinceError(f"SB {prince.sb_id!r} has no prince ({prince.absence_reason.value})")
    end = awakening_year if options.st_inclusive else awakening_year - 1
    return prince.y_pr, end


def find_storytellers(
    index: CorpusIndex,
    sb,
    prince: PrinceRecord,
    options: TriadOptions = TriadOptions(),
    awakening_year: int | None = None,
) -> list[str]:
    """Papers citing both SB and Prince inside ``[y_pr, awakening_year]``, in (year, id) order."""
    sb_id, aw = _sb_args(sb, awakening_year)
    start, end = storyteller_window(prince, aw, options)
    if end < start:
        return []
    both = np.intersect1d(
        index.in_nodes_window(index.node(sb_id), start, end),
        index.in_nodes_window(index.node(prince.pr_id), start, end),
        assume_unique=True,
    )
    return index.to_ids(both)


def extract_triad(index: CorpusIndex, sb, options: TriadOptions = TriadOptions(), awakening_year=None) -> TriadRecord:
    sb_id, aw = _sb_args(sb, awakening_year)
    prince = find_prince(index, sb_id, options, awakening_year=aw)
    if not prince.present:
        return TriadRecord(sb_id, aw, prince)
    start, end = storyteller_window(prince, aw, options)
    if end < start:
        return TriadRecord(sb_id, aw, prince)
    sts = find_storytellers(index, sb_id, prince, options, awakening_year=aw)
    c_sb = index.in_nodes_window(index.node(sb_id), start, end).size
    c_pr = index.in_nodes_window(index.node(prince.pr_id), start, end).size
    return TriadRecord(sb_id, aw, prince, tuple(sts), int(c_sb), int(c_pr), YearWindow(start, end))


_WORKER_INDEX = None


def _init_worker(index):
    global _WORKER_INDEX
    _WORKER_INDEX = index


def _extract_one(args):
    sb_id, aw, options = args
    return extract_triad(_WORKER_INDEX, sb_id, options, awakening_year=aw)


def extract_triads(
    index: CorpusIndex, sbs, options: TriadOptions = TriadOptions(), workers: int = 1
) -> list[TriadRecord]:
    """Run :func:`extract_triad` for every SB; output order follows ``sbs``."""
    jobs = [(sb.id, sb.awakening_year, options) for sb in sbs]
    if workers <= 1 or len(jobs) < 2:
        return [extract_triad(index, sb_id, opt, awakening_year=aw) for sb_id, aw, opt in jobs]
    with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(index,)) as pool:
        return list(pool.map(_extract_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def window_citer_nodes(index: CorpusIndex, triad: TriadRecord):
    """Node arrays of SB citers and PR citers inside the triad window."""
    if not triad.prince.present:
        raise NoPrinceError(f"SB {triad.sb_id!r} has no prince")
    if triad.window is None:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    w = triad.window
    sb = index.in_nodes_window(index.node(triad.sb_id), w.start, w.end)
    pr = index.in_nodes_window(index.node(triad.pr_id), w.start, w.end)
    return sb, pr


def partition_node_groups(index: CorpusIndex, triad: TriadRecord) -> dict[str, np.ndarray]:
    sb, pr = window_citer_nodes(index, triad)
    return {
        "sb_only": np.setdiff1d(sb, pr, assume_unique=True),
        "pr_only": np.setdiff1d(pr, sb, assume_unique=True),
        "both": np.intersect1d(sb, pr, assume_unique=True),
    }


def partition_groups(index: CorpusIndex, triad: TriadRecord) -> GroupPartition:
    """Split the window citers of SB and/or PR into SB-only, PR-only and both."""
    groups = partition_node_groups(index, triad)
    return GroupPartition(**{k: frozenset(index.to_ids(v)) for k, v in groups.items()})
