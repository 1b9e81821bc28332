"""Paper/citation ingestion and the immutable citation-graph index.

Nodes are stored in (year, id) order, so every adjacency list sorted by node
number is also sorted by (publication year, id). Year-window queries on the
citers of a paper are therefore a pair of binary searches.
"""

from __future__ import annotations

import enum
import hashlib
import io
import struct
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Union

import numpy as np

from .errors import (
    CorruptFileError,
    DuplicateIdError,
    MalformedHeaderError,
    UnknownPaperError,
    VersionMismatchError,
)

DEFAULT_Y_MIN = 1970
DEFAULT_Y_MAX = 2020

PAPERS_HEADER = ("id", "year", "doc_type", "field_code")
CITATIONS_HEADER = ("citing", "cited")

MAGIC = b"DORM"
FORMAT_VERSION = 1

Source = Union[bytes, str, Path, BinaryIO]


class DocType(enum.IntEnum):
    ARTICLE = 0
    CONFERENCE_PAPER = 1
    REVIEW = 2
    OTHER = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "DocType":
        """Map a TSV doc_type string to a DocType; unknown strings become OTHER."""
        key = text.strip().lower().replace(" ", "_").replace("-", "_")
        if not key:
            raise ValueError("empty doc_type")
        try:
            return cls[key.upper()]
        except KeyError:
            return cls.OTHER


@dataclass(frozen=True)
class PaperRecord:
    id: str
    year: int
    doc_type: DocType
    field_code: int


@dataclass(frozen=True)
class CitationEdge:
    citing: str
    cited: str
    year: int


@dataclass(frozen=True)
class YearWindow:
    start: int
    end: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"empty year window [{self.start}, {self.end}]")

    def __contains__(self, year) -> bool:
        return self.start <= year <= self.end


@dataclass
class IngestReport:
    records: int = 0
    skipped_malformed: int = 0
    out_of_range: int = 0
    dangling: int = 0
    duplicates: int = 0
    self_citations: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class CitationSeries:
    """Citations per year of age; ``counts[t]`` covers calendar year ``pub_year + t``."""

    pub_year: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 1:
            raise ValueError("counts must be one-dimensional")
        if counts.size and counts.min() < 0:
            raise ValueError("citation counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    def __len__(self) -> int:
        return int(self.counts.size)


class EdgeList(Sequence):
    """Columnar edge list: positions into ``ids`` plus the citing-paper year.

    Behaves as a read-only sequence of :class:`CitationEdge`.
    """

    def __init__(self, ids: Sequence[str], citing, cited, year):
        self.ids = ids
        self.citing = np.asarray(citing, dtype=np.int64)
        self.cited = np.asarray(cited, dtype=np.int64)
        self.year = np.asarray(year, dtype=np.int64)

    def __len__(self) -> int:
        return int(self.citing.size)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return CitationEdge(
            self.ids[self.citing[i]], self.ids[self.cited[i]], int(self.year[i])
        )

    def pairs(self) -> Iterator[tuple[str, str]]:
        ids = self.ids
        for a, b in zip(self.citing.tolist(), self.cited.tolist()):
            yield ids[a], ids[b]


def _open_text_lines(source: Source) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        data = Path(source).read_bytes()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    text = data.decode("utf-8")
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        yield line


def _check_header(lines: Iterator[str], expected: tuple[str, ...]) -> None:
    try:
        header = next(lines)
    except StopIteration:
        raise MalformedHeaderError(f"missing header, expected {expected}") from None
    got = tuple(c.strip().lower() for c in header.split("\t"))
    if got != expected:
        raise MalformedHeaderError(f"expected header {expected}, got {got}")


def ingest_papers(
    source: Source, y_min: int = DEFAULT_Y_MIN, y_max: int = DEFAULT_Y_MAX
) -> tuple[list[PaperRecord], IngestReport]:
    """Parse a ``papers.tsv`` stream.

    Rows with an unparseable year, doc_type or field_code are skipped and
    counted; rows outside ``[y_min, y_max]`` are dropped and counted separately.
    A repeated id raises :class:`DuplicateIdError`.
    """
    lines = _open_text_lines(source)
    _check_header(lines, PAPERS_HEADER)
    report = IngestReport()
    records = []
    seen = set()
    for line in lines:
        parts = line.split("\t")
        if len(parts) != 4 or not parts[0].strip():
            report.skipped_malformed += 1
            continue
        pid = parts[0].strip()
        try:
            year = int(parts[1])
            doc_type = DocType.parse(parts[2])
            field_code = int(parts[3])
        except ValueError:
            report.skipped_malformed += 1
            continue
        if pid in seen:
            raise DuplicateIdError(pid)
        seen.add(pid)
        if not y_min <= year <= y_max:
            report.out_of_range += 1
            continue
        records.append(PaperRecord(pid, year, doc_type, field_code))
    report.records = len(records)
    return records, report


def ingest_citations(
    source: Source, papers: Union[Sequence[PaperRecord], Mapping[str, PaperRecord]]
) -> tuple[EdgeList, IngestReport]:
    """Parse a ``citations.tsv`` stream against already-ingested papers.

    Edges with an unknown endpoint are dangling; self-citations and repeated
    edges are dropped. All three are counted in the report. Each kept edge is
    stamped with the citing paper's year.
    """
    if isinstance(papers, Mapping):
        papers = list(papers.values())
    ids = [p.id for p in papers]
    years = np.array([p.year for p in papers], dtype=np.int64)
    pos = {pid: i for i, pid in enumerate(ids)}

    lines = _open_text_lines(source)
    _check_header(lines, CITATIONS_HEADER)
    report = IngestReport()
    citing, cited = [], []
    get = pos.get
    for line in lines:
        parts = line.split("\t")
        if len(parts) != 2:
            report.skipped_malformed += 1
            continue
        a, b = parts[0].strip(), parts[1].strip()
        if a == b:
            report.self_citations += 1
            continue
        ia, ib = get(a), get(b)
        if ia is None or ib is None:
            report.dangling += 1
            continue
        citing.append(ia)
        cited.append(ib)

    citing_arr = np.array(citing, dtype=np.int64)
    cited_arr = np.array(cited, dtype=np.int64)
    if citing_arr.size:
        keys = citing_arr * len(ids) + cited_arr
        _, first = np.unique(keys, return_index=True)
        first.sort()
        report.duplicates = int(citing_arr.size - first.size)
        citing_arr, cited_arr = citing_arr[first], cited_arr[first]
    report.records = int(citing_arr.size)
    return EdgeList(ids, citing_arr, cited_arr, years[citing_arr]), report


def _ro(a: np.ndarray, dtype) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CorpusIndex:
    """Immutable bidirectional citation index.

    Node ``i`` is the i-th paper in (year, id) order. ``out_idx[out_ptr[i]:out_ptr[i+1]]``
    are the references of node i and ``in_idx[in_ptr[i]:in_ptr[i+1]]`` its citers,
    both ascending by node number.
    """

    ids: tuple
    years: np.ndarray
    doc_types: np.ndarray
    field_codes: np.ndarray
    out_ptr: np.ndarray
    out_idx: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray
    y_min: int = DEFAULT_Y_MIN
    y_max: int = DEFAULT_Y_MAX
    _pos: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name, dt in (
            ("years", "<i4"),
            ("doc_types", "i1"),
            ("field_codes", "<i4"),
            ("out_ptr", "<i8"),
            ("out_idx", "<i4"),
            ("in_ptr", "<i8"),
            ("in_idx", "<i4"),
        ):
            object.__setattr__(self, name, _ro(getattr(self, name), dt))
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "_pos", {pid: i for i, pid in enumerate(self.ids)})

    def __eq__(self, other):
        if not isinstance(other, CorpusIndex):
            return NotImplemented
        return (
            self.ids == other.ids
            and (self.y_min, self.y_max) == (other.y_min, other.y_max)
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("years", "doc_types", "field_codes", "out_ptr", "out_idx", "in_ptr", "in_idx")
            )
        )

    @property
    def n_papers(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return int(self.out_idx.size)

    def __contains__(self, paper_id) -> bool:
        return paper_id in self._pos

    def node(self, paper_id: str) -> int:
        try:
            return self._pos[paper_id]
        except KeyError:
            raise UnknownPaperError(paper_id) from None

    def record(self, paper_id: str) -> PaperRecord:
        i = self.node(paper_id)
        return PaperRecord(
            paper_id, int(self.years[i]), DocType(int(self.doc_types[i])), int(self.field_codes[i])
        )

    @property
    def papers(self) -> dict:
        return {pid: self.record(pid) for pid in self.ids}

    def year_of(self, paper_id: str) -> int:
        return int(self.years[self.node(paper_id)])

    def out_nodes(self, node: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[node] : self.out_ptr[node + 1]]

    def in_nodes(self, node: int) -> np.ndarray:
        return self.in_idx[self.in_ptr[node] : self.in_ptr[node + 1]]

    def in_nodes_window(self, node: int, start=None, end=None) -> np.ndarray:
        """Citers of ``node`` with ``start <= year <= end`` (either bound optional)."""
        lo, hi = self.in_ptr[node], self.in_ptr[node + 1]
        cit_years = self.years[self.in_idx[lo:hi]]
        a = 0 if start is None else int(np.searchsorted(cit_years, start, "left"))
        b = cit_years.size if end is None else int(np.searchsorted(cit_years, end, "right"))
        return self.in_idx[lo + a : lo + max(a, b)]

    def references(self, paper_id: str) -> list[str]:
        return [self.ids[j] for j in self.out_nodes(self.node(paper_id)).tolist()]

    def citers(self, paper_id: str) -> list[str]:
        return [self.ids[j] for j in self.in_nodes(self.node(paper_id)).tolist()]

    def to_ids(self, nodes) -> list[str]:
        ids = self.ids
        return [ids[j] for j in np.asarray(nodes).tolist()]

    def edges(self) -> Iterator[CitationEdge]:
        for i in range(self.n_papers):
            for j in self.out_nodes(i).tolist():
                yield CitationEdge(self.ids[i], self.ids[j], int(self.years[i]))

    def citation_totals(self, horizon_year: int) -> np.ndarray:
        """Per-node count of citers published no later than ``horizon_year``."""
        cited = np.repeat(np.arange(self.n_papers), np.diff(self.in_ptr))
        keep = self.years[self.in_idx] <= horizon_year
        return np.bincount(cited[keep], minlength=self.n_papers)


def build_index(
    papers: Sequence[PaperRecord],
    edges: Union[EdgeList, Iterable[CitationEdge]],
    y_min: int = DEFAULT_Y_MIN,
    y_max: int = DEFAULT_Y_MAX,
) -> CorpusIndex:
    papers = list(papers)
    n = len(papers)
    ids = [p.id for p in papers]
    years = np.array([p.year for p in papers], dtype=np.int64)
    if isinstance(edges, EdgeList) and (edges.ids is ids or list(edges.ids) == ids):
        src, dst = edges.citing, edges.cited
    else:
        pos = {pid: i for i, pid in enumerate(ids)}
        pairs = [(e.citing, e.cited) for e in edges] if not isinstance(edges, EdgeList) else list(edges.pairs())
        try:
            src = np.array([pos[a] for a, _ in pairs], dtype=np.int64)
            dst = np.array([pos[b] for _, b in pairs], dtype=np.int64)
        except KeyError as exc:
            raise UnknownPaperError(exc.args[0]) from None

    order = sorted(range(n), key=lambda i: (years[i], ids[i]))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    src, dst = rank[src], rank[dst]
    keep = src != dst
    src, dst = src[keep], dst[keep]

    out_keys = np.unique(src * n + dst)
    out_src, out_dst = out_keys // max(n, 1), out_keys % max(n, 1)
    in_keys = np.sort(out_dst * n + out_src)
    in_dst, in_src = in_keys // max(n, 1), in_keys % max(n, 1)

    out_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(out_src, minlength=n), out=out_ptr[1:])
    in_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(in_dst, minlength=n), out=in_ptr[1:])

    return CorpusIndex(
        ids=tuple(ids[i] for i in order),
        years=years[order],
        doc_types=np.array([int(papers[i].doc_type) for i in order], dtype=np.int8),
        field_codes=np.array([papers[i].field_code for i in order], dtype=np.int64),
        out_ptr=out_ptr,
        out_idx=out_dst,
        in_ptr=in_ptr,
        in_idx=in_src,
        y_min=y_min,
        y_max=y_max,
    )


def citers_of(index: CorpusIndex, paper_id: str, window: YearWindow) -> list[str]:
    """Citers of ``paper_id`` published inside ``window``, in (year, id) order."""
    node = index.node(paper_id)
    return index.to_ids(index.in_nodes_window(node, window.start, window.end))


def yearly_citation_series(index: CorpusIndex, paper_id: str, horizon_year: int) -> CitationSeries:
    """Yearly citation counts from the publication year up to ``horizon_year``.

    Citers dated before the publication year are counted at age 0.
    """
    node = index.node(paper_id)
    pub = int(index.years[node])
    if horizon_year < pub:
        raise ValueError(f"horizon {horizon_year} precedes publication year {pub}")
    cit_years = index.years[index.in_nodes_window(node, None, horizon_year)]
    ages = np.clip(cit_years.astype(np.int64) - pub, 0, None)
    return CitationSeries(pub, np.bincount(ages, minlength=horizon_year - pub + 1))


# -- persistence -------------------------------------------------------------

_HEADER = struct.Struct("<QQQii")
_ARRAYS = (
    ("years", "<i4", "n"),
    ("doc_types", "i1", "n"),
    ("field_codes", "<i4", "n"),
    ("out_ptr", "<i8", "n+1"),
    ("out_idx", "<i4", "e"),
    ("in_ptr", "<i8", "n+1"),
    ("in_idx", "<i4", "e"),
)


def dumps_index(index: CorpusIndex) -> bytes:
    ids_blob = "\n".join(index.ids).encode("utf-8")
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(bytes([FORMAT_VERSION]))
    buf.write(_HEADER.pack(index.n_papers, index.edge_count, len(ids_blob), index.y_min, index.y_max))
    buf.write(ids_blob)
    for name, dt, _ in _ARRAYS:
        buf.write(np.ascontiguousarray(getattr(index, name), dtype=dt).tobytes())
    body = buf.getvalue()
    return body + hashlib.sha256(body).digest()


def loads_index(data: bytes) -> CorpusIndex:
    if len(data) < len(MAGIC) + 1 or data[: len(MAGIC)] != MAGIC:
        raise CorruptFileError("not an index file (bad magic)")
    version = data[len(MAGIC)]
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"index format version {version}, expected {FORMAT_VERSION}")
    if len(data) < len(MAGIC) + 1 + _HEADER.size + 32:
        raise CorruptFileError("index file truncated")
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CorruptFileError("index checksum mismatch")
    off = len(MAGIC) + 1
    n, e, ids_len, y_min, y_max = _HEADER.unpack_from(body, off)
    off += _HEADER.size
    ids_blob = body[off : off + ids_len].decode("utf-8")
    off += ids_len
    ids = ids_blob.split("\n") if n else []
    if len(ids) != n:
        raise CorruptFileError("id table does not match paper count")
    arrays = {}
    for name, dt, size in _ARRAYS:
        count = {"n": n, "n+1": n + 1, "e": e}[size]
        nbytes = count * np.dtype(dt).itemsize
        if off + nbytes > len(body):
            raise CorruptFileError("index file truncated")
        arrays[name] = np.frombuffer(body, dtype=dt, count=count, offset=off).copy()
        off += nbytes
    if off != len(body):
        raise CorruptFileError("trailing bytes in index file")
    return CorpusIndex(ids=ids, y_min=y_min, y_max=y_max, **arrays)


def save_index(index: CorpusIndex, path) -> None:
    Path(path).write_bytes(dumps_index(index))


def load_index(path) -> CorpusIndex:
    return loads_index(Path(path).read_bytes())
