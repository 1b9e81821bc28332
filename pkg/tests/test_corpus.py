import io
from collections import defaultdict

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dormancy.corpus import (
    CitationSeries,
    DocType,
    YearWindow,
    build_index,
    citers_of,
    dumps_index,
    ingest_citations,
    ingest_papers,
    load_index,
    loads_index,
    save_index,
    yearly_citation_series,
)
from dormancy.errors import (
    CorruptFileError,
    DuplicateIdError,
    MalformedHeaderError,
    UnknownPaperError,
    VersionMismatchError,
)

from conftest import make_index

HEADER = b"id\tyear\tdoc_type\tfield_code\n"


def test_ingest_empty_body():
    records, report = ingest_papers(io.BytesIO(HEADER))
    assert records == []
    assert report.skipped_malformed == 0


def test_ingest_skips_unparseable_year():
    body = HEADER + b"P1\t1990\tarticle\t1\nP2\t1991\treview\t2\nP3\tunknown\tarticle\t1\nP4\t1992\tConference_Paper\t3\n"
    records, report = ingest_papers(io.BytesIO(body))
    assert [r.id for r in records] == ["P1", "P2", "P4"]
    assert report.skipped_malformed == 1
    assert records[2].doc_type is DocType.CONFERENCE_PAPER


def test_ingest_duplicate_id():
    body = HEADER + b"P1\t1990\tarticle\t1\nP1\t1991\tarticle\t1\n"
    with pytest.raises(DuplicateIdError):
        ingest_papers(body)


def test_ingest_bad_header():
    with pytest.raises(MalformedHeaderError):
        ingest_papers(b"id\tyear\n")
    with pytest.raises(MalformedHeaderError):
        ingest_papers(b"")


def test_doc_type_parsing():
    body = HEADER + b"A\t1990\tARTICLE\t0\nB\t1990\tletter\t0\nC\t1990\t\t0\nD\t1990\tconference paper\t0\n"
    records, report = ingest_papers(body)
    assert {r.id: r.doc_type for r in records} == {
        "A": DocType.ARTICLE,
        "B": DocType.OTHER,
        "D": DocType.CONFERENCE_PAPER,
    }
    assert report.skipped_malformed == 1


def test_out_of_range_and_comments():
    body = b"# produced by a generator\n" + HEADER + b"A\t1969\tarticle\t0\nB\t2021\tarticle\t0\nC\t2000\tarticle\t0\n"
    records, report = ingest_papers(body)
    assert [r.id for r in records] == ["C"]
    assert report.out_of_range == 2


def _papers():
    body = HEADER + b"P1\t1995\tarticle\t0\nP2\t1990\tarticle\t0\nP3\t1999\tarticle\t0\n"
    return ingest_papers(body)[0]


def test_edge_year_from_citing_paper():
    edges, report = ingest_citations(b"citing\tcited\nP1\tP2\n", _papers())
    assert list(edges) == [edges[0]]
    assert (edges[0].citing, edges[0].cited, edges[0].year) == ("P1", "P2", 1995)
    assert report.records == 1


def test_dangling_self_and_duplicate_edges():
    edges, report = ingest_citations(b"citing\tcited\nP1\tPX\nP1\tP1\nP3\tP2\nP3\tP2\n", _papers())
    assert len(edges) == 1
    assert report.dangling == 1
    assert report.self_citations == 1
    assert report.duplicates == 1


def test_citations_bad_header():
    with pytest.raises(MalformedHeaderError):
        ingest_citations(b"from\tto\nP1\tP2\n", _papers())


def test_empty_index():
    idx = build_index([], [])
    assert idx.n_papers == 0 and idx.edge_count == 0
    assert loads_index(dumps_index(idx)) == idx


def star():
    years = {"P1": 1980, "P2": 1985, "P3": 1984, "P4": 1990, "P5": 1984, "P6": 1999}
    return make_index(years, [(p, "P1") for p in ("P2", "P3", "P4", "P5", "P6")])


def test_star_graph():
    idx = star()
    assert idx.citers("P1") == ["P3", "P5", "P2", "P4", "P6"]
    assert idx.references("P1") == []
    assert citers_of(idx, "P1", YearWindow(1970, 2020)) == idx.citers("P1")
    assert citers_of(idx, "P1", YearWindow(2000, 2010)) == []
    assert citers_of(idx, "P1", YearWindow(1984, 1985)) == ["P3", "P5", "P2"]


def test_unknown_paper():
    with pytest.raises(UnknownPaperError):
        citers_of(star(), "nope", YearWindow(1970, 2020))
    with pytest.raises(UnknownPaperError):
        yearly_citation_series(star(), "nope", 2000)


def test_index_immutable():
    idx = star()
    with pytest.raises(ValueError):
        idx.in_idx[0] = 3
    with pytest.raises(AttributeError):
        idx.ids = ()


def _raw(corpus):
    return corpus.edge_pairs(), corpus.year_map()


def test_adjacency_matches_raw_edges(small_corpus, small_index):
    pairs, years = _raw(small_corpus)
    out, inn = defaultdict(set), defaultdict(set)
    for a, b in pairs:
        out[a].add(b)
        inn[b].add(a)
    idx = small_index
    assert idx.edge_count == len(set(pairs))
    for pid in idx.ids:
        refs = idx.references(pid)
        cit = idx.citers(pid)
        assert set(refs) == out[pid] and len(refs) == len(out[pid])
        assert set(cit) == inn[pid] and len(cit) == len(inn[pid])
        assert cit == sorted(cit, key=lambda c: (years[c], c))
    # bidirectional consistency on the CSR arrays
    for i in range(idx.n_papers):
        for j in idx.out_nodes(i).tolist():
            assert i in set(idx.in_nodes(j).tolist())


def test_citers_of_matches_linear_scan(small_corpus, small_index, rng):
    pairs, years = _raw(small_corpus)
    ids = small_index.ids
    for _ in range(300):
        pid = ids[int(rng.integers(len(ids)))]
        a, b = sorted(rng.integers(1965, 2025, size=2).tolist())
        expect = sorted({c for c, d in pairs if d == pid and a <= years[c] <= b}, key=lambda c: (years[c], c))
        assert citers_of(small_index, pid, YearWindow(a, b)) == expect


def test_yearly_series_examples():
    years = {"SB": 2000, **{f"C{i}": 2004 for i in range(5)}, "U": 2001}
    idx = make_index(years, [(f"C{i}", "SB") for i in range(5)])
    assert yearly_citation_series(idx, "SB", 2004).counts.tolist() == [0, 0, 0, 0, 5]
    assert yearly_citation_series(idx, "U", 2010).counts.tolist() == [0] * 10


def test_yearly_series_matches_groupby(small_corpus, small_index):
    pairs, years = _raw(small_corpus)
    groups = defaultdict(lambda: defaultdict(int))
    for a, b in pairs:
        groups[b][years[a]] += 1
    for pid in small_index.ids[::7]:
        s = yearly_citation_series(small_index, pid, 2020)
        pub = years[pid]
        expect = [groups[pid].get(pub + t, 0) for t in range(2020 - pub + 1)]
        assert s.counts.tolist() == expect
        assert s.counts.sum() == len(small_index.citers(pid))


def test_series_rejects_negative():
    with pytest.raises(ValueError):
        CitationSeries(2000, [1, -1])


def test_round_trip(tmp_path, small_index):
    path = tmp_path / "idx.dorm"
    save_index(small_index, path)
    loaded = load_index(path)
    assert loaded == small_index
    assert dumps_index(loaded) == path.read_bytes()
    assert loaded.citers(loaded.ids[0]) == small_index.citers(small_index.ids[0])


def test_corrupt_files(small_index):
    data = dumps_index(small_index)
    with pytest.raises(CorruptFileError):
        loads_index(data[: len(data) // 2])
    flipped = bytearray(data)
    flipped[100] ^= 0xFF
    with pytest.raises(CorruptFileError):
        loads_index(bytes(flipped))
    with pytest.raises(CorruptFileError):
        loads_index(b"NOPE" + data[4:])
    bumped = bytearray(data)
    bumped[4] = 9
    with pytest.raises(VersionMismatchError):
        loads_index(bytes(bumped))


def test_ingest_is_deterministic(small_corpus):
    p, c = small_corpus.papers_tsv().encode(), small_corpus.citations_tsv().encode()

    def run():
        papers, _ = ingest_papers(p)
        edges, _ = ingest_citations(c, papers)
        return dumps_index(build_index(papers, edges))

    assert run() == run()


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 12))
    years = {f"N{i:02d}": draw(st.integers(1970, 2020)) for i in range(n)}
    ids = list(years)
    edges = draw(st.lists(st.tuples(st.sampled_from(ids), st.sampled_from(ids)), max_size=40))
    return years, [(a, b) for a, b in edges if a != b]


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_index_properties(g):
    years, edges = g
    idx = make_index(years, edges)
    assert idx.edge_count == len(set(edges))
    for pid in years:
        full = citers_of(idx, pid, YearWindow(1970, 2020))
        assert full == idx.citers(pid)
        assert len(set(full)) == len(full)
        s = yearly_citation_series(idx, pid, 2020)
        assert s.counts.min() >= 0 and s.counts.sum() == len(full)
        for r in idx.references(pid):
            assert pid in idx.citers(r)
