import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dormancy.corpus import YearWindow
from dormancy.dynamics import select_sleeping_beauties
from dormancy.errors import NoPrinceError, SamePaperError, UnknownPaperError
from dormancy.synth import oracle_prince, oracle_storytellers
from dormancy.triad import (
    AbsenceReason,
    TriadOptions,
    co_citation_count,
    extract_triad,
    extract_triads,
    find_prince,
    find_storytellers,
    partition_groups,
)

from conftest import make_index


def test_co_citation_examples():
    years = {"a": 1980, "b": 1981, "P1": 1990, "P2": 1991, "P3": 1992}
    idx = make_index(years, [("P1", "a"), ("P1", "b"), ("P2", "a")])
    assert co_citation_count(idx, "a", "b") == 1
    assert co_citation_count(idx, "b", "a") == 1
    assert co_citation_count(idx, "a", "b", cutoff_year=1989) == 0
    idx = make_index(years, [("P1", "a"), ("P2", "b")])
    assert co_citation_count(idx, "a", "b") == 0
    with pytest.raises(SamePaperError):
        co_citation_count(idx, "a", "a")
    with pytest.raises(UnknownPaperError):
        co_citation_count(idx, "a", "zz")


def test_co_citation_matches_set_intersection(small_corpus, small_index, rng):
    pairs, years = small_corpus.edge_pairs(), small_corpus.year_map()
    citers = {}
    for a, b in pairs:
        citers.setdefault(b, set()).add(a)
    ids = small_index.ids
    for _ in range(300):
        a, b = (ids[int(i)] for i in rng.choice(len(ids), 2, replace=False))
        cutoff = int(rng.integers(1975, 2021))
        expect = len({c for c in citers.get(a, set()) & citers.get(b, set()) if years[c] <= cutoff})
        assert co_citation_count(small_index, a, b, cutoff) == expect == co_citation_count(small_index, b, a, cutoff)


def prince_graph():
    # SB awakens in 2000; X co-cited 3 times (1980), Y twice (1975), Z is too young
    years = {"SB": 1970, "X": 1980, "Y": 1975, "Z": 2000, "W": 1976}
    edges = []
    for i in range(3):
        years[f"c{i}"] = 1990 + i
        edges += [(f"c{i}", "SB"), (f"c{i}", "X")]
    for i in range(2):
        years[f"d{i}"] = 2005
        edges += [(f"d{i}", "SB"), (f"d{i}", "Y")]
    for i in range(5):
        years[f"z{i}"] = 2010
        edges += [(f"z{i}", "SB"), (f"z{i}", "Z")]
    return years, edges


def test_prince_max_co_citation():
    years, edges = prince_graph()
    idx = make_index(years, edges)
    pr = find_prince(idx, "SB", awakening_year=2000)
    assert (pr.pr_id, pr.co_citation_count, pr.y_pr) == ("X", 3, 1980)
    o = oracle_prince(edges, years, "SB", 2000, 2020)
    assert (o.pr_id, o.co_citation_count) == ("X", 3)


def test_prince_tie_prefers_earlier_year():
    years = {"SB": 1970, "A": 1980, "B": 1975}
    edges = []
    for i in range(3):
        years[f"c{i}"] = 1990
        edges += [(f"c{i}", "SB"), (f"c{i}", "A"), (f"c{i}", "B")]
    idx = make_index(years, edges)
    assert find_prince(idx, "SB", awakening_year=2000).pr_id == "B"
    years["B"] = 1980
    idx = make_index(years, edges)
    assert find_prince(idx, "SB", awakening_year=2000).pr_id == "A"


def test_prince_absence_reasons():
    years = {"SB": 1970, "X": 1960 + 15, "late": 2005}
    idx = make_index(years, [("late", "SB"), ("late", "X")])
    pr = find_prince(idx, "SB", awakening_year=2000)
    assert pr.pr_id is None and pr.absence_reason is AbsenceReason.NO_CITATIONS_BEFORE_BURST
    years = {"SB": 1970, "early": 1980}
    idx = make_index(years, [("early", "SB")])
    pr = find_prince(idx, "SB", awakening_year=2000)
    assert pr.absence_reason is AbsenceReason.NO_CO_CITED_PAPERS
    with pytest.raises(NoPrinceError):
        find_storytellers(idx, "SB", pr, awakening_year=2000)


def test_prince_cutoff_and_strictness():
    years, edges = prince_graph()
    idx = make_index(years, edges)
    # only pre-awakening co-citations: Y's 2005 co-citers drop out, X still wins
    assert find_prince(idx, "SB", TriadOptions(prince_cutoff_year=1999), awakening_year=2000).pr_id == "X"
    # allowing the awakening year itself admits Z (5 co-citations)
    assert find_prince(idx, "SB", TriadOptions(prince_strict=False), awakening_year=2000).pr_id == "Z"


def storyteller_graph():
    years = {"SB": 1970, "PR": 1990}
    edges = [("PR", "SB")]
    for i, y in enumerate([1989, 1990, 1995, 2000, 2001]):
        years[f"s{i}"] = y
        edges += [(f"s{i}", "SB"), (f"s{i}", "PR")]
    return years, edges


def test_storytellers_window():
    years, edges = storyteller_graph()
    idx = make_index(years, edges)
    pr = find_prince(idx, "SB", awakening_year=2000)
    assert pr.pr_id == "PR"
    assert find_storytellers(idx, "SB", pr, awakening_year=2000) == ["s1", "s2", "s3"]
    assert find_storytellers(idx, "SB", pr, TriadOptions(st_inclusive=False), awakening_year=2000) == ["s1", "s2"]
    assert oracle_storytellers(edges, years, "SB", "PR", YearWindow(1990, 2000)) == ["s1", "s2", "s3"]


def test_single_year_window():
    years = {"SB": 1970, "PR": 2000, "a": 2000, "b": 2000, "c": 1999}
    edges = [("a", "SB"), ("a", "PR"), ("b", "SB"), ("b", "PR"), ("c", "SB")]
    idx = make_index(years, edges)
    pr = find_prince(idx, "SB", TriadOptions(prince_strict=False), awakening_year=2000)
    assert pr.pr_id == "PR"
    assert find_storytellers(idx, "SB", pr, awakening_year=2000) == ["a", "b"]


def test_prince_without_pre_burst_storytellers():
    years = {"SB": 1970, "PR": 1980, "early": 1985, "late": 2010}
    edges = [("early", "SB"), ("late", "SB"), ("late", "PR")]
    idx = make_index(years, edges)
    t = extract_triad(idx, "SB", awakening_year=2000)
    assert t.pr_id == "PR" and t.storytellers == ()
    assert t.c_sb_window == 1 and t.c_pr_window == 0


def test_partition_examples():
    years = {"SB": 1970, "PR": 1980, "A": 1990, "B": 1991, "C": 1992, "D": 1993, "E": 2010}
    edges = [("A", "SB"), ("B", "SB"), ("C", "SB"), ("C", "PR"), ("D", "PR"), ("E", "SB"), ("E", "PR")]
    idx = make_index(years, edges)
    t = extract_triad(idx, "SB", awakening_year=2000)
    g = partition_groups(idx, t)
    assert g.sb_only == {"A", "B"} and g.pr_only == {"D"} and g.both == {"C"}
    assert set(t.storytellers) == g.both


def test_partition_full_overlap():
    years = {"SB": 1970, "PR": 1980, "A": 1990, "B": 1991}
    edges = [("A", "SB"), ("A", "PR"), ("B", "SB"), ("B", "PR")]
    idx = make_index(years, edges)
    g = partition_groups(idx, extract_triad(idx, "SB", awakening_year=2000))
    assert g.sb_only == g.pr_only == frozenset() and g.both == {"A", "B"}


def test_triad_round_trip():
    years, edges = storyteller_graph()
    idx = make_index(years, edges)
    t = extract_triad(idx, "SB", awakening_year=2000)
    from dormancy.triad import TriadRecord

    assert TriadRecord.from_dict(t.to_dict()) == t


def check_triad(idx, t, edges, years):
    o = oracle_prince(edges, years, t.sb_id, t.awakening_year, idx.y_max)
    assert (t.prince.pr_id, t.prince.co_citation_count, t.prince.absence_reason) == (
        o.pr_id,
        o.co_citation_count,
        o.absence_reason,
    )
    if not t.prince.present:
        return
    assert years[t.pr_id] < t.awakening_year
    w = t.window
    assert t.storytellers == tuple(oracle_storytellers(edges, years, t.sb_id, t.pr_id, w))
    sb_w = {c for c, d in edges if d == t.sb_id and years[c] in w}
    pr_w = {c for c, d in edges if d == t.pr_id and years[c] in w}
    g = partition_groups(idx, t)
    assert not (g.sb_only & g.pr_only) and not (g.sb_only & g.both) and not (g.pr_only & g.both)
    assert g.sb_only | g.pr_only | g.both == sb_w | pr_w
    assert g.both == set(t.storytellers)
    assert len(g.both) <= min(t.c_sb_window, t.c_pr_window)
    assert t.c_sb_window == len(sb_w) and t.c_pr_window == len(pr_w)
    assert t.pr_id not in t.storytellers and t.sb_id not in t.storytellers


def test_triads_match_oracles(small_corpus, small_index):
    pairs, years = small_corpus.edge_pairs(), small_corpus.year_map()
    sbs = select_sleeping_beauties(small_index, b_pct=0.5)
    assert sbs
    for t in extract_triads(small_index, sbs):
        check_triad(small_index, t, pairs, years)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(3, 14))
    years = {f"N{i:02d}": draw(st.integers(1990, 2005)) for i in range(n)}
    ids = list(years)
    edges = draw(st.lists(st.tuples(st.sampled_from(ids), st.sampled_from(ids)), max_size=60, unique=True))
    return years, [(a, b) for a, b in edges if a != b]


@settings(max_examples=200, deadline=None)
@given(small_graphs(), st.integers(1990, 2006))
def test_triad_properties(g, aw):
    years, edges = g
    idx = make_index(years, edges)
    for sb in years:
        t = extract_triad(idx, sb, awakening_year=aw)
        check_triad(idx, t, edges, years)


def test_unrelated_edges_do_not_move_prince():
    years, edges = prince_graph()
    base = find_prince(make_index(years, edges), "SB", awakening_year=2000)
    years.update({"u1": 1995, "u2": 1996})
    extra = edges + [("u1", "u2"), ("u2", "W"), ("u1", "W")]
    assert find_prince(make_index(years, extra), "SB", awakening_year=2000) == base


def test_parallel_extraction_matches_serial(small_index):
    sbs = select_sleeping_beauties(small_index, b_pct=0.5)
    assert extract_triads(small_index, sbs, workers=2) == extract_triads(small_index, sbs)
