import numpy as np
import pytest

from dormancy.corpus import CitationEdge, DocType, PaperRecord, build_index
from dormancy.synth import SynthConfig, generate_ca_corpus


def make_index(years: dict, edges, doc_types: dict | None = None, fields: dict | None = None, y_min=1970, y_max=2020):
    """Index from ``{id: year}`` and ``[(citing, cited), ...]``."""
    doc_types = doc_types or {}
    fields = fields or {}
    papers = [PaperRecord(pid, y, doc_types.get(pid, DocType.ARTICLE), fields.get(pid, 0)) for pid, y in years.items()]
    return build_index(papers, [CitationEdge(a, b, years[a]) for a, b in edges], y_min, y_max)


@pytest.fixture(scope="session")
def small_corpus():
    return generate_ca_corpus(SynthConfig(n_papers=1000, refs_per_paper=4, seed=7))


@pytest.fixture(scope="session")
def small_index(small_corpus):
    return small_corpus.to_index()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
