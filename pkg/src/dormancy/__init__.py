"""Sleeping Beauty, Prince and Storyteller detection on citation graphs."""

__version__ = "0.1.0"

from .corpus import (  # noqa: E402
    CitationEdge,
    CitationSeries,
    CorpusIndex,
    DocType,
    IngestReport,
    PaperRecord,
    YearWindow,
    build_index,
    citers_of,
    ingest_citations,
    ingest_papers,
    load_index,
    save_index,
    yearly_citation_series,
)
from .dynamics import (  # noqa: E402
    BeautyResult,
    SelectionConfig,
    SleepingBeautyRecord,
    awakening_time,
    beauty,
    beauty_coefficient,
    corrected_citation_percentile,
    select_sleeping_beauties,
)
from .stats import (  # noqa: E402
    KdeModel,
    PropagationTable,
    RatioSample,
    gaussian_kde,
    propagation_table,
    st_count_pmf,
    storyteller_ratios,
)
from .triad import (  # noqa: E402
    AbsenceReason,
    GroupPartition,
    PrinceRecord,
    TriadOptions,
    TriadRecord,
    co_citation_count,
    extract_triad,
    extract_triads,
    find_prince,
    find_storytellers,
    partition_groups,
)
