"""Command-line pipeline: simulate, ingest, detect, analyze, case-study.

Exit codes: 0 success, 1 empty result (warning only), 2 fatal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import PipelineConfig, field_type, format_value, load_config, parse_value
from .corpus import (
    build_index,
    ingest_citations,
    ingest_papers,
    load_index,
    save_index,
    yearly_citation_series,
)
from .dynamics import SelectionConfig, select_sleeping_beauties
from .errors import DormancyError, UnknownSbError
from .stats import gaussian_kde, propagation_table, st_count_pmf, storyteller_ratios
from .synth import SynthConfig, TriadSpec, generate_ca_corpus, plant_triad
from .triad import AbsenceReason, TriadOptions, TriadRecord, extract_triads

log = logging.getLogger("dormancy")

EXIT_OK, EXIT_EMPTY, EXIT_FATAL = 0, 1, 2


class CliError(Exception):
    pass


# -- provenance & writers -------------------------------------------------------


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def provenance(cfg: PipelineConfig, inputs: dict) -> dict:
    return {
        "tool": "dormancy",
        "version": __version__,
        "config_hash": cfg.digest(),
        "inputs": {k: file_digest(v) for k, v in sorted(inputs.items())},
    }


def _prov_comment(prov: dict) -> str:
    inputs = ",".join(f"{k}:{v[:16]}" for k, v in prov["inputs"].items())
    return f"# {prov['tool']} {prov['version']} config={prov['config_hash']} inputs={inputs}\n"


def _num(v) -> str:
    return "" if v is None else repr(float(v)) if isinstance(v, float) else str(v)


def write_csv(path: Path, prov: dict, header, rows) -> None:
    buf = io.StringIO()
    buf.write(_prov_comment(prov))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def write_jsonl(path: Path, prov: dict, records) -> None:
    lines = [json.dumps({"provenance": prov}, sort_keys=True)]
    lines += [json.dumps(r, sort_keys=True) for r in records]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_jsonl(path) -> list[dict]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if "provenance" in rec and len(rec) == 1:
            continue
        out.append(rec)
    return out


def read_csv(path) -> list[dict]:
    text = "".join(line for line in Path(path).read_text().splitlines(True) if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(text)))


# -- path resolution ------------------------------------------------------------


def _out_dir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _require(path, what: str) -> Path:
    if path is None:
        raise CliError(f"no {what} path given")
    p = Path(path)
    if not p.exists():
        raise CliError(f"{what} file not found: {p}")
    return p


def _index_path(cfg, given=None) -> Path:
    return Path(given or cfg.index or Path(cfg.output_dir) / "index.dorm")


def _triads_path(cfg, given=None) -> Path:
    return Path(given or cfg.triads or Path(cfg.output_dir) / "triads.jsonl")


def _triad_options(cfg: PipelineConfig) -> TriadOptions:
    return TriadOptions(cfg.prince_cutoff_year, cfg.prince_strict, cfg.st_inclusive)


# -- subcommands ------------------------------------------------------------------


def cmd_ingest(cfg: PipelineConfig, papers=None, citations=None) -> int:
    papers_path = _require(papers or cfg.papers, "papers")
    citations_path = _require(citations or cfg.citations, "citations")
    records, p_report = ingest_papers(papers_path, cfg.y_min, cfg.y_max)
    edges, c_report = ingest_citations(citations_path, records)
    index = build_index(records, edges, cfg.y_min, cfg.y_max)
    out = _index_path(cfg)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_index(index, out)
    report = {
        "index": str(out),
        "papers": p_report.to_dict(),
        "citations": c_report.to_dict(),
        "n_papers": index.n_papers,
        "n_edges": index.edge_count,
    }
    print(json.dumps(report, sort_keys=True))
    warnings = p_report.skipped_malformed + p_report.out_of_range + c_report.skipped_malformed + c_report.dangling
    if warnings:
        log.warning("ingest dropped %d rows; see report", warnings)
    return EXIT_OK


def cmd_detect(cfg: PipelineConfig, index_path=None) -> int:
    ipath = _require(_index_path(cfg, index_path), "index")
    index = load_index(ipath)
    out = _out_dir(cfg)
    prov = provenance(cfg, {"index": ipath})
    if index.n_papers == 0:
        sbs = []
    else:
        sel = SelectionConfig(cfg.citation_pct, cfg.b_pct, horizon=cfg.horizon, per_field=cfg.b_per_field)
        sbs = select_sleeping_beauties(index, sel)
    triads = extract_triads(index, sbs, _triad_options(cfg), workers=cfg.workers)
    write_jsonl(out / "sb.jsonl", prov, [s.to_dict() for s in sbs])
    write_jsonl(out / "triads.jsonl", prov, [t.to_dict() for t in triads])
    reasons = {r: 0 for r in AbsenceReason}
    for t in triads:
        reasons[t.prince.absence_reason] += 1
    print(
        f"sleeping_beauties={len(sbs)} princes={reasons[AbsenceReason.NONE]} "
        f"no_citations_before_burst={reasons[AbsenceReason.NO_CITATIONS_BEFORE_BURST]} "
        f"no_co_cited_papers={reasons[AbsenceReason.NO_CO_CITED_PAPERS]}"
    )
    return EXIT_OK


def load_triads(path) -> list[TriadRecord]:
    return [TriadRecord.from_dict(d) for d in read_jsonl(path)]


def _kde_column(values, cfg: PipelineConfig, grid: np.ndarray):
    if not values:
        return [None] * grid.size
    kde = gaussian_kde(values, cfg.kde_bandwidth, (0.0, 1.0), reflect=cfg.kde_reflect)
    return kde.evaluate(grid).tolist()


def cmd_analyze(cfg: PipelineConfig, index_path=None, triads_path=None) -> int:
    ipath = _require(_index_path(cfg, index_path), "index")
    tpath = _require(_triads_path(cfg, triads_path), "triads")
    index = load_index(ipath)
    triads = load_triads(tpath)
    out = _out_dir(cfg)
    prov = provenance(cfg, {"index": ipath, "triads": tpath})

    ratios = storyteller_ratios(triads, cfg.min_csb, cfg.min_cpr, cfg.ratio_mode)
    write_csv(
        out / "ratios.csv",
        prov,
        ["sb_id", "st_over_csb", "st_over_cpr", "n_st"],
        [(r.sb_id, r.st_over_csb, r.st_over_cpr, r.n_st) for r in ratios],
    )
    r_sb = [r.st_over_csb for r in ratios if r.st_over_csb is not None]
    r_pr = [r.st_over_cpr for r in ratios if r.st_over_cpr is not None]
    grid = np.linspace(0.0, 1.0, cfg.kde_points)
    write_csv(
        out / "kde_grid.csv",
        prov,
        ["x", "density_sb", "density_pr"],
        zip(grid.tolist(), _kde_column(r_sb, cfg, grid), _kde_column(r_pr, cfg, grid)),
    )

    try:
        pmf = st_count_pmf(triads, cfg.min_csb, cfg.min_cpr, cfg.ratio_mode)
    except DormancyError:
        pmf = {}
    write_csv(out / "st_pmf.csv", prov, ["n_st", "probability"], sorted(pmf.items()))

    table = propagation_table(
        index, triads, cfg.min_csb, cfg.min_cpr, cfg.table_mode, cfg.aggregation, cfg.e_nsb_variant
    )
    doc = {"provenance": prov, **table.to_dict()}
    (out / "propagation.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def mean(xs):
        return f"{float(np.mean(xs)):.4f} (n={len(xs)})" if xs else "undefined (n=0)"

    print(f"mean ST share of SB window citations: {mean(r_sb)}")
    print(f"mean ST share of PR window citations: {mean(r_pr)}")
    print(table.format())
    if not ratios and all(r.n_triads == 0 for r in table.rows):
        log.warning("no triad passed the window-citation filters")
        return EXIT_EMPTY
    return EXIT_OK


def case_study_rows(index, triad: TriadRecord) -> list[tuple]:
    """Per-year SB citations, PR citations and Storyteller counts for one triad."""
    sb_year = index.year_of(triad.sb_id)
    has_pr = triad.prince.present
    first = min(sb_year, triad.prince.y_pr) if has_pr else sb_year
    years = range(first, index.y_max + 1)

    def series(pid):
        s = yearly_citation_series(index, pid, index.y_max)
        return {s.pub_year + t: int(c) for t, c in enumerate(s.counts.tolist())}

    sb = series(triad.sb_id)
    pr = series(triad.pr_id) if has_pr else {}
    st_years = {}
    for pid in triad.storytellers:
        y = index.year_of(pid)
        st_years[y] = st_years.get(y, 0) + 1
    rows = []
    for y in years:
        rows.append(
            (
                y,
                sb.get(y, 0),
                pr.get(y, 0) if has_pr else None,
                st_years.get(y, 0) if has_pr else None,
                int(has_pr and y == triad.prince.y_pr),
                int(y == triad.awakening_year),
            )
        )
    return rows


CASE_STUDY_HEADER = ["year", "sb_citations", "pr_citations", "st_count", "is_y_pr", "is_awakening_year"]


def cmd_case_study(cfg: PipelineConfig, sb_id: str, index_path=None, triads_path=None) -> int:
    ipath = _require(_index_path(cfg, index_path), "index")
    tpath = _require(_triads_path(cfg, triads_path), "triads")
    index = load_index(ipath)
    triad = next((t for t in load_triads(tpath) if t.sb_id == sb_id), None)
    if triad is None:
        raise UnknownSbError(f"{sb_id!r} is not in {tpath}")
    out = _out_dir(cfg)
    prov = provenance(cfg, {"index": ipath, "triads": tpath})
    write_csv(out / "history.csv", prov, CASE_STUDY_HEADER, case_study_rows(index, triad))
    if not triad.prince.present:
        log.warning("SB %s has no prince (%s); PR and ST columns left empty", sb_id, triad.prince.absence_reason.value)
    return EXIT_OK


def cmd_simulate(cfg: PipelineConfig) -> int:
    sc = SynthConfig(
        n_papers=cfg.n_papers,
        y_min=cfg.y_min,
        y_max=cfg.y_max,
        refs_per_paper=cfg.refs_per_paper,
        attachment_offset=cfg.attachment_offset,
        recency_half_life=cfg.recency_half_life,
        fields=cfg.fields,
        seed=cfg.seed,
    )
    corpus = generate_ca_corpus(sc)
    spec = TriadSpec(
        sleep_years=cfg.sleep_years,
        burst_size=cfg.burst_size,
        burst_years=cfg.burst_years,
        n_st=cfg.n_st,
        n_sb_only=cfg.n_sb_only,
        n_pr_only=cfg.n_pr_only,
    )
    for _ in range(cfg.n_planted):
        plant_triad(corpus, spec)
    paths = corpus.write(_out_dir(cfg))
    print(json.dumps({"seed": cfg.seed, **{k: str(v) for k, v in paths.items()}}, sort_keys=True))
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------------


def _option_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=argparse.SUPPRESS, help="key = value config file")
    p.add_argument(
        "--show-config", action="store_true", default=argparse.SUPPRESS, help="print the effective config and exit"
    )
    for f in PipelineConfig.__dataclass_fields__.values():
        flag = "--" + f.name.replace("_", "-")
        tp = field_type(f.name)
        kind = "bool" if tp is bool else tp.__name__
        p.add_argument(
            flag,
            dest=f"cfg_{f.name}",
            default=argparse.SUPPRESS,
            metavar=kind.upper(),
            help=f"(default: {format_value(f.default)})",
        )
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _option_parser()
    # options are accepted both before and after the subcommand name
    parser = argparse.ArgumentParser(prog="dormancy", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("--version", action="version", version=f"dormancy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="build an index from papers.tsv and citations.tsv")
    p.add_argument("papers_tsv", nargs="?")
    p.add_argument("citations_tsv", nargs="?")

    p = sub.add_parser("detect", parents=[common], help="select Sleeping Beauties, Princes and Storytellers")
    p.add_argument("index_file", nargs="?")

    p = sub.add_parser("analyze", parents=[common], help="ratio distributions, KDE, ST pmf, propagation table")
    p.add_argument("index_file", nargs="?")
    p.add_argument("triads_file", nargs="?")

    p = sub.add_parser("case-study", parents=[common], help="yearly citation history of one SB and its Prince")
    p.add_argument("sb_id")
    p.add_argument("--index-file")
    p.add_argument("--triads-file")

    sub.add_parser("simulate", parents=[common], help="generate a synthetic corpus with planted triads")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = {
            k[4:]: parse_value(k[4:], v) for k, v in vars(args).items() if k.startswith("cfg_")
        }
        cfg = load_config(getattr(args, "config", None), overrides)
        if getattr(args, "show_config", False):
            sys.stdout.write(cfg.dumps())
            return EXIT_OK
        if args.command == "ingest":
            return cmd_ingest(cfg, args.papers_tsv, args.citations_tsv)
        if args.command == "detect":
            return cmd_detect(cfg, args.index_file)
        if args.command == "analyze":
            return cmd_analyze(cfg, args.index_file, args.triads_file)
        if args.command == "case-study":
            return cmd_case_study(cfg, args.sb_id, args.index_file, args.triads_file)
        if args.command == "simulate":
            return cmd_simulate(cfg)
    except (CliError, DormancyError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
