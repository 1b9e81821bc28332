"""Storyteller ratio distributions, Gaussian KDE and the propagation table."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import CorpusIndex
from .errors import EmptyInputError, EmptySamplesError, NonPositiveBandwidthError
from .triad import TriadRecord, partition_node_groups

SQRT_2PI = math.sqrt(2.0 * math.pi)
MIN_BANDWIDTH = 1e-4


def qualifies(triad: TriadRecord, min_csb: int = 10, min_cpr: int = 10, mode: str = "both") -> bool:
    """Window-count filter; both thresholds are strict (``C > min``)."""
    if not triad.prince.present:
        return False
    ok_sb = triad.c_sb_window > min_csb
    ok_pr = triad.c_pr_window > min_cpr
    if mode == "both":
        return ok_sb and ok_pr
    if mode == "either":
        return ok_sb or ok_pr
    raise ValueError(f"unknown filter mode {mode!r}")


# -- ratios --------------------------------------------------------------------


@dataclass(frozen=True)
class RatioSample:
    sb_id: str
    st_over_csb: float | None
    st_over_cpr: float | None
    n_st: int


def storyteller_ratios(triads, min_csb: int = 10, min_cpr: int = 10, mode: str = "either") -> list[RatioSample]:
    """Share of the window citations of SB (and of PR) made by Storytellers.

    A ratio is only emitted when its own denominator passes its threshold.
    """
    out = []
    for t in triads:
        if not qualifies(t, min_csb, min_cpr, mode):
            continue
        r_sb = t.n_st / t.c_sb_window if t.c_sb_window > min_csb else None
        r_pr = t.n_st / t.c_pr_window if t.c_pr_window > min_cpr else None
        out.append(RatioSample(t.sb_id, r_sb, r_pr, t.n_st))
    return out


# -- KDE -----------------------------------------------------------------------


def silverman_bandwidth(samples) -> float:
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    sigma = float(np.std(x, ddof=1)) if n > 1 else 0.0
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sigma, (q75 - q25) / 1.34)
    if spread <= 0.0:
        spread = sigma
    return max(0.9 * spread * n ** (-0.2), MIN_BANDWIDTH)


@dataclass(frozen=True)
class KdeModel:
    """Gaussian KDE, optionally folded back into a closed support interval."""

    samples: np.ndarray
    bandwidth: float
    support: tuple
    reflect: bool = True

    def _centers(self) -> np.ndarray:
        """Kernel centres, including reflection images when folding is on."""
        x = self.samples
        if not self.reflect:
            return x
        a, b = self.support
        width = b - a
        # enough images that the neglected ones sit > 12 bandwidths away
        k_max = int(math.ceil(12.0 * self.bandwidth / (2.0 * width))) + 1
        shifts = 2.0 * width * np.arange(-k_max, k_max + 1)
        direct = (x[None, :] + shifts[:, None]).ravel()
        mirrored = ((2.0 * a - x)[None, :] + shifts[:, None]).ravel()
        return np.concatenate([direct, mirrored])

    def evaluate(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        centers = self._centers()
        h = self.bandwidth
        n = self.samples.size
        out = np.empty(xs.shape, dtype=np.float64)
        step = max(1, 2_000_000 // max(centers.size, 1))
        flat = xs.ravel()
        res = out.ravel()
        for i in range(0, flat.size, step):
            z = (flat[i : i + step, None] - centers[None, :]) / h
            res[i : i + step] = np.exp(-0.5 * z * z).sum(axis=1) / (n * h * SQRT_2PI)
        out = res.reshape(xs.shape)
        if self.reflect:
            a, b = self.support
            out[(xs < a) | (xs > b)] = 0.0
        if np.ndim(x) == 0:
            return float(out[0])
        return out

    __call__ = evaluate

    def grid_export(self, n_points: int = 512) -> tuple[np.ndarray, np.ndarray]:
        grid = np.linspace(self.support[0], self.support[1], n_points)
        return grid, self.evaluate(grid)

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))


def gaussian_kde(samples, bandwidth: float | None = None, support=(0.0, 1.0), reflect: bool = True) -> KdeModel:
    """Fit a Gaussian KDE.

    Without an explicit bandwidth, Silverman's rule
    ``0.9 * min(std, IQR/1.34) * n**-0.2`` is used, floored at 1e-4. With
    ``reflect`` the kernel mass falling outside ``support`` is folded back in,
    so the density integrates to one on the support. Without it, ``support``
    is widened to cover the samples plus eight bandwidths on each side and is
    only used for grid export.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptySamplesError("KDE needs at least one sample")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise NonPositiveBandwidthError(f"bandwidth must be positive, got {bandwidth}")
    if reflect:
        a, b = float(support[0]), float(support[1])
        if not a < b:
            raise ValueError("support must be a non-degenerate interval")
        if x.min() < a or x.max() > b:
            raise ValueError("samples lie outside the reflection support")
    else:
        a, b = float(x.min() - 8 * h), float(x.max() + 8 * h)
    x = x.copy()
    x.setflags(write=False)
    return KdeModel(x, h, (a, b), reflect)


# -- Storyteller count pmf -----------------------------------------------------


def st_count_pmf(triads, min_csb: int = 10, min_cpr: int = 10, mode: str = "either") -> dict[int, float]:
    """Empirical pmf of the Storyteller count over qualifying triads."""
    counts = Counter(t.n_st for t in triads if qualifies(t, min_csb, min_cpr, mode))
    total = sum(counts.values())
    if total == 0:
        raise EmptyInputError("no qualifying triads")
    return {k: counts[k] / total for k in sorted(counts)}


# -- propagation table ---------------------------------------------------------


class Group(str, enum.Enum):
    SB_ONLY = "sb_only"
    PR_ONLY = "pr_only"
    STORYTELLER = "storyteller"


_GROUP_KEYS = {Group.SB_ONLY: "sb_only", Group.PR_ONLY: "pr_only", Group.STORYTELLER: "both"}


@dataclass(frozen=True)
class PropagationRow:
    group: Group
    e_sb: float | None
    e_pr: float | None
    e_nsb: float | None
    n_triads: int
    n_triads_nsb: int = 0

    def to_dict(self) -> dict:
        return {
            "group": self.group.value,
            "e_sb": self.e_sb,
            "e_pr": self.e_pr,
            "e_nsb": self.e_nsb,
            "n_triads": self.n_triads,
            "n_triads_nsb": self.n_triads_nsb,
        }


@dataclass(frozen=True)
class PropagationTable:
    rows: tuple
    aggregation: str = "macro"
    e_nsb_variant: str = "conjunctive"

    def row(self, group) -> PropagationRow:
        group = Group(group)
        return next(r for r in self.rows if r.group is group)

    def to_dict(self) -> dict:
        return {
            "aggregation": self.aggregation,
            "e_nsb_variant": self.e_nsb_variant,
            "rows": [r.to_dict() for r in self.rows],
        }

    def format(self) -> str:
        def cell(v):
            return "    -" if v is None else f"{v:8.3f}"

        lines = [f"{'group':<12}{'E_SB':>9}{'E_PR':>9}{'E_|Nsb|':>9}{'triads':>8}"]
        for r in self.rows:
            lines.append(f"{r.group.value:<12}{cell(r.e_sb):>9}{cell(r.e_pr):>9}{cell(r.e_nsb):>9}{r.n_triads:>8}")
        return "\n".join(lines)


@dataclass(frozen=True)
class TriadPropagation:
    """Per-triad counts behind one table row: |F_G|, members of F_G citing SB / PR."""

    n_future: int
    n_cites_sb: int
    n_cites_pr: int


def _future_citers(index: CorpusIndex, members: np.ndarray, after_year: int) -> np.ndarray:
    if members.size == 0:
        return np.zeros(0, dtype=np.int64)
    parts = [index.in_nodes_window(int(m), after_year + 1, None) for m in members.tolist()]
    return np.unique(np.concatenate(parts))


def triad_propagation(index: CorpusIndex, triad: TriadRecord) -> dict[Group, TriadPropagation]:
    """Count, per group, the post-awakening citers of its members and how many cite SB / PR."""
    groups = partition_node_groups(index, triad)
    aw = triad.awakening_year
    sb_future = index.in_nodes_window(index.node(triad.sb_id), aw + 1, None)
    pr_future = index.in_nodes_window(index.node(triad.pr_id), aw + 1, None)
    out = {}
    for g, key in _GROUP_KEYS.items():
        f = _future_citers(index, groups[key], aw)
        out[g] = TriadPropagation(
            int(f.size),
            int(np.intersect1d(f, sb_future, assume_unique=True).size),
            int(np.intersect1d(f, pr_future, assume_unique=True).size),
        )
    return out


def _mean(values) -> float | None:
    return math.fsum(values) / len(values) if values else None


def propagation_table(
    index: CorpusIndex,
    triads,
    min_csb: int = 10,
    min_cpr: int = 10,
    mode: str = "both",
    aggregation: str = "macro",
    e_nsb_variant: str = "conjunctive",
) -> PropagationTable:
    """Mean probability that post-awakening citers of each group also cite SB / PR.

    ``macro`` averages per-triad ratios; ``micro`` pools the counts over
    triads. The relative-size column uses, as denominator, the Storyteller
    group's post-awakening citers that cite SB (``conjunctive``) or all of
    them (``plain``); triads where that denominator is zero are left out of
    the column for every row.
    """
    if aggregation not in ("macro", "micro"):
        raise ValueError(f"unknown aggregation {aggregation!r}")
    if e_nsb_variant not in ("conjunctive", "plain"):
        raise ValueError(f"unknown e_nsb variant {e_nsb_variant!r}")

    per_triad = [
        triad_propagation(index, t)
        for t in sorted(triads, key=lambda t: t.sb_id)
        if qualifies(t, min_csb, min_cpr, mode)
    ]

    def size(p: TriadPropagation) -> int:
        return p.n_cites_sb if e_nsb_variant == "conjunctive" else p.n_future

    rows = []
    for g in Group:
        active = [p[g] for p in per_triad if p[g].n_future > 0]
        paired = [(size(p[g]), size(p[Group.STORYTELLER])) for p in per_triad if size(p[Group.STORYTELLER]) > 0]
        if aggregation == "macro":
            e_sb = _mean([q.n_cites_sb / q.n_future for q in active])
            e_pr = _mean([q.n_cites_pr / q.n_future for q in active])
            e_nsb = _mean([num / den for num, den in paired])
        else:
            fut = sum(q.n_future for q in active)
            e_sb = sum(q.n_cites_sb for q in active) / fut if fut else None
            e_pr = sum(q.n_cites_pr for q in active) / fut if fut else None
            den = sum(d for _, d in paired)
            e_nsb = sum(n for n, _ in paired) / den if den else None
        rows.append(PropagationRow(g, e_sb, e_pr, e_nsb, len(active), len(paired)))
    return PropagationTable(tuple(rows), aggregation, e_nsb_variant)
