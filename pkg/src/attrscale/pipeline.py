"""The six-step numeric scale pipeline.

Stages, in order: binary usage matrix (QAUM), co-occurrence counts with
Total Measure (ADM), row-normalized probabilities (PDM), per-attribute
mean/variance/SD (MVSD), the numeric scale |SD_h - SD_k| / ADM[h,k] (NSM),
and its row-wise normalization to [0,10] (NNSM). Lower scale values mean
stronger inter-attribute dependence; each row's weakest partner maps to 10.

All arithmetic runs at full double precision; counts are exact (they stay
far below 2^53, so the BLAS-backed matrix product in build_adm is exact
integer arithmetic). Undefined cells propagate forward: a cell with no
probability has no scale value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import DependencyMatrix, MaskedRealMatrix, StatsTable, UsageMatrix
from .workload import UsageSet


@dataclass(frozen=True, eq=False)
class ScaleBundle:
    """Every intermediate of one pipeline run, retained for export and explanation."""

    qaum: UsageMatrix
    adm: DependencyMatrix
    pdm: MaskedRealMatrix
    mvsd: StatsTable
    nsm: MaskedRealMatrix
    nnsm: MaskedRealMatrix
    warnings: tuple[dict, ...]

    @property
    def attributes(self) -> tuple[str, ...]:
        return self.adm.attributes


def build_qaum(usage: UsageSet) -> UsageMatrix:
    """Binary m×n matrix: cell (h,k) = 1 iff query h uses attribute k."""
    m, n = usage.query_count, usage.attribute_count
    cells = np.zeros((m, n), dtype=np.uint8)
    for row, (_, indices) in enumerate(usage.queries):
        cells[row, sorted(indices)] = 1
    return UsageMatrix(
        query_ids=tuple(qid for qid, _ in usage.queries),
        attributes=usage.catalog.attributes,
        cells=cells,
    )


def build_adm(qaum: UsageMatrix) -> DependencyMatrix:
    """Count, for every attribute pair, the queries using both.

    Computed as QAUMᵀ·QAUM in float64 (exact for these integer magnitudes),
    which is symmetric by construction; the diagonal is discarded as
    undefined and Total Measure is the remaining row sum.
    """
    cells = qaum.cells.astype(np.float64)
    counts = np.rint(cells.T @ cells).astype(np.int64)
    np.fill_diagonal(counts, 0)
    return DependencyMatrix(
        attributes=qaum.attributes,
        counts=counts,
        total_measure=counts.sum(axis=1),
    )


def _isolated_warning(attribute: str) -> dict:
    return {
        "code": "isolated_attribute",
        "attribute": attribute,
        "message": f"attribute {attribute!r} never co-occurs (total measure 0); its scale rows are undefined",
    }


def build_pdm(adm: DependencyMatrix, *, warnings: list[dict] | None = None) -> MaskedRealMatrix:
    """Row-normalize counts into probabilities: PDM[h,k] = ADM[h,k] / TM[h].

    Diagonal and zero-count cells are undefined. A row with total measure 0
    (isolated attribute) is fully undefined and recorded as a warning.
    """
    n = len(adm.attributes)
    tm = adm.total_measure.astype(np.float64)
    defined = adm.counts > 0
    np.fill_diagonal(defined, False)
    defined &= (adm.total_measure > 0)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        values = adm.counts.astype(np.float64) / tm[:, None]
    if warnings is not None:
        for h in range(n):
            if adm.total_measure[h] == 0:
                warnings.append(_isolated_warning(adm.attributes[h]))
    return MaskedRealMatrix(kind="PDM", attributes=adm.attributes, values=values, defined=defined)


def compute_mvsd(adm: DependencyMatrix, pdm: MaskedRealMatrix) -> StatsTable:
    """Mean, variance, SD of each attribute's co-occurrence distribution.

    Over the defined cells of row h, with p the probabilities and x the
    matching counts: mean = Σ p·x, variance = Σ p·(x - mean)², SD = √var.
    Fully undefined rows yield undefined statistics.
    """
    if pdm.kind != "PDM" or pdm.attributes != adm.attributes:
        raise ValueError("pdm must be derived from adm")
    x = adm.counts.astype(np.float64)
    p = np.where(pdm.defined, pdm.values, 0.0)
    mean = (p * x).sum(axis=1)
    variance = (p * (x - mean[:, None]) ** 2).sum(axis=1)
    return StatsTable(
        attributes=adm.attributes,
        mean=mean,
        variance=variance,
        sd=np.sqrt(variance),
        defined=pdm.defined.any(axis=1),
    )


def compute_nsm(adm: DependencyMatrix, stats: StatsTable) -> MaskedRealMatrix:
    """The scale itself: NSM[h,k] = |SD_h - SD_k| / ADM[h,k].

    Defined exactly where the probability matrix is defined (off-diagonal,
    positive count, both row statistics available). Lower = stronger.
    """
    defined = adm.counts > 0
    np.fill_diagonal(defined, False)
    defined &= (adm.total_measure > 0)[:, None]
    defined &= stats.defined[:, None] & stats.defined[None, :]
    sd = np.where(stats.defined, stats.sd, 0.0)
    gap = np.abs(sd[:, None] - sd[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        values = gap / adm.counts.astype(np.float64)
    return MaskedRealMatrix(kind="NSM", attributes=adm.attributes, values=values, defined=defined)


def compute_nnsm(nsm: MaskedRealMatrix, *, warnings: list[dict] | None = None) -> MaskedRealMatrix:
    """Scale each row so its maximum maps to 10.

    Rows whose defined cells are all zero (a degenerate tie: every partner
    equally strong) map to all zeros and record a warning; fully undefined
    rows stay undefined. Uses full-precision inputs, never displayed values.
    """
    if nsm.kind != "NSM":
        raise ValueError("compute_nnsm expects an NSM matrix")
    n = len(nsm.attributes)
    filled = np.where(nsm.defined, nsm.values, -np.inf)
    row_max = filled.max(axis=1) if n else np.zeros(0)
    values = np.full_like(nsm.values, np.nan)
    for h in range(n):
        if not nsm.defined[h].any():
            continue
        if row_max[h] > 0.0:
            # divide before scaling: v/max <= 1 exactly, so cells never exceed 10
            values[h] = (nsm.values[h] / row_max[h]) * 10.0
        else:
            values[h] = 0.0
            if warnings is not None:
                warnings.append(
                    {
                        "code": "degenerate_tie",
                        "attribute": nsm.attributes[h],
                        "message": f"all defined scale cells of {nsm.attributes[h]!r} are zero; row normalized to zeros",
                    }
                )
    return MaskedRealMatrix(kind="NNSM", attributes=nsm.attributes, values=values, defined=nsm.defined)


def run_pipeline(usage: UsageSet) -> ScaleBundle:
    """Run all six steps over a usage set, collecting stage warnings."""
    warnings: list[dict] = []
    qaum = build_qaum(usage)
    adm = build_adm(qaum)
    pdm = build_pdm(adm, warnings=warnings)
    mvsd = compute_mvsd(adm, pdm)
    nsm = compute_nsm(adm, mvsd)
    nnsm = compute_nnsm(nsm, warnings=warnings)
    return ScaleBundle(qaum=qaum, adm=adm, pdm=pdm, mvsd=mvsd, nsm=nsm, nnsm=nnsm, warnings=tuple(warnings))
