"""Actionable outputs over a finished bundle: rankings, partners, groups, explanations."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AttrScaleError, DiagonalPairError, UnknownAttributeError
from .pipeline import ScaleBundle

RANK_KEYS = ("nnsm-min", "nnsm-row")


@dataclass(frozen=True)
class RankedPair:
    a: str
    b: str
    nnsm: float
    nsm: float
    adm: int


@dataclass(frozen=True)
class AffinityRanking:
    """Pairs sorted ascending by scale value (strongest dependence first)."""

    key: str
    entries: tuple[RankedPair, ...]
    warnings: tuple[dict, ...] = ()


@dataclass(frozen=True)
class PairExplanation:
    """Every intermediate the scale produced for one attribute pair."""

    a: str
    b: str
    co_occurring_queries: tuple[str, ...]
    adm: int
    total_measure_a: int
    total_measure_b: int
    pdm_ab: float | None
    pdm_ba: float | None
    sd_a: float | None
    sd_b: float | None
    nsm: float | None
    nnsm_ab: float | None
    nnsm_ba: float | None


@dataclass(frozen=True)
class AttributeGroup:
    """Candidate attribute cluster; cohesion = mean internal NNSM (lower = tighter)."""

    attributes: tuple[str, ...]
    cohesion: float

    def __post_init__(self):
        if len(self.attributes) < 2:
            raise AttrScaleError("a group needs at least 2 attributes")


def _index(bundle: ScaleBundle, name: str) -> int:
    idx = bundle.qaum.attributes.index(name) if name in bundle.qaum.attributes else None
    if idx is None:
        # fall back to case-insensitive match, the catalog convention
        folded = name.casefold()
        for i, attr in enumerate(bundle.qaum.attributes):
            if attr.casefold() == folded:
                return i
        raise UnknownAttributeError(name)
    return idx


def rank_pairs(bundle: ScaleBundle, key: str = "nnsm-min") -> AffinityRanking:
    """Rank defined cells ascending: the strongest dependencies come first.

    nnsm-min scores each unordered pair once by the smaller of its two
    directed values; nnsm-row lists directed cells as-is. Ties break
    lexicographically by attribute-name pair, so output is total and stable.
    """
    if key not in RANK_KEYS:
        raise AttrScaleError(f"unknown ranking key {key!r}")
    names = bundle.attributes
    nnsm, nsm, adm = bundle.nnsm, bundle.nsm, bundle.adm
    entries: list[RankedPair] = []
    n = len(names)
    if key == "nnsm-row":
        for h in range(n):
            for k in range(n):
                if h != k and nnsm.defined[h, k]:
                    entries.append(
                        RankedPair(names[h], names[k], float(nnsm.values[h, k]), float(nsm.values[h, k]), int(adm.counts[h, k]))
                    )
    else:
        for h in range(n):
            for k in range(h + 1, n):
                if not nnsm.defined[h, k]:
                    continue  # mask is symmetric for pipeline bundles
                ab, ba = float(nnsm.values[h, k]), float(nnsm.values[k, h])
                direction = (h, k) if ab <= ba else (k, h)
                entries.append(
                    RankedPair(
                        names[direction[0]],
                        names[direction[1]],
                        min(ab, ba),
                        float(nsm.values[direction[0], direction[1]]),
                        int(adm.counts[h, k]),
                    )
                )
    entries.sort(key=lambda e: (e.nnsm, e.a, e.b))
    warnings: tuple[dict, ...] = ()
    if not entries:
        warnings = ({"code": "empty_ranking", "message": "every scale cell is undefined; nothing to rank"},)
    return AffinityRanking(key=key, entries=tuple(entries), warnings=warnings)


def strongest_partner(bundle: ScaleBundle, attribute: str) -> tuple[str, float]:
    """The defined partner with the smallest NNSM in the attribute's row."""
    h = _index(bundle, attribute)
    names = bundle.attributes
    best: tuple[float, str] | None = None
    for k in range(len(names)):
        if bundle.nnsm.defined[h, k]:
            cand = (float(bundle.nnsm.values[h, k]), names[k])
            if best is None or cand < best:
                best = cand
    if best is None:
        raise AttrScaleError(f"attribute {attribute!r} is isolated; its scale row is undefined")
    return best[1], best[0]


def _cohesion(bundle: ScaleBundle, members: list[int]) -> float | None:
    """Mean of defined internal NNSM cells, both directions; None if none defined."""
    total, cells = 0.0, 0
    for h in members:
        for k in members:
            if h != k and bundle.nnsm.defined[h, k]:
                total += float(bundle.nnsm.values[h, k])
                cells += 1
    return (total / cells) if cells else None


def suggest_groups(bundle: ScaleBundle, cutoff: float, max_size: int) -> list[AttributeGroup]:
    """Greedy agglomeration of attributes into tight groups.

    Seeds from the strongest remaining pair (nnsm-min order), then keeps
    adding the attribute that minimizes the grown group's cohesion while it
    stays ≤ cutoff and the group ≤ max_size. Grouped attributes leave the
    pool; iteration continues until no seed pair qualifies. A candidate must
    share at least one defined cell with the group, so unrelated attributes
    never ride in on a tie.
    """
    if not 0.0 <= cutoff <= 10.0:
        raise AttrScaleError(f"cutoff must be in [0,10], got {cutoff}")
    if max_size < 2:
        raise AttrScaleError(f"max_size must be at least 2, got {max_size}")
    names = bundle.attributes
    index_of = {name: i for i, name in enumerate(names)}
    ranking = rank_pairs(bundle, "nnsm-min")
    available = set(range(len(names)))
    groups: list[AttributeGroup] = []
    for entry in ranking.entries:
        a, b = index_of[entry.a], index_of[entry.b]
        if a not in available or b not in available:
            continue
        members = sorted((a, b))
        cohesion = _cohesion(bundle, members)
        if cohesion is None or cohesion > cutoff:
            continue
        while len(members) < max_size:
            best: tuple[float, str, int] | None = None
            for c in sorted(available - set(members)):
                if not any(bundle.nnsm.defined[c, m] or bundle.nnsm.defined[m, c] for m in members):
                    continue
                grown = _cohesion(bundle, members + [c])
                if grown is None or grown > cutoff:
                    continue
                cand = (grown, names[c], c)
                if best is None or cand < best:
                    best = cand
            if best is None:
                break
            members.append(best[2])
            members.sort()
            cohesion = best[0]
        groups.append(AttributeGroup(attributes=tuple(names[i] for i in members), cohesion=cohesion))
        available -= set(members)
    return groups


def explain_pair(bundle: ScaleBundle, a: str, b: str) -> PairExplanation:
    """Trace one pair through every stage; numeric fields are copied from the bundle."""
    h, k = _index(bundle, a), _index(bundle, b)
    if h == k:
        raise DiagonalPairError(bundle.attributes[h])
    qaum = bundle.qaum
    co_ids = tuple(
        qid for qid, row in zip(qaum.query_ids, qaum.cells) if row[h] and row[k]
    )
    return PairExplanation(
        a=bundle.attributes[h],
        b=bundle.attributes[k],
        co_occurring_queries=co_ids,
        adm=int(bundle.adm.counts[h, k]),
        total_measure_a=int(bundle.adm.total_measure[h]),
        total_measure_b=int(bundle.adm.total_measure[k]),
        pdm_ab=bundle.pdm.cell(h, k),
        pdm_ba=bundle.pdm.cell(k, h),
        sd_a=float(bundle.mvsd.sd[h]) if bundle.mvsd.defined[h] else None,
        sd_b=float(bundle.mvsd.sd[k]) if bundle.mvsd.defined[k] else None,
        nsm=bundle.nsm.cell(h, k),
        nnsm_ab=bundle.nnsm.cell(h, k),
        nnsm_ba=bundle.nnsm.cell(k, h),
    )
