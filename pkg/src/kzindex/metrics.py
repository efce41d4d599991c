"""Per-researcher indices: h, g, per-paper impact, publication age and K_z."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable

from .errors import DomainError, EmptyProfileError, FutureDatedError
from .model import EvaluationContext, ResearcherProfile

EARLY, MID, ADVANCED = "early", "mid", "advanced"
ZONE_CUTS = (10, 20)


@dataclass(frozen=True)
class KzBreakdownRow:
    year: int
    citations: int
    impact: float
    age: int
    weighted_impact: float


@dataclass(frozen=True)
class MetricReport:
    researcher_id: str
    publication_count: int
    total_citations: int
    h_index: int
    g_index: int
    career_length: int
    kz: float
    career_zone: str
    empty: bool = False
    # per-paper k/age terms, kept so renderers can tabulate K_z at display precision
    addends: tuple[float, ...] = field(default=(), repr=False, compare=False)


def paper_impact(citations: int, h: int) -> float:
    """Smallest k >= 0 with citations <= (h + 1) ** k.

    Papers with 0 or 1 citation have zero impact.
    """
    if citations < 0:
        raise DomainError(f"citations must be non-negative, got {citations}")
    if h < 0:
        raise DomainError(f"h-index must be non-negative, got {h}")
    if citations <= 1:
        return 0.0
    if h == 0:
        raise DomainError(f"impact of a paper with {citations} citations is undefined for h = 0")
    return math.log(citations) / math.log(h + 1)


def publication_age(publication_year: int, evaluation_year: int) -> int:
    if publication_year > evaluation_year:
        raise FutureDatedError(publication_year, evaluation_year)
    # same-year papers would divide by zero in K_z
    return max(1, evaluation_year - publication_year)


def h_index(citation_counts: Iterable[int]) -> int:
    ranked = sorted(citation_counts, reverse=True)
    h = 0
    for rank, c in enumerate(ranked, start=1):
        if c < rank:
            break
        h = rank
    return h


def g_index(citation_counts: Iterable[int]) -> int:
    """Largest g <= N whose g most-cited papers hold at least g**2 citations."""
    ranked = sorted(citation_counts, reverse=True)
    g = 0
    running = 0
    for rank, c in enumerate(ranked, start=1):
        running += c
        if running >= rank * rank:
            g = rank
    return g


def _require_publications(profile: ResearcherProfile):
    if not profile.publications:
        raise EmptyProfileError(profile.id)


def kz_breakdown(profile: ResearcherProfile, ctx: EvaluationContext) -> list[KzBreakdownRow]:
    _require_publications(profile)
    h = h_index(profile.citations)
    rows = []
    for pub in profile.publications:
        try:
            age = publication_age(pub.year, ctx.evaluation_year)
        except FutureDatedError as exc:
            raise FutureDatedError(exc.publication_year, exc.evaluation_year, profile.id) from None
        k = paper_impact(pub.citations, h)
        rows.append(KzBreakdownRow(pub.year, pub.citations, k, age, k / age))
    return rows


def kz_from_breakdown(rows: Iterable[KzBreakdownRow]) -> float:
    # fsum is correctly rounded, so the total does not depend on row order
    return math.fsum(r.weighted_impact for r in rows)


def tabulated_sum(values: Iterable[float], decimals: int = 3) -> float:
    """Sum of ``values`` after rounding each half-up to ``decimals`` places.

    This is how the published case tables total their K_z footers (every
    k' is printed to three decimals and the footer adds the printed cells).
    """
    quantum = Decimal(1).scaleb(-decimals)
    total = sum(
        (Decimal(repr(v)).quantize(quantum, rounding=ROUND_HALF_UP) for v in values),
        Decimal(0),
    )
    return float(total)


def kz_score(profile: ResearcherProfile, ctx: EvaluationContext) -> float:
    return kz_from_breakdown(kz_breakdown(profile, ctx))


def career_length(profile: ResearcherProfile, ctx: EvaluationContext) -> int:
    _require_publications(profile)
    first = min(p.year for p in profile.publications)
    if first > ctx.evaluation_year:
        raise FutureDatedError(first, ctx.evaluation_year, profile.id)
    return ctx.evaluation_year - first


def career_zone(years: int) -> str:
    if years <= ZONE_CUTS[0]:
        return EARLY
    if years <= ZONE_CUTS[1]:
        return MID
    return ADVANCED


def metric_report(profile: ResearcherProfile, ctx: EvaluationContext) -> MetricReport:
    """Digest one profile. An empty profile yields an all-zero report flagged ``empty``."""
    if not profile.publications:
        return MetricReport(profile.id, 0, 0, 0, 0, 0, 0.0, EARLY, empty=True)
    counts = profile.citations
    length = career_length(profile, ctx)
    rows = kz_breakdown(profile, ctx)
    return MetricReport(
        researcher_id=profile.id,
        publication_count=len(counts),
        total_citations=sum(counts),
        h_index=h_index(counts),
        g_index=g_index(counts),
        career_length=length,
        kz=kz_from_breakdown(rows),
        career_zone=career_zone(length),
        addends=tuple(r.weighted_impact for r in rows),
    )
