"""Geometry-aware density scoring of slide layouts."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

from .deck import Deck, Region, Slide, scorable_slides


@dataclass(frozen=True)
class GadParams:
    a_min: float = 0.04
    tau: float = 0.55
    m_star: int = 4
    kappa: float = 6.3
    lambda1: float = 0.6
    lambda2: float = 0.4

    def __post_init__(self):
        if not 0 < self.a_min < 1:
            raise ValueError(f"a_min must lie in (0, 1), got {self.a_min}")
        if not 0 < self.tau < 1:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if int(self.m_star) != self.m_star or self.m_star < 1:
            raise ValueError(f"m_star must be a positive integer, got {self.m_star}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.lambda1 < 0 or self.lambda2 < 0 or abs(self.lambda1 + self.lambda2 - 1) > 1e-9:
            raise ValueError("lambda weights must be non-negative and sum to 1")

    @classmethod
    def with_lambda1(cls, lambda1: float, **kw) -> "GadParams":
        return cls(lambda1=lambda1, lambda2=1.0 - lambda1, **kw)


@dataclass(frozen=True)
class SlideScore:
    index: int
    rho: float
    m_eff: int
    om: float
    fr: float
    score: float


@dataclass(frozen=True)
class GadReport:
    slides: tuple[SlideScore, ...]
    deck_gad: float
    empty: bool = False

    def to_json(self) -> dict:
        return {
            "deck_gad": round(self.deck_gad, 6),
            "empty": self.empty,
            "slides": [
                {k: (round(v, 6) if isinstance(v, float) else v) for k, v in asdict(s).items()}
                for s in self.slides
            ],
        }


def union_area(regions: Sequence[Region]) -> float:
    """Exact area of the union of axis-aligned boxes.

    Sweeps the compressed x coordinates; within each vertical slab the
    covering y-intervals are merged and their total length taken.
    """
    boxes = [r.bounds for r in regions]
    if not boxes:
        return 0.0
    xs = sorted({b[0] for b in boxes} | {b[2] for b in boxes})
    total = 0.0
    for x0, x1 in zip(xs, xs[1:]):
        spans = sorted((b[1], b[3]) for b in boxes if b[0] <= x0 and b[2] >= x1)
        if not spans:
            continue
        covered = 0.0
        lo, hi = spans[0]
        for y0, y1 in spans[1:]:
            if y0 > hi:
                covered += hi - lo
                lo, hi = y0, y1
            elif y1 > hi:
                hi = y1
        covered += hi - lo
        total += covered * (x1 - x0)
    return min(1.0, max(0.0, total))


def content_regions(regions: Sequence[Region]) -> list[Region]:
    return [r for r in regions if r.kind != "title_bar"]


def effective_region_count(regions: Sequence[Region], a_min: float) -> int:
    """Number of non-title regions whose own area passes the inclusive gate."""
    if a_min <= 0:
        raise ValueError("a_min must be positive")
    return sum(1 for r in content_regions(regions) if r.w * r.h >= a_min)


def fragmentation_reward(m_eff: int, m_star: int, kappa: float) -> float:
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return max(0.0, 1.0 - (m_eff - m_star) ** 2 / kappa)


def occupancy_match(rho: float, tau: float) -> float:
    return 1.0 - abs(rho - tau)


def slide_score(om: float, fr: float, lambda1: float, lambda2: float) -> float:
    return lambda1 * om + lambda2 * fr


def score_slide(slide: Slide, params: GadParams) -> SlideScore:
    boxes = content_regions(slide.regions)
    rho = union_area(boxes)
    m_eff = effective_region_count(boxes, params.a_min)
    om = occupancy_match(rho, params.tau)
    fr = fragmentation_reward(m_eff, params.m_star, params.kappa)
    return SlideScore(slide.index, rho, m_eff, om, fr,
                      slide_score(om, fr, params.lambda1, params.lambda2))


def score_deck(deck: Deck, params: GadParams | None = None) -> GadReport:
    """Score every content slide and average into the deck-level GAD.

    Title, agenda, section and thanks pages are not scored. A deck with no
    content slides gets ``deck_gad = 0`` and ``empty = True``.
    """
    params = params or GadParams()
    rows = tuple(score_slide(s, params) for s in scorable_slides(deck))
    if not rows:
        return GadReport((), 0.0, empty=True)
    return GadReport(rows, sum(r.score for r in rows) / len(rows))
