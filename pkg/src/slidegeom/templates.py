"""Layout template catalog, rule-based template selection and instantiation."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

from .deck import Bullet, Region, Slide

VISUAL_KINDS = ("image", "table")

# mirror families alternate by content-slide ordinal parity
MIRROR_PAIRS = (
    ("T2_ImageRight", "T3_ImageLeft"),
    ("T11_3Img_TopTextBottom", "T12_3Img_BottomTextTop"),
    ("T14_ImageRight_1Formula", "T15_ImageLeft_1Formula"),
)
TWO_BY_TWO = ("T7_2x2_TopImage", "T8_2x2_BottomImage", "T9_2x2_AltTextImg")

TALL_SQUARE_MAX = 1.0
WIDE_MIN = 1.6


class TemplateError(ValueError):
    pass


class TemplateOverflowError(TemplateError):
    """The content signature is too large for any single template; split it first."""


class BindingError(TemplateError):
    pass


@dataclass(frozen=True)
class TemplateSpec:
    id: str
    regions: tuple[Region, ...]
    n_visuals: int = 0
    n_formulas: int = 0
    n_formulas_min: int | None = None
    text: str = "optional"  # "none" | "optional" | "required"
    aspect: tuple[str, ...] = ()
    structural: bool = False

    def region_count(self, kind: str) -> int:
        return sum(1 for r in self.regions if r.kind == kind)

    def check(self) -> None:
        for r in self.regions:
            problem = r.check()
            if problem:
                raise TemplateError(f"{self.id}: {problem}")
        for i, a in enumerate(self.regions):
            for b in self.regions[i + 1:]:
                if _overlap(a, b) > 0:
                    raise TemplateError(f"{self.id}: regions overlap")
        if not self.structural and self.region_count("title_bar") != 1:
            raise TemplateError(f"{self.id}: content templates need exactly one title bar")


def _overlap(a: Region, b: Region) -> float:
    ax0, ay0, ax1, ay1 = a.bounds
    bx0, by0, bx1, by1 = b.bounds
    w = min(ax1, bx1) - max(ax0, bx0)
    h = min(ay1, by1) - max(ay0, by0)
    return w * h if w > 1e-12 and h > 1e-12 else 0.0


def _spec_from_json(raw: dict) -> TemplateSpec:
    sig = raw.get("signature", {})
    return TemplateSpec(
        id=raw["id"],
        regions=tuple(Region(r["kind"], r["x"], r["y"], r["w"], r["h"]) for r in raw["regions"]),
        n_visuals=int(sig.get("n_visuals", 0)),
        n_formulas=int(sig.get("n_formulas", 0)),
        n_formulas_min=sig.get("n_formulas_min"),
        text=sig.get("text", "optional"),
        aspect=tuple(sig.get("aspect", ())),
        structural=bool(raw.get("structural", False)),
    )


def parse_catalog(records: Sequence[dict]) -> dict[str, TemplateSpec]:
    catalog: dict[str, TemplateSpec] = {}
    for raw in records:
        spec = _spec_from_json(raw)
        if spec.id in catalog:
            raise TemplateError(f"duplicate template id {spec.id!r}")
        spec.check()
        catalog[spec.id] = spec
    return catalog


def load_catalog(path=None) -> dict[str, TemplateSpec]:
    """Load a catalog file, or the built-in one when ``path`` is None."""
    if path is None:
        return default_catalog()
    with open(path, encoding="utf-8") as fh:
        return parse_catalog(json.load(fh))


@lru_cache(maxsize=1)
def default_catalog() -> dict[str, TemplateSpec]:
    text = resources.files("slidegeom").joinpath("data/catalog.json").read_text("utf-8")
    return parse_catalog(json.loads(text))


# -- content -------------------------------------------------------------

@dataclass(frozen=True)
class Asset:
    name: str
    kind: str = "image"
    width: float = 1.0
    height: float = 1.0


@dataclass(frozen=True)
class SlideContent:
    """Everything planned for one content slide before a layout is chosen."""

    title: str = ""
    bullets: tuple[Bullet, ...] = ()
    visuals: tuple[Asset, ...] = ()
    formulas: tuple[str, ...] = ()
    section: str | None = None
    notes: str | None = None

    def __post_init__(self):
        for name in ("bullets", "visuals", "formulas"):
            object.__setattr__(self, name, tuple(getattr(self, name)))


@dataclass(frozen=True)
class ContentSignature:
    n_images: int = 0
    n_tables: int = 0
    n_formulas: int = 0
    n_bullets: int = 0
    aspect: float | None = None

    def __post_init__(self):
        if min(self.n_images, self.n_tables, self.n_formulas, self.n_bullets) < 0:
            raise ValueError("signature counts must be non-negative")

    @property
    def n_visuals(self) -> int:
        return self.n_images + self.n_tables


def signature_of(content: SlideContent) -> ContentSignature:
    aspect = None
    if content.visuals:
        largest = max(content.visuals, key=lambda a: a.width * a.height)
        aspect = largest.width / largest.height
    return ContentSignature(
        n_images=sum(a.kind == "image" for a in content.visuals),
        n_tables=sum(a.kind == "table" for a in content.visuals),
        n_formulas=len(content.formulas),
        n_bullets=len(content.bullets),
        aspect=aspect,
    )


def classify_aspect(width: float, height: float) -> str:
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    ratio = width / height
    if ratio <= TALL_SQUARE_MAX:
        return "tall-square"
    if ratio >= WIDE_MIN:
        return "wide"
    return "moderate"


def _aspect_class(sig: ContentSignature) -> str:
    if sig.aspect is None:
        return "moderate"
    return classify_aspect(sig.aspect, 1.0)


def select_template(sig: ContentSignature, content_ordinal: int = 1) -> str:
    """Pick the layout for a content slide from its signature.

    ``content_ordinal`` is the 1-based position among content slides; its
    parity picks between mirror layouts.
    """
    if content_ordinal < 1:
        raise ValueError("content_ordinal is 1-based")
    odd = content_ordinal % 2 == 1
    v, f = sig.n_visuals, sig.n_formulas
    text = sig.n_bullets > 0

    if f == 0:
        if v == 0:
            return "T1_TextOnly"
        if v == 1:
            if _aspect_class(sig) == "wide":
                return "T4_ImageTop"
            return "T2_ImageRight" if odd else "T3_ImageLeft"
        if v == 2:
            if not text:
                return "T5_TwoImages"
            if sig.n_bullets <= 2:
                return "T5_TwoImages2"
            return TWO_BY_TWO[(content_ordinal - 1) % 3]
        if v == 3:
            if not text:
                return "T13_3Img"
            return "T11_3Img_TopTextBottom" if odd else "T12_3Img_BottomTextTop"
        if v == 4 and not text:
            return "T10_4Img_2x2Grid"
    elif f == 1:
        if v == 0:
            return "T18_2formula_TopTextBottom"
        if v == 1:
            return "T14_ImageRight_1Formula" if odd else "T15_ImageLeft_1Formula"
        if v == 2:
            return "T17_2Img_1formula_TopTextBottom"
    elif f == 2:
        if v == 0:
            return "T18_2formula_TopTextBottom"
        if v == 1:
            return "T16_1Img_2formula_TopTextBottom"
    raise TemplateOverflowError(
        f"no template holds {v} visual(s), {f} formula(s) and "
        f"{sig.n_bullets} bullet(s); use split_overflow")


def accepts(sig: ContentSignature) -> bool:
    try:
        select_template(sig)
    except TemplateOverflowError:
        return False
    return True


# -- instantiation -------------------------------------------------------

def bullets_text(bullets: Sequence[Bullet]) -> str:
    lines = []
    for b in bullets:
        lines.append(b.text)
        lines.extend("  - " + s for s in b.subs)
    return "\n".join(lines)


def _split_even(items: Sequence, parts: int) -> list[list]:
    size, extra = divmod(len(items), parts)
    out, start = [], 0
    for k in range(parts):
        end = start + size + (1 if k < extra else 0)
        out.append(list(items[start:end]))
        start = end
    return out


def instantiate(template_id: str, content: SlideContent, index: int = 1,
                catalog: Mapping[str, TemplateSpec] | None = None) -> Slide:
    """Clone the template geometry and bind content in reading order."""
    catalog = catalog or default_catalog()
    try:
        spec = catalog[template_id]
    except KeyError:
        raise TemplateError(f"unknown template {template_id!r}") from None
    if spec.structural:
        raise TemplateError(f"{template_id} is a structural template")

    n_vis_regions = spec.region_count("image")
    n_formula_regions = spec.region_count("formula")
    n_text_regions = spec.region_count("text")
    if len(content.visuals) != n_vis_regions:
        raise BindingError(f"{template_id} holds {n_vis_regions} visual(s), "
                           f"got {len(content.visuals)}")
    fewest = n_formula_regions if spec.n_formulas_min is None else spec.n_formulas_min
    if not fewest <= len(content.formulas) <= n_formula_regions:
        raise BindingError(f"{template_id} holds {n_formula_regions} formula(s), "
                           f"got {len(content.formulas)}")
    if content.bullets and not n_text_regions:
        raise BindingError(f"{template_id} has no text region for bullets")

    visuals = iter(content.visuals)
    formulas = iter(content.formulas)
    text_chunks = iter(_split_even(content.bullets, n_text_regions or 1))
    regions = []
    for r in spec.regions:
        if r.kind == "title_bar":
            regions.append(Region("title_bar", r.x, r.y, r.w, r.h, content.title))
        elif r.kind == "image":
            asset = next(visuals)
            regions.append(Region(asset.kind, r.x, r.y, r.w, r.h, asset.name))
        elif r.kind == "formula":
            payload = next(formulas, None)
            if payload is not None:  # unused optional formula strips are dropped
                regions.append(Region("formula", r.x, r.y, r.w, r.h, payload))
        else:
            regions.append(Region("text", r.x, r.y, r.w, r.h, bullets_text(next(text_chunks))))

    return Slide(
        index=index,
        role="content",
        section=content.section,
        subsection=content.title or None,
        template=template_id,
        bullets=content.bullets,
        regions=tuple(regions),
        images=tuple(a.name for a in content.visuals if a.kind == "image"),
        tables=tuple(a.name for a in content.visuals if a.kind == "table"),
        formulas=content.formulas,
        notes=content.notes,
    )


def split_overflow(content: SlideContent, content_ordinal: int = 1) -> list[tuple[str, SlideContent]]:
    """Break oversized content into shards that each fit one template.

    Visuals go four at a time, then formulas two at a time. Bullets ride
    on the first shard when its layout has room for text; otherwise they
    get a text-only slide right after it.
    """
    if not (content.bullets or content.visuals or content.formulas):
        raise TemplateError("cannot split empty content")

    def part(**kw) -> SlideContent:
        base = dict(title=content.title, section=content.section)
        base.update(kw)
        return SlideContent(**base)

    shards = [part(visuals=content.visuals[i:i + 4])
              for i in range(0, len(content.visuals), 4)]
    shards += [part(formulas=content.formulas[i:i + 2])
               for i in range(0, len(content.formulas), 2)]

    if content.bullets:
        if not shards:
            shards = [part()]
        first = shards[0]
        with_text = part(visuals=first.visuals, formulas=first.formulas, bullets=content.bullets)
        if accepts(signature_of(with_text)):
            shards[0] = with_text
        else:
            shards.insert(1, part(bullets=content.bullets))
    if content.notes is not None:
        shards[0] = replace(shards[0], notes=content.notes)

    return [(select_template(signature_of(s), content_ordinal + k), s)
            for k, s in enumerate(shards)]


def plan_slide(content: SlideContent, content_ordinal: int = 1) -> list[tuple[str, SlideContent]]:
    """Template choice for one planned slide, splitting it if it overflows."""
    sig = signature_of(content)
    try:
        return [(select_template(sig, content_ordinal), content)]
    except TemplateOverflowError:
        return split_overflow(content, content_ordinal)
