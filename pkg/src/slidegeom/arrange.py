"""Turn a content outline plus an asset manifest into a laid-out deck."""

from __future__ import annotations

import json
from typing import Any, Mapping

from .deck import Bullet, Deck, Region, Slide, bullet_from_json
from .templates import (Asset, SlideContent, TemplateSpec, bullets_text, default_catalog,
                        instantiate, plan_slide)


class ArrangeError(ValueError):
    pass


def read_manifest(obj: Mapping[str, Any]) -> dict[str, Asset]:
    """Asset manifest: ``{name: {"kind", "width", "height"}}``."""
    assets = {}
    for name, meta in obj.items():
        try:
            kind = meta.get("kind", "image")
            width, height = float(meta["width"]), float(meta["height"])
        except (AttributeError, KeyError, TypeError, ValueError):
            raise ArrangeError(f"manifest entry {name!r} needs kind, width and height") from None
        if kind not in ("image", "table"):
            raise ArrangeError(f"manifest entry {name!r}: kind must be image or table")
        if width <= 0 or height <= 0:
            raise ArrangeError(f"manifest entry {name!r}: size must be positive")
        assets[name] = Asset(name, kind, width, height)
    return assets


def _slide_content(raw: Mapping, section: str, assets: Mapping[str, Asset]) -> SlideContent:
    names = list(raw.get("assets", [])) + list(raw.get("images", [])) + list(raw.get("tables", []))
    missing = [n for n in names if n not in assets]
    if missing:
        raise ArrangeError(f"assets not in manifest: {missing}")
    formulas = raw.get("formulas", [])
    if not all(isinstance(f, str) for f in formulas):
        raise ArrangeError("formulas must be strings")
    return SlideContent(
        title=raw.get("title", ""),
        bullets=tuple(bullet_from_json(b) for b in raw.get("bullets", [])),
        visuals=tuple(assets[n] for n in names),
        formulas=tuple(formulas),
        section=section,
        notes=raw.get("notes"),
    )


def _structural(template: str, catalog: Mapping[str, TemplateSpec], title: str,
                body: str = "", **kw) -> Slide:
    regions = []
    for r in catalog[template].regions:
        payload = title if r.kind == "title_bar" else body
        regions.append(Region(r.kind, r.x, r.y, r.w, r.h, payload))
    role = "section" if template == "section" else template
    return Slide(index=0, role=role, template=template, regions=tuple(regions), **kw)


def arrange(outline: Mapping[str, Any], manifest: Mapping[str, Any] | None = None,
            catalog: Mapping[str, TemplateSpec] | None = None) -> Deck:
    """Build a deck: title, agenda, per-section divider and content slides, thanks."""
    catalog = catalog or default_catalog()
    assets = read_manifest(manifest or {})
    sections = outline.get("sections") or []
    if not any(sec.get("slides") for sec in sections):
        raise ArrangeError("outline has no content slides")
    title = outline.get("title", "")

    slides = [
        _structural("title", catalog, title, outline.get("subtitle", "")),
        _structural("agenda", catalog, "Agenda",
                    bullets_text([Bullet(s.get("title", "")) for s in sections]),
                    bullets=tuple(Bullet(s.get("title", "")) for s in sections)),
    ]
    ordinal = 1
    for sec in sections:
        label = sec.get("title", "")
        slides.append(_structural("section", catalog, label, section=label))
        for raw in sec.get("slides", []):
            content = _slide_content(raw, label, assets)
            for template_id, shard in plan_slide(content, ordinal):
                slides.append(instantiate(template_id, shard, catalog=catalog))
                ordinal += 1
    slides.append(_structural("thanks", catalog, "Thank you"))
    return Deck(title, tuple(slides)).renumbered().validate()


def load_json(path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
