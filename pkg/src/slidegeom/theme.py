"""Deck refinement: text-slide consolidation and theme color derivation."""

from __future__ import annotations

import colorsys
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .deck import Deck, Slide
from .templates import SlideContent, bullets_text, instantiate

log = logging.getLogger(__name__)

RGB = tuple[int, int, int]

MERGED_TEMPLATE = "T19_2Text"

# Adjustable parameters and the bounds overrides are clamped to. The
# ranges are disjoint where ordering matters so clamped values always keep
# satFloor <= satTarget <= satCap and vCap >= targetV - 0.02.
SAFE_RANGES: dict[str, tuple[float, float]] = {
    "satTarget": (0.45, 0.75),
    "satFloor": (0.20, 0.45),
    "satCap": (0.75, 0.95),
    "satBlend": (0.30, 0.90),
    "targetV": (0.30, 0.52),
    "vCap": (0.50, 0.70),
    "gamma": (1.0, 6.0),
    "grayThreshold": (0.02, 0.20),
    "alphaThreshold": (0.0, 0.5),
    "brightWhite": (0.85, 0.99),
    "darkBlack": (0.02, 0.20),
}


def hex_to_rgb(value: str) -> RGB:
    value = value.lstrip("#")
    if len(value) != 6:
        raise ValueError(f"expected #rrggbb, got {value!r}")
    return tuple(int(value[i:i + 2], 16) for i in (0, 2, 4))


def rgb_to_hex(rgb: RGB) -> str:
    return "#%02x%02x%02x" % tuple(rgb)


def rgb_to_hsv(rgb: RGB) -> tuple[float, float, float]:
    """H in degrees [0, 360); S = delta/max; V = max/255."""
    h, s, v = colorsys.rgb_to_hsv(*(c / 255.0 for c in rgb))
    return (h * 360.0) % 360.0, s, v


def hsv_to_rgb(h: float, s: float, v: float) -> RGB:
    r, g, b = colorsys.hsv_to_rgb((h % 360.0) / 360.0, s, v)
    return tuple(int(round(c * 255.0)) for c in (r, g, b))


@dataclass(frozen=True)
class ColorParams:
    satTarget: float = 0.65
    satFloor: float = 0.35
    satCap: float = 0.85
    satBlend: float = 0.6
    targetV: float = 0.42
    vCap: float | None = 0.5
    gamma: float = 3.0
    fallbackHue: RGB = (0x2B, 0x5F, 0xA6)
    grayThreshold: float = 0.10
    alphaThreshold: float = 16 / 255
    brightWhite: float = 0.95
    darkBlack: float = 0.08
    # provenance only; never read by the color rules
    style_note: str = field(default="", compare=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        for name in ("satTarget", "satFloor", "satCap", "satBlend", "targetV"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not self.satFloor <= self.satTarget <= self.satCap:
            raise ValueError("need satFloor <= satTarget <= satCap")
        if self.vCap is not None:
            if not 0.0 <= self.vCap <= 1.0:
                raise ValueError("vCap must lie in [0, 1]")
            if self.vCap < self.targetV - 0.02:
                raise ValueError("vCap must be at least targetV - 0.02")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    def to_json(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["fallbackHue"] = rgb_to_hex(self.fallbackHue)
        out["warnings"] = list(self.warnings)
        return out


@dataclass(frozen=True)
class ThemeColor:
    rgb: RGB
    base: RGB
    fallback: bool = False

    @property
    def hex(self) -> str:
        return rgb_to_hex(self.rgb)

    @property
    def hsv(self) -> tuple[float, float, float]:
        return rgb_to_hsv(self.rgb)

    def to_json(self, params: ColorParams | None = None) -> dict:
        h, s, v = self.hsv
        out = {
            "theme": self.hex,
            "hsv": {"h": round(h, 6), "s": round(s, 6), "v": round(v, 6)},
            "base": rgb_to_hex(self.base),
            "fallback": self.fallback,
        }
        if params is not None:
            out["params"] = params.to_json()
        return out


# -- consolidation -------------------------------------------------------

def _is_text_only(slide: Slide) -> bool:
    return slide.role == "content" and not slide.has_assets


def _merge(run: Sequence[Slide]) -> Slide:
    """Fold a run of text-only slides into one two-column slide.

    The first half of the run (rounded up) fills the left column, the rest
    the right column; for a pair that is one slide per column.
    """
    half = (len(run) + 1) // 2
    columns = [run[:half], run[half:]]
    bodies = iter(["\n".join(bullets_text(s.bullets) for s in col if s.bullets)
                   for col in columns])
    first = run[0]
    title = next((s.subsection for s in run if s.subsection), "")
    slide = instantiate(MERGED_TEMPLATE, SlideContent(title=title))
    regions = tuple(replace(r, payload=next(bodies)) if r.kind == "text" else r
                    for r in slide.regions)
    notes = [s.notes for s in run if s.notes]
    return replace(
        slide,
        section=first.section,
        subsection=first.subsection,
        bullets=tuple(b for s in run for b in s.bullets),
        regions=regions,
        notes="\n\n".join(notes) if notes else None,
    )


def consolidate(deck: Deck) -> Deck:
    """Merge every run of two or more consecutive asset-free content slides.

    Each run becomes a single two-column slide, so the result never has two
    text-only content slides in a row. Other slides are untouched and
    indices are renumbered.
    """
    out: list[Slide] = []
    slides = deck.slides
    i = 0
    while i < len(slides):
        j = i
        while j < len(slides) and _is_text_only(slides[j]):
            j += 1
        if j - i >= 2:
            out.append(_merge(slides[i:j]))
            i = j
        else:
            out.append(slides[i])
            i += 1
    return Deck(deck.title, tuple(out), deck.aspect).renumbered().validate()


# -- base color ------------------------------------------------------------

def _as_rgba(image) -> np.ndarray:
    arr = np.asarray(image)
    if arr.ndim == 2:
        arr = np.repeat(arr[..., None], 3, axis=2)
    if arr.ndim != 3 or arr.shape[2] not in (3, 4):
        raise ValueError(f"expected an HxWx3 or HxWx4 image, got shape {arr.shape}")
    arr = arr.astype(np.uint8, copy=False)
    if arr.shape[2] == 3:
        alpha = np.full(arr.shape[:2] + (1,), 255, dtype=np.uint8)
        arr = np.concatenate([arr, alpha], axis=2)
    return arr.reshape(-1, 4)


def pixel_histogram(image, params: ColorParams | None = None) -> Counter:
    """Counts of packed 24-bit colors that survive the alpha and brightness filters."""
    params = params or ColorParams()
    px = _as_rgba(image)
    keep = px[:, 3] / 255.0 >= params.alphaThreshold
    px = px[keep]
    v = px[:, :3].max(axis=1) / 255.0
    px = px[(v <= params.brightWhite) & (v >= params.darkBlack)]
    packed = (px[:, 0].astype(np.int64) << 16) | (px[:, 1].astype(np.int64) << 8) | px[:, 2]
    values, counts = np.unique(packed, return_counts=True)
    return Counter(dict(zip(values.tolist(), counts.tolist())))


def extract_base_color(images: Iterable, params: ColorParams | None = None) -> tuple[RGB, bool]:
    """Most frequent surviving exact color across ``images``.

    Returns ``(rgb, fallback)``. Ties go to the lowest packed value, so the
    result does not depend on image order. With no surviving pixels the
    fallback hue is returned and the flag is set.
    """
    params = params or ColorParams()
    hist: Counter = Counter()
    for img in images:
        hist.update(pixel_histogram(img, params))
    if not hist:
        log.warning("no qualifying pixels; using fallback color")
        return tuple(params.fallbackHue), True
    best = min(hist.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    return ((best >> 16) & 255, (best >> 8) & 255, best & 255), False


def load_image(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        if im.mode in ("RGBA", "LA", "P") and (im.mode != "P" or "transparency" in im.info):
            return np.asarray(im.convert("RGBA"))
        return np.asarray(im.convert("RGB"))


# -- HSV movement --------------------------------------------------------

def adjust_hsv(h: float, s: float, v: float, params: ColorParams) -> tuple[float, float, float]:
    p = params
    if s <= p.grayThreshold:
        h = rgb_to_hsv(p.fallbackHue)[0]
        s = max(s, p.satFloor)

    if s < p.satTarget or s < p.satFloor:
        s = (1 - p.satBlend) * s + p.satBlend * p.satTarget
    s = min(max(s, p.satFloor), p.satCap)

    if v > p.targetV:
        d = v - p.targetV
        a = 1 - math.exp(-p.gamma * d)
        v = v - a * d
        if p.vCap is not None:
            v = min(v, p.vCap)

    v_floor = p.targetV - 0.02
    if v < v_floor:
        v = 0.7 * v + 0.3 * v_floor
    return h, s, v


def adjust_theme_color(rgb: RGB, params: ColorParams | None = None) -> RGB:
    params = params or ColorParams()
    return hsv_to_rgb(*adjust_hsv(*rgb_to_hsv(rgb), params))


def derive_theme(images: Iterable, params: ColorParams | None = None) -> ThemeColor:
    params = params or ColorParams()
    base, fallback = extract_base_color(images, params)
    return ThemeColor(adjust_theme_color(base, params), base, fallback)


def refine_parameters(base: ColorParams, overrides: Mapping[str, object] | None = None,
                      style_note: str = "") -> ColorParams:
    """Apply explicit parameter tweaks once, clamped to their safe ranges.

    The style note is kept verbatim as provenance; it does not change any
    value by itself.
    """
    overrides = dict(overrides or {})
    warnings = list(base.warnings)
    values = {}
    for name, raw in overrides.items():
        if name == "fallbackHue":
            values[name] = hex_to_rgb(raw) if isinstance(raw, str) else tuple(raw)
            continue
        if name not in SAFE_RANGES:
            raise ValueError(f"unknown color parameter {name!r}")
        val = float(raw)
        lo, hi = SAFE_RANGES[name]
        if not lo <= val <= hi:
            clamped = min(max(val, lo), hi)
            warnings.append(f"{name}={val:g} outside safe range [{lo:g}, {hi:g}]; "
                            f"clamped to {clamped:g}")
            val = clamped
        values[name] = val
    note = style_note if style_note else base.style_note
    return replace(base, **values, style_note=note, warnings=tuple(warnings))
