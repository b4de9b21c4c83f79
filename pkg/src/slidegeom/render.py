"""SVG rendering of slides, either as full pages or as kind-colored blocks."""

from __future__ import annotations

import base64
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .deck import Deck, Region, Slide

DEFAULT_COLORS = {
    "title_bar": "#2b5fa6",
    "text": "#f4b942",
    "image": "#4caf50",
    "table": "#26a69a",
    "formula": "#ab47bc",
}
ASPECTS = {"16:9": 16 / 9, "4:3": 4 / 3}
IMAGE_SUFFIXES = ("", ".png", ".jpg", ".jpeg")
MIME = {".png": "image/png", ".jpg": "image/jpeg", ".jpeg": "image/jpeg"}

# header band drawn when a slide has no title bar of its own
DEFAULT_TITLE_BAND = (0.05, 0.05, 0.90, 0.12)


@dataclass(frozen=True)
class RenderOptions:
    width: float = 1280
    height: float = 720
    mode: str = "blocks"
    colors: dict = field(default_factory=lambda: dict(DEFAULT_COLORS))
    theme: str | None = None

    def check(self, aspect: str = "16:9") -> None:
        if self.mode not in ("full", "blocks"):
            raise ValueError(f"unknown render mode {self.mode!r}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("page size must be positive")
        ratio = ASPECTS.get(aspect)
        if ratio is None:
            raise ValueError(f"unsupported aspect {aspect!r}")
        # allow one output unit of rounding slack
        if abs(self.height - self.width / ratio) > 1.0:
            raise ValueError(f"{self.width}x{self.height} does not match aspect {aspect}")

    def fill(self, kind: str) -> str:
        if kind == "title_bar" and self.theme:
            return self.theme
        return self.colors.get(kind, "#999999")


def fmt(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def scale(region: Region, opts: RenderOptions) -> tuple[float, float, float, float]:
    return (region.x * opts.width, region.y * opts.height,
            region.w * opts.width, region.h * opts.height)


def _rect(x, y, w, h, fill, extra="") -> str:
    return (f'<rect x="{fmt(x)}" y="{fmt(y)}" width="{fmt(w)}" height="{fmt(h)}" '
            f'fill="{fill}"{extra}/>')


def _find_asset(name: str, images_dir: Path | None) -> Path | None:
    if images_dir is None:
        return None
    for suffix in IMAGE_SUFFIXES:
        p = images_dir / (name + suffix)
        if p.is_file():
            return p
    return None


def _text_lines(x, y, w, h, body: str, size: float, css: str = "") -> list[str]:
    out = []
    lines = body.split("\n") if body else []
    max_lines = max(1, int(h // (size * 1.3)))
    for k, line in enumerate(lines[:max_lines]):
        ty = y + size * (1.2 + 1.3 * k)
        out.append(f'<text x="{fmt(x + size * 0.5)}" y="{fmt(ty)}" font-size="{fmt(size)}"'
                   f' font-family="sans-serif"{css}>{escape(line)}</text>')
    return out


def _full_region(r: Region, opts: RenderOptions, images_dir: Path | None,
                 slide: Slide, warnings: list[str]) -> list[str]:
    x, y, w, h = scale(r, opts)
    size = opts.height / 36
    if r.kind == "title_bar":
        return [_rect(x, y, w, h, opts.fill("title_bar")),
                *_text_lines(x, y + h / 2 - size, w, h, r.payload, size * 1.4,
                             ' fill="#ffffff" font-weight="bold"')]
    if r.kind == "text":
        return _text_lines(x, y, w, h, r.payload, size)
    if r.kind == "formula":
        return [_rect(x, y, w, h, "#f7f7f7", ' stroke="#cccccc"'),
                *_text_lines(x, y, w, h, r.payload, size, ' font-style="italic"')]
    path = _find_asset(r.payload, images_dir)
    if path is None:
        warnings.append(f"slide {slide.index}: missing asset {r.payload!r}")
        return [_rect(x, y, w, h, "#dddddd", ' stroke="#888888" stroke-dasharray="6 4"'),
                *_text_lines(x, y, w, h, f"[{r.payload}]", size)]
    data = base64.b64encode(path.read_bytes()).decode("ascii")
    mime = MIME.get(path.suffix.lower(), "image/png")
    return [f'<image x="{fmt(x)}" y="{fmt(y)}" width="{fmt(w)}" height="{fmt(h)}" '
            f'preserveAspectRatio="xMidYMid meet" href="data:{mime};base64,{data}"/>']


def render_slide(slide: Slide, opts: RenderOptions, images_dir=None,
                 warnings: list[str] | None = None) -> str:
    """One standalone SVG document for ``slide``."""
    warnings = warnings if warnings is not None else []
    images_dir = Path(images_dir) if images_dir is not None else None
    W, H = opts.width, opts.height
    body = [_rect(0, 0, W, H, "#ffffff")]
    if not any(r.kind == "title_bar" for r in slide.regions):
        band = Region("title_bar", *DEFAULT_TITLE_BAND, payload=slide.subsection or "")
        body.append(_rect(*scale(band, opts), opts.fill("title_bar"), ' class="chrome"'))
    for r in slide.regions:
        if opts.mode == "blocks":
            body.append(_rect(*scale(r, opts), opts.fill(r.kind),
                              f' class={quoteattr(r.kind)} stroke="#333333" stroke-width="1"'))
        else:
            body.extend(_full_region(r, opts, images_dir, slide, warnings))
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt(W)}" height="{fmt(H)}" '
            f'viewBox="0 0 {fmt(W)} {fmt(H)}">')
    return "\n".join([head, *("  " + b for b in body), "</svg>"]) + "\n"


def render_svg(deck: Deck, opts: RenderOptions | None = None,
               images_dir=None) -> tuple[dict[int, str], list[str]]:
    """Render every slide; returns ``({index: svg}, warnings)``."""
    opts = opts or RenderOptions()
    opts.check(deck.aspect)
    warnings: list[str] = []
    pages = {s.index: render_slide(s, opts, images_dir, warnings) for s in deck.slides}
    return pages, warnings
