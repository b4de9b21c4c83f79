"""End-to-end run: arrange, consolidate, theme, score, render."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .arrange import arrange, load_json
from .deck import Deck, save_deck
from .geometry import GadParams, GadReport, score_deck
from .render import RenderOptions, _find_asset, render_svg
from .theme import ColorParams, ThemeColor, consolidate, derive_theme, load_image

log = logging.getLogger(__name__)

DECK_FILE = "deck.json"
GAD_FILE = "gad_report.json"
THEME_FILE = "theme.json"
CALIBRATION_FILE = "calibration.json"
REPORT_FILE = "report.json"
SLIDES_DIR = "slides"


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def write_json(path: Path, obj: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def deck_images(deck: Deck, images_dir, warnings: list[str]) -> list:
    """Decoded rasters for every distinct image/table asset the deck uses."""
    seen = []
    for s in deck.slides:
        for name in s.images + s.tables:
            if name not in seen:
                seen.append(name)
    out = []
    folder = Path(images_dir) if images_dir is not None else None
    for name in seen:
        path = _find_asset(name, folder)
        if path is None:
            warnings.append(f"theme: image {name!r} not found")
            continue
        out.append(load_image(path))
    return out


def write_slides(pages: Mapping[int, str], out_dir: Path) -> None:
    slides_dir = out_dir / SLIDES_DIR
    slides_dir.mkdir(parents=True, exist_ok=True)
    for index, svg in pages.items():
        (slides_dir / f"slide_{index}.svg").write_text(svg, encoding="utf-8")


@dataclass
class PipelineResult:
    deck: Deck
    gad: GadReport
    theme: ThemeColor
    warnings: list[str] = field(default_factory=list)


def run_pipeline(outline_path, manifest_path, images_dir, out_dir,
                 gad_params: GadParams | None = None,
                 color_params: ColorParams | None = None,
                 render_opts: RenderOptions | None = None) -> PipelineResult:
    """Run every stage, persisting each stage's output as soon as it exists.

    A failing stage raises PipelineError tagged with the stage name; files
    from earlier stages stay on disk.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    gad_params = gad_params or GadParams()
    color_params = color_params or ColorParams()
    render_opts = render_opts or RenderOptions(mode="full")
    warnings: list[str] = []

    def stage(name, fn, *args):
        try:
            return fn(*args)
        except PipelineError:
            raise
        except (ValueError, OSError, KeyError) as exc:
            raise PipelineError(name, str(exc)) from exc

    def _arrange():
        manifest = load_json(manifest_path) if manifest_path else {}
        return arrange(load_json(outline_path), manifest)

    deck = stage("arrange", _arrange)
    deck = stage("refine", consolidate, deck)
    save_deck(deck, out / DECK_FILE)

    def _theme():
        theme = derive_theme(deck_images(deck, images_dir, warnings), color_params)
        if theme.fallback:
            warnings.append("theme: no qualifying pixels, fallback color used")
        write_json(out / THEME_FILE, theme.to_json(color_params))
        return theme

    theme = stage("theme", _theme)

    def _score():
        report = score_deck(deck, gad_params)
        write_json(out / GAD_FILE, report.to_json())
        return report

    gad = stage("score", _score)

    def _render():
        opts = replace(render_opts, theme=theme.hex)
        pages, render_warnings = render_svg(deck, opts, images_dir)
        write_slides(pages, out)
        warnings.extend(render_warnings)

    stage("render", _render)
    write_json(out / REPORT_FILE, {"warnings": warnings})
    for w in warnings:
        log.warning(w)
    return PipelineResult(deck, gad, theme, warnings)
