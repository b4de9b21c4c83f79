"""Command-line entry point: ``slidegeom <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import calibration as cal
from .arrange import ArrangeError, arrange, load_json
from .deck import DeckError, load_deck, save_deck
from .geometry import GadParams, score_deck
from .pipeline import (CALIBRATION_FILE, DECK_FILE, GAD_FILE, THEME_FILE, PipelineError,
                       run_pipeline, write_json, write_slides)
from .render import RenderOptions, render_svg
from .templates import TemplateError, load_catalog
from .theme import ColorParams, consolidate, derive_theme, load_image, refine_parameters

log = logging.getLogger("slidegeom")

IMAGE_GLOBS = ("*.png", "*.jpg", "*.jpeg")


def _gad_flags(p: argparse.ArgumentParser) -> None:
    d = GadParams()
    p.add_argument("--tau", type=float, default=d.tau, help="target occupancy")
    p.add_argument("--a-min", type=float, default=d.a_min, help="region area gate")
    p.add_argument("--m-star", type=int, default=d.m_star, help="preferred region count")
    p.add_argument("--kappa", type=float, default=d.kappa, help="fragmentation width")
    p.add_argument("--lambda1", type=float, default=d.lambda1,
                   help="occupancy weight; the fragmentation weight is 1 - lambda1")


def _gad_params(args) -> GadParams:
    return GadParams.with_lambda1(args.lambda1, a_min=args.a_min, tau=args.tau,
                                  m_star=args.m_star, kappa=args.kappa)


def _color_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="NAME=VALUE",
                   help="color parameter override, clamped to its safe range (repeatable)")
    p.add_argument("--style", default="", help="style note kept as provenance")


def _color_params(args) -> ColorParams:
    overrides = {}
    for item in args.overrides:
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects NAME=VALUE, got {item!r}")
        overrides[name.strip()] = value.strip() if name.strip() == "fallbackHue" else float(value)
    params = refine_parameters(ColorParams(), overrides, args.style)
    for w in params.warnings:
        log.warning(w)
    return params


def _render_flags(p: argparse.ArgumentParser, mode: str) -> None:
    p.add_argument("--mode", choices=("full", "blocks"), default=mode)
    p.add_argument("--width", type=float, default=1280)
    p.add_argument("--height", type=float, default=720)


def _image_paths(items) -> list[Path]:
    paths = []
    for item in items:
        item = Path(item)
        if item.is_dir():
            paths.extend(sorted(p for g in IMAGE_GLOBS for p in item.glob(g)))
        else:
            paths.append(item)
    return paths


def cmd_arrange(args) -> int:
    catalog = load_catalog(args.catalog)
    manifest = load_json(args.manifest) if args.manifest else {}
    deck = arrange(load_json(args.outline), manifest, catalog)
    save_deck(deck, args.out)
    return 0


def cmd_refine(args) -> int:
    save_deck(consolidate(load_deck(args.deck)), args.out)
    return 0


def cmd_theme(args) -> int:
    params = _color_params(args)
    theme = derive_theme([load_image(p) for p in _image_paths(args.images)], params)
    if theme.fallback:
        log.warning("no qualifying pixels; fallback color used")
    report = theme.to_json(params)
    if args.out:
        write_json(Path(args.out), report)
    print(theme.hex)
    return 0


def cmd_score(args) -> int:
    params = _gad_params(args)
    reports = {}
    for path in args.decks:
        report = score_deck(load_deck(path), params)
        reports[str(path)] = report.to_json()
        flag = "  (no content slides)" if report.empty else ""
        print(f"{path}\tGAD={report.deck_gad:.4f}{flag}")
    if args.out:
        single = len(reports) == 1
        write_json(Path(args.out), next(iter(reports.values())) if single else reports)
    return 0


def cmd_calibrate(args) -> int:
    targets = cal.aggregate_targets(cal.read_ratings(args.ratings), rescale=not args.raw_z)
    feat = Path(args.features)
    if feat.is_dir():
        features = cal.features_from_decks(sorted(feat.glob("*.json")), args.a_min)
    else:
        features = cal.read_features(feat)
    pages = cal.build_pages(targets, features)
    grid = cal.GridSpec(args.m_min, args.m_max, args.kappa_min, args.kappa_max, args.kappa_step)
    result = cal.select_and_fit(pages, args.tau, grid)
    out = {"tau": args.tau, "a_min": args.a_min, "n_pages": len(pages),
           "grid": grid.__dict__, "selected": result.to_json()}
    try:
        out["lambda"] = list(cal.weights_from_coefficients(result.b1, result.b2))
    except cal.WeightDerivationError as exc:
        out["lambda"] = None
        log.warning("cannot derive weights: %s", exc)
    if args.lodo:
        lodo = cal.lodo_evaluate(pages, args.tau, grid)
        out["lodo"] = lodo.to_json()
        for deck_id, reason in lodo.failed.items():
            log.warning("fold %s failed: %s", deck_id, reason)
    out_dir = Path(args.out)
    write_json(out_dir / CALIBRATION_FILE, out)
    print(f"M*={result.m_star} kappa={result.kappa:g} a={result.a:.4f} "
          f"b1={result.b1:.4f} b2={result.b2:.4f}")
    if args.lodo and out["lodo"]["global"]:
        g = out["lodo"]["global"]
        print(f"LODO pearson={g['pearson']:.3f} spearman={g['spearman']:.3f} rmse={g['rmse']:.3f}")
    return 0


def cmd_render(args) -> int:
    deck = load_deck(args.deck)
    opts = RenderOptions(width=args.width, height=args.height, mode=args.mode)
    pages, warnings = render_svg(deck, opts, args.images_dir)
    write_slides(pages, Path(args.out))
    for w in warnings:
        log.warning(w)
    return 0


def cmd_pipeline(args) -> int:
    opts = RenderOptions(width=args.width, height=args.height, mode=args.mode)
    result = run_pipeline(args.outline, args.manifest, args.images_dir, args.out,
                          _gad_params(args), _color_params(args), opts)
    print(f"GAD={result.gad.deck_gad:.4f} theme={result.theme.hex} "
          f"slides={len(result.deck.slides)} warnings={len(result.warnings)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slidegeom", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("arrange", help="lay out an outline into a deck file")
    p.add_argument("--outline", required=True)
    p.add_argument("--manifest")
    p.add_argument("--catalog", help="template catalog JSON (default: built-in)")
    p.add_argument("--out", default=DECK_FILE)
    p.set_defaults(func=cmd_arrange)

    p = sub.add_parser("refine", help="merge consecutive text-only slides")
    p.add_argument("--deck", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("theme", help="derive a theme color from images")
    p.add_argument("--images", nargs="+", required=True, help="image files or directories")
    p.add_argument("--out", help=f"write the report here (e.g. {THEME_FILE})")
    _color_flags(p)
    p.set_defaults(func=cmd_theme)

    p = sub.add_parser("score", help="compute the geometry-aware density of decks")
    p.add_argument("decks", nargs="+")
    p.add_argument("--out", help=f"write the report here (e.g. {GAD_FILE})")
    _gad_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("calibrate", help="fit the metric to human ratings")
    p.add_argument("--ratings", required=True)
    p.add_argument("--features", required=True, help="features CSV or a directory of deck files")
    p.add_argument("--tau", type=float, default=0.55)
    p.add_argument("--a-min", type=float, default=0.04)
    g = cal.GridSpec()
    p.add_argument("--m-min", type=int, default=g.m_min)
    p.add_argument("--m-max", type=int, default=g.m_max)
    p.add_argument("--kappa-min", type=float, default=g.kappa_min)
    p.add_argument("--kappa-max", type=float, default=g.kappa_max)
    p.add_argument("--kappa-step", type=float, default=g.kappa_step)
    p.add_argument("--lodo", action="store_true", help="also run leave-one-deck-out evaluation")
    p.add_argument("--raw-z", action="store_true", help="fit on mean z-scores, not the 1-5 scale")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("render", help="render slides to SVG")
    p.add_argument("--deck", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--images-dir")
    _render_flags(p, "blocks")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("pipeline", help="arrange, refine, theme, score and render")
    p.add_argument("--outline", required=True)
    p.add_argument("--manifest")
    p.add_argument("--images-dir")
    p.add_argument("--out", required=True)
    _gad_flags(p)
    _color_flags(p)
    _render_flags(p, "full")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 1
    except (DeckError, ArrangeError, TemplateError, cal.CalibrationError,
            ValueError, OSError) as exc:
        print(f"error [{args.command}] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
