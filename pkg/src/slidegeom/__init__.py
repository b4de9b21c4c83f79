"""Deterministic slide arrangement, refinement and layout-density scoring."""

from .deck import Deck, Region, Slide, parse_deck, scorable_slides, serialize_deck
from .geometry import GadParams, GadReport, score_deck

__all__ = [
    "Deck", "Region", "Slide", "parse_deck", "serialize_deck", "scorable_slides",
    "GadParams", "GadReport", "score_deck",
]
__version__ = "0.1.0"
