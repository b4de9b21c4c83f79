"""In-memory deck model and its canonical JSON file format.

Decks are immutable. Geometry is normalized to the unit square with the
origin at the top-left corner of the page.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Any, Iterable, Sequence

ROLES = ("title", "agenda", "content", "section", "thanks")
REGION_KINDS = ("title_bar", "text", "image", "table", "formula")
ASSET_KINDS = ("image", "table", "formula")
STRUCTURAL_TEMPLATES = ("title", "agenda", "section", "thanks")

PRECISION = 6
_EPS = 1e-9


class DeckError(ValueError):
    """Base class for deck parsing and validation failures."""


class DeckParseError(DeckError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class DeckValidationError(DeckError):
    def __init__(self, rule: str, slide_index: int | None = None):
        where = f"slide {slide_index}: " if slide_index is not None else ""
        super().__init__(f"{where}{rule}")
        self.slide_index = slide_index
        self.rule = rule


def _round(v: float) -> float:
    # canonical precision; +0.0 normalizes negative zero
    return round(float(v), PRECISION) + 0.0


@dataclass(frozen=True)
class Region:
    kind: str
    x: float
    y: float
    w: float
    h: float
    payload: str = ""

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            object.__setattr__(self, name, _round(getattr(self, name)))

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return self.x, self.y, self.x + self.w, self.y + self.h

    def check(self) -> str | None:
        """Return the first violated geometry rule, or None if the region is valid."""
        if self.kind not in REGION_KINDS:
            return f"unknown region kind {self.kind!r}"
        if self.x < 0 or self.y < 0:
            return "region offset must be non-negative"
        if self.w <= 0 or self.h <= 0:
            return "region extent must be positive"
        if self.x + self.w > 1 + _EPS:
            return f"x + w = {self.x + self.w:.6f} exceeds 1"
        if self.y + self.h > 1 + _EPS:
            return f"y + h = {self.y + self.h:.6f} exceeds 1"
        return None


@dataclass(frozen=True)
class Bullet:
    text: str
    subs: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "subs", tuple(self.subs))


@dataclass(frozen=True)
class Slide:
    index: int
    role: str
    section: str | None = None
    subsection: str | None = None
    template: str | None = None
    bullets: tuple[Bullet, ...] = ()
    regions: tuple[Region, ...] = ()
    images: tuple[str, ...] = ()
    tables: tuple[str, ...] = ()
    formulas: tuple[str, ...] = ()
    notes: str | None = None

    def __post_init__(self):
        for name in ("bullets", "regions", "images", "tables", "formulas"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def has_assets(self) -> bool:
        return bool(self.images or self.tables or self.formulas)

    def validate(self) -> None:
        if self.role not in ROLES:
            raise DeckValidationError(f"unknown role {self.role!r}", self.index)
        if self.role != "content" and self.template is not None \
                and self.template not in STRUCTURAL_TEMPLATES:
            raise DeckValidationError(
                f"{self.role} slide must use a structural template, got {self.template!r}",
                self.index)
        for r in self.regions:
            problem = r.check()
            if problem:
                raise DeckValidationError(problem, self.index)
        pools = {"image": self.images, "table": self.tables, "formula": self.formulas}
        for kind, names in pools.items():
            if len(set(names)) != len(names):
                raise DeckValidationError(f"duplicate {kind} asset", self.index)
        for r in self.regions:
            if r.kind not in ASSET_KINDS:
                continue
            hits = sum(r.payload in names for names in pools.values())
            if hits != 1:
                raise DeckValidationError(
                    f"asset {r.payload!r} must appear in exactly one of images/tables/formulas",
                    self.index)


@dataclass(frozen=True)
class Deck:
    title: str
    slides: tuple[Slide, ...]
    aspect: str = "16:9"

    def __post_init__(self):
        object.__setattr__(self, "slides", tuple(self.slides))

    def validate(self) -> "Deck":
        slides = self.slides
        if len(slides) < 3:
            raise DeckValidationError(f"a deck needs at least 3 slides, got {len(slides)}")
        for pos, s in enumerate(slides, start=1):
            if s.index != pos:
                raise DeckValidationError(
                    f"slide indices must be 1-based and contiguous, expected {pos}", s.index)
        expected = {0: "title", 1: "agenda", len(slides) - 1: "thanks"}
        for pos, s in enumerate(slides):
            want = expected.get(pos)
            if want is not None and s.role != want:
                raise DeckValidationError(f"role must be {want}, got {s.role}", s.index)
            if want is None and s.role not in ("content", "section"):
                raise DeckValidationError(
                    f"inner slides must be content or section, got {s.role}", s.index)
            s.validate()
        return self

    def renumbered(self) -> "Deck":
        return replace(self, slides=tuple(
            replace(s, index=i) for i, s in enumerate(self.slides, start=1)))


def scorable_slides(deck: Deck) -> list[Slide]:
    """Slides that take part in layout scoring: content pages only."""
    return [s for s in deck.slides if s.role == "content"]


# -- parsing ---------------------------------------------------------------

def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def _need(obj: dict, key: str, types, where: str):
    if key not in obj:
        raise DeckError(f"{where}: missing key {key!r}")
    val = obj[key]
    if not isinstance(val, types) or isinstance(val, bool) and types is not bool:
        raise DeckError(f"{where}: {key!r} has wrong type {type(val).__name__}")
    return val


def _opt_str(obj: dict, key: str, where: str) -> str | None:
    val = obj.get(key)
    if val is not None and not isinstance(val, str):
        raise DeckError(f"{where}: {key!r} must be a string or null")
    return val


def _str_list(obj: dict, key: str, where: str) -> tuple[str, ...]:
    val = obj.get(key, [])
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise DeckError(f"{where}: {key!r} must be a list of strings")
    return tuple(val)


def bullet_from_json(raw: Any) -> Bullet:
    if isinstance(raw, str):
        return Bullet(raw)
    if not isinstance(raw, dict):
        raise DeckError("bullet must be a string or an object")
    text = _need(raw, "text", str, "bullet")
    return Bullet(text, _str_list(raw, "subs", "bullet"))


def region_from_json(raw: Any, where: str = "region") -> Region:
    if not isinstance(raw, dict):
        raise DeckError(f"{where}: must be an object")
    kind = _need(raw, "kind", str, where)
    nums = [_need(raw, k, (int, float), where) for k in ("x", "y", "w", "h")]
    payload = raw.get("payload", "")
    if not isinstance(payload, str):
        raise DeckError(f"{where}: payload must be a string")
    return Region(kind, *nums, payload=payload)


def slide_from_json(raw: Any) -> Slide:
    if not isinstance(raw, dict):
        raise DeckError("slide must be an object")
    index = _need(raw, "index", int, "slide")
    where = f"slide {index}"
    bullets = raw.get("bullets", [])
    regions = raw.get("regions", [])
    if not isinstance(bullets, list) or not isinstance(regions, list):
        raise DeckError(f"{where}: bullets and regions must be lists")
    return Slide(
        index=index,
        role=_need(raw, "role", str, where),
        section=_opt_str(raw, "section", where),
        subsection=_opt_str(raw, "subsection", where),
        template=_opt_str(raw, "template", where),
        bullets=tuple(bullet_from_json(b) for b in bullets),
        regions=tuple(region_from_json(r, where) for r in regions),
        images=_str_list(raw, "images", where),
        tables=_str_list(raw, "tables", where),
        formulas=_str_list(raw, "formulas", where),
        notes=_opt_str(raw, "notes", where),
    )


def deck_from_json(obj: Any) -> Deck:
    if not isinstance(obj, dict):
        raise DeckError("deck document must be a JSON object")
    slides = _need(obj, "slides", list, "deck")
    deck = Deck(
        title=_need(obj, "title", str, "deck"),
        aspect=obj.get("aspect", "16:9"),
        slides=tuple(slide_from_json(s) for s in slides),
    )
    return deck.validate()


def parse_deck(text: str | bytes) -> Deck:
    """Parse and validate a deck document.

    Raises DeckParseError (with a byte offset) for malformed JSON and
    DeckValidationError for documents that break a deck invariant.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DeckParseError(exc.msg, _byte_offset(text, exc.pos)) from None
    return deck_from_json(obj)


# -- canonical serialization ----------------------------------------------

def _num(v: float) -> str:
    return f"{_round(v):.{PRECISION}f}"


def _s(v: str | None) -> str:
    return json.dumps(v, ensure_ascii=False)


def _str_array(items: Iterable[str]) -> str:
    return "[" + ", ".join(_s(i) for i in items) + "]"


def _region_json(r: Region) -> str:
    return ('{"kind": %s, "x": %s, "y": %s, "w": %s, "h": %s, "payload": %s}'
            % (_s(r.kind), _num(r.x), _num(r.y), _num(r.w), _num(r.h), _s(r.payload)))


def _block(items: Sequence[str], indent: str) -> str:
    if not items:
        return "[]"
    inner = ",\n".join(indent + "  " + i for i in items)
    return "[\n" + inner + "\n" + indent + "]"


def _slide_json(s: Slide, indent: str) -> str:
    pad = indent + "  "
    bullets = [
        '{"text": %s, "subs": %s}' % (_s(b.text), _str_array(b.subs)) for b in s.bullets
    ]
    fields = [
        f'"index": {s.index}',
        f'"role": {_s(s.role)}',
        f'"section": {_s(s.section)}',
        f'"subsection": {_s(s.subsection)}',
        f'"template": {_s(s.template)}',
        f'"bullets": {_block(bullets, pad)}',
        f'"regions": {_block([_region_json(r) for r in s.regions], pad)}',
        f'"images": {_str_array(s.images)}',
        f'"tables": {_str_array(s.tables)}',
        f'"formulas": {_str_array(s.formulas)}',
        f'"notes": {_s(s.notes)}',
    ]
    return "{\n" + ",\n".join(pad + f for f in fields) + "\n" + indent + "}"


def serialize_deck(deck: Deck) -> str:
    """Canonical text form: fixed key order, fixed numeric precision, trailing newline."""
    slides = [_slide_json(s, "    ") for s in deck.slides]
    return (
        "{\n"
        f'  "title": {_s(deck.title)},\n'
        f'  "aspect": {_s(deck.aspect)},\n'
        f'  "slides": {_block(slides, "  ")}\n'
        "}\n"
    )


def load_deck(path) -> Deck:
    with open(path, encoding="utf-8") as fh:
        return parse_deck(fh.read())


def save_deck(deck: Deck, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_deck(deck))
