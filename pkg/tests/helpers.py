"""Random deck generators shared by the test modules."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from slidegeom.deck import Bullet, Deck, Region, Slide


def random_box(rng, max_side=0.6):
    w = round(float(rng.uniform(0.01, max_side)), 6)
    h = round(float(rng.uniform(0.01, max_side)), 6)
    x = round(float(rng.uniform(0, 1 - w)), 6)
    y = round(float(rng.uniform(0, 1 - h)), 6)
    return x, y, w, h


def random_content_slide(rng, index, p_assets=0.5, max_regions=8):
    regions = [Region("title_bar", 0.05, 0.05, 0.9, 0.12, f"Slide {index}")]
    images, tables, formulas = [], [], []
    bullets = tuple(Bullet(f"b{index}.{k}", tuple(f"s{index}.{k}.{j}" for j in range(rng.integers(0, 3))))
                    for k in range(rng.integers(0, 5)))
    for k in range(rng.integers(0, max_regions)):
        box = random_box(rng)
        if rng.random() < p_assets:
            kind = ["image", "table", "formula"][rng.integers(0, 3)]
            name = f"{kind}_{index}_{k}"
            {"image": images, "table": tables, "formula": formulas}[kind].append(name)
            regions.append(Region(kind, *box, payload=name))
        else:
            regions.append(Region("text", *box, payload="body"))
    return Slide(index=index, role="content", subsection=f"Sub {index}", template=None,
                 bullets=bullets, regions=tuple(regions), images=tuple(images),
                 tables=tuple(tables), formulas=tuple(formulas),
                 notes=None if rng.random() < 0.5 else f"note {index}")


def random_deck(rng, n_inner=None, p_assets=0.5, p_section=0.15) -> Deck:
    n_inner = int(rng.integers(0, 12)) if n_inner is None else n_inner
    slides = [Slide(1, "title", template="title",
                    regions=(Region("title_bar", 0.05, 0.3, 0.9, 0.2, "Deck"),)),
              Slide(2, "agenda", template="agenda", bullets=(Bullet("Intro"),))]
    for k in range(n_inner):
        idx = len(slides) + 1
        if rng.random() < p_section:
            slides.append(Slide(idx, "section", section=f"Part {k}", template="section"))
        else:
            slides.append(random_content_slide(rng, idx, p_assets))
    slides.append(Slide(len(slides) + 1, "thanks", template="thanks"))
    return Deck("Random deck", tuple(slides)).validate()


@st.composite
def decks(draw, p_assets=0.5):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_deck(np.random.default_rng(seed), p_assets=p_assets)
