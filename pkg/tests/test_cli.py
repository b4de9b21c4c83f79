import csv
import json
from pathlib import Path

import numpy as np
import pytest

from slidegeom.cli import main

FIX = Path(__file__).parent / "fixtures"
OUTLINE, MANIFEST, IMAGES = FIX / "outline.json", FIX / "manifest.json", FIX / "images"

GOLDEN_LAYOUT = [
    ("title", "title"), ("agenda", "agenda"), ("section", "section"),
    ("content", "T19_2Text"), ("section", "section"), ("content", "T2_ImageRight"),
    ("content", "T15_ImageLeft_1Formula"), ("section", "section"),
    ("content", "T2_ImageRight"), ("thanks", "thanks"),
]


def run_pipeline(out, *extra):
    return main(["pipeline", "--outline", str(OUTLINE), "--manifest", str(MANIFEST),
                 "--images-dir", str(IMAGES), "--out", str(out), *extra])


def test_pipeline_golden_fixture(tmp_path, capsys):
    assert run_pipeline(tmp_path) == 0
    deck = json.loads((tmp_path / "deck.json").read_text())
    assert [(s["role"], s["template"]) for s in deck["slides"]] == GOLDEN_LAYOUT
    gad = json.loads((tmp_path / "gad_report.json").read_text())
    assert len(gad["slides"]) == 4
    assert gad["deck_gad"] == pytest.approx(0.7343, abs=1e-4)
    theme = json.loads((tmp_path / "theme.json").read_text())
    assert theme["theme"].startswith("#") and len(theme["theme"]) == 7
    assert sorted(p.name for p in (tmp_path / "slides").iterdir()) == \
        sorted(f"slide_{i}.svg" for i in range(1, 11))
    assert json.loads((tmp_path / "report.json").read_text()) == {"warnings": []}
    assert "GAD=0.7343" in capsys.readouterr().out


def test_empty_outline_fails_at_arrange(tmp_path, capsys):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"title": "x", "sections": []}))
    rc = main(["pipeline", "--outline", str(empty), "--out", str(tmp_path / "out")])
    assert rc == 1
    assert "[arrange]" in capsys.readouterr().err


def test_missing_images_warn_but_succeed(tmp_path):
    assert main(["pipeline", "--outline", str(OUTLINE), "--manifest", str(MANIFEST),
                 "--out", str(tmp_path)]) == 0
    warnings = json.loads((tmp_path / "report.json").read_text())["warnings"]
    assert any("missing asset" in w for w in warnings)


def test_stepwise_commands(tmp_path, capsys):
    deck, refined = tmp_path / "deck.json", tmp_path / "refined.json"
    assert main(["arrange", "--outline", str(OUTLINE), "--manifest", str(MANIFEST),
                 "--out", str(deck)]) == 0
    assert len(json.loads(deck.read_text())["slides"]) == 11
    assert main(["refine", "--deck", str(deck), "--out", str(refined)]) == 0
    assert len(json.loads(refined.read_text())["slides"]) == 10

    assert main(["score", str(refined), "--out", str(tmp_path / "gad.json"), "--tau", "0.5"]) == 0
    assert "GAD=" in capsys.readouterr().out
    assert json.loads((tmp_path / "gad.json").read_text())["deck_gad"] > 0

    assert main(["theme", "--images", str(IMAGES), "--out", str(tmp_path / "theme.json"),
                 "--set", "targetV=0.1", "--style", "calm"]) == 0
    theme = json.loads((tmp_path / "theme.json").read_text())
    assert theme["params"]["targetV"] == 0.30
    assert theme["params"]["style_note"] == "calm"
    assert theme["params"]["warnings"]

    assert main(["render", "--deck", str(refined), "--out", str(tmp_path / "r"),
                 "--width", "1000", "--height", "562"]) == 0
    assert len(list((tmp_path / "r" / "slides").glob("*.svg"))) == 10


def test_score_flags_change_result(tmp_path, capsys):
    deck = tmp_path / "deck.json"
    main(["arrange", "--outline", str(OUTLINE), "--manifest", str(MANIFEST), "--out", str(deck)])
    capsys.readouterr()
    main(["score", str(deck)])
    a = capsys.readouterr().out
    main(["score", str(deck), "--m-star", "2", "--kappa", "3", "--lambda1", "0.9",
          "--a-min", "0.1"])
    assert capsys.readouterr().out != a


def test_invalid_deck_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["score", str(bad)]) == 1
    assert "error [score]" in capsys.readouterr().err


def test_calibrate_command(tmp_path, capsys):
    rng = np.random.default_rng(3)
    ratings, features = tmp_path / "ratings.csv", tmp_path / "features.csv"
    with open(ratings, "w", newline="") as r, open(features, "w", newline="") as f:
        rw, fw = csv.writer(r), csv.writer(f)
        rw.writerow(["rater_id", "deck_id", "page_id", "score"])
        fw.writerow(["deck_id", "page_id", "rho", "m_eff"])
        for d in range(3):
            for p in range(20):
                rho, m = float(rng.uniform(0.2, 0.9)), int(rng.integers(0, 8))
                fw.writerow([f"d{d}", p, rho, m])
                base = 1.1 + 2.2 * (1 - abs(rho - 0.55)) + 1.6 * max(0, 1 - (m - 4) ** 2 / 6.3)
                for rater in ("r1", "r2"):
                    score = min(5, max(1, base + rng.normal(0, 0.1)))
                    rw.writerow([rater, f"d{d}", p, round(score, 3)])
    rc = main(["calibrate", "--ratings", str(ratings), "--features", str(features),
               "--m-min", "3", "--m-max", "5", "--kappa-min", "5", "--kappa-max", "7",
               "--kappa-step", "0.5", "--lodo", "--out", str(tmp_path)])
    assert rc == 0
    out = json.loads((tmp_path / "calibration.json").read_text())
    assert out["selected"]["m_star"] == 4
    assert out["lambda"] and sum(out["lambda"]) == pytest.approx(1.0)
    assert out["lodo"]["failed"] == {}
    assert "LODO pearson=" in capsys.readouterr().out


def test_calibrate_from_deck_directory(tmp_path):
    decks = tmp_path / "decks"
    decks.mkdir()
    for name in ("a", "b"):
        main(["arrange", "--outline", str(OUTLINE), "--manifest", str(MANIFEST),
              "--out", str(decks / f"{name}.json")])
    ratings = tmp_path / "ratings.csv"
    rows = ["rater_id,deck_id,page_id,score"]
    for deck_id, pages in (("a", (4, 5, 7, 8, 10)), ("b", (4, 5, 7, 8, 10))):
        for k, page in enumerate(pages):
            rows.append(f"r1,{deck_id},{page},{1 + (k * 7 + len(deck_id)) % 5}")
    ratings.write_text("\n".join(rows) + "\n")
    rc = main(["calibrate", "--ratings", str(ratings), "--features", str(decks),
               "--m-min", "1", "--m-max", "3", "--kappa-min", "1", "--kappa-max", "2",
               "--kappa-step", "0.5", "--out", str(tmp_path)])
    assert rc == 0
    out = json.loads((tmp_path / "calibration.json").read_text())
    assert out["n_pages"] == 10
    assert 1 <= out["selected"]["m_star"] <= 3
