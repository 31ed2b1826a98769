#!/usr/bin/env python3
"""Regenerate the bundled generic-text corpora used by the fragment trend check.

train/<lang>.txt  word-frequency sampled text (wordfreq, CC BY-SA 4.0)
test/<lang>.txt   Universal Declaration of Human Rights prose (npm `udhr`)

Usage: build_generic_corpus.py <path-to-udhr-package> <out-dir>
"""
import html
import random
import re
import sys
from pathlib import Path

import wordfreq

# language label -> (wordfreq code, udhr declaration code)
LANGUAGES = {
    "german": ("de", "deu_1996"),
    "english": ("en", "eng"),
    "serbocroatian": ("sh", "hrv"),
    "italian": ("it", "ita"),
    "french": ("fr", "fra"),
    "polish": ("pl", "pol"),
    "spanish": ("es", "spa"),
    "danish": ("da", "dan"),
    "dutch": ("nl", "nld"),
    "swedish": ("sv", "swe"),
    "czechoslovak": ("cs", "ces"),
    "norwegian": ("nb", "nob"),
    "portuguese": ("pt", "por_PT"),
}

TRAIN_BYTES = 64 * 1024
VOCAB = 20000
SEED = 20070607


def sample_text(code: str, rng: random.Random) -> str:
    words = [w for w in wordfreq.top_n_list(code, VOCAB) if w.isalpha()]
    weights = [wordfreq.word_frequency(w, code) for w in words]
    lines, size = [], 0
    while size < TRAIN_BYTES:
        line = " ".join(rng.choices(words, weights, k=12))
        lines.append(line)
        size += len(line.encode()) + 1
    return "\n".join(lines) + "\n"


def declaration_text(path: Path) -> str:
    src = path.read_text(encoding="utf-8")
    paras = re.findall(r"<(?:p|li|h[1-4])>(.*?)</(?:p|li|h[1-4])>", src, re.S)
    out = [html.unescape(re.sub(r"<[^>]+>", "", p)).strip() for p in paras]
    return "\n".join(p for p in out if p) + "\n"


def main() -> None:
    udhr, out = Path(sys.argv[1]), Path(sys.argv[2])
    (out / "train").mkdir(parents=True, exist_ok=True)
    (out / "test").mkdir(parents=True, exist_ok=True)
    for label, (wf, decl) in LANGUAGES.items():
        rng = random.Random(f"{SEED}-{label}")
        (out / "train" / f"{label}.txt").write_text(sample_text(wf, rng), encoding="utf-8")
        text = declaration_text(udhr / "declaration" / f"{decl}.html")
        (out / "test" / f"{label}.txt").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    main()
