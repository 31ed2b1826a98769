#!/usr/bin/env python3
"""Regenerate the bundled toy name corpora (Faker person-name lists, MIT).

toy_names.tsv   raw `name<TAB>nationality` dump, 13 languages plus noise lines
toy_pl_it.tsv   50 Polish + 50 Italian names as `name<TAB>language<TAB>full`

Usage: build_toy_names.py <out-dir>
"""
import sys
from pathlib import Path

from faker import Faker

NATIONALITIES = [
    ("Germany", "de_DE"), ("England", "en_GB"), ("Croatia", "hr_HR"),
    ("Italy", "it_IT"), ("France", "fr_FR"), ("Poland", "pl_PL"),
    ("Spain", "es_ES"), ("Denmark", "da_DK"), ("Netherlands", "nl_NL"),
    ("Sweden", "sv_SE"), ("Czech Republic", "cs_CZ"), ("Norway", "no_NO"),
    ("Portugal", "pt_PT"),
]
PER_NATIONALITY = 14


def person(fake: Faker) -> str:
    return f"{fake.first_name()} {fake.last_name()}"


def main() -> None:
    out = Path(sys.argv[1])
    lines = []
    for i, (nat, loc) in enumerate(NATIONALITIES):
        fake = Faker(loc)
        fake.seed_instance(100 + i)
        seen = set()
        while len(seen) < PER_NATIONALITY:
            name = person(fake)
            if name not in seen:
                seen.add(name)
                lines.append(f"{name}\t{nat}")
    swiss = Faker("de_CH")
    swiss.seed_instance(7)
    lines += [f"{person(swiss)}\tSwitzerland" for _ in range(3)]
    greek = Faker("el_GR")
    greek.seed_instance(8)
    lines += [f"{person(greek)}\tGreece" for _ in range(2)]
    lines.append("no nationality column here")
    (out / "toy_names.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    rows = []
    for label, loc in (("polish", "pl_PL"), ("italian", "it_IT")):
        fake = Faker(loc)
        fake.seed_instance(2007)
        seen = []
        while len(seen) < 50:
            name = person(fake)
            if name not in seen and "Szczepan" not in name:
                seen.append(name)
        rows += [f"{n}\t{label}\tfull" for n in seen]
    (out / "toy_pl_it.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
