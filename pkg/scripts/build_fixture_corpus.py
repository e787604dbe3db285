#!/usr/bin/env python3
"""Regenerate the bundled Alberta-towns fixture corpus.

Writes the table CSV, the CTA/CEA target files, the gold annotation
files, and the snapshot the offline backend serves. Entity ids follow
Wikidata conventions but the snapshot is a self-contained extract: every
id referenced by a claim resolves inside the file.

Run from the repository root:

    python scripts/build_fixture_corpus.py [--root fixtures/alberta]
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tabkg.kg_backend import ClaimValue, EntityRecord, record_to_json
from tabkg.submission import ENTITY_IRI_PREFIX

TABLE_ID = "alberta_towns"

# Table rows: col0 town, col1 description, col2 country, col3 neighbor,
# col4 elevation, col5 province. Row 2 carries the deliberate noise the
# corpus is known for: "town in clberta" and a capitalized "Canada" among
# lowercase ones.
TABLE_ROWS = [
    ["Grande Prairie", "city in Alberta", "canada", "Sexsmith", "650", "Alberta"],
    ["Sundre", "town in Alberta", "canada", "Mountain View County", "1093", "Alberta"],
    ["Peace River", "town in clberta", "Canada", "Northern Sunrise County", "330", "Alberta"],
    ["Vegreville", "town in Alberta", "canada", "Mundare", "635", "Alberta"],
]

CANADA = "Q16"
ALBERTA = "Q1951"
TOWN_IN_ALBERTA = "Q17343829"
LIST_OF_TOWNS = "Q15219391"
VILLAGE_IN_ALBERTA = "Q6644696"
CITY_IN_ALBERTA = "Q55440238"
RIVER = "Q4022"
MUNICIPAL_DISTRICT = "Q1132296"

GRANDE_PRAIRIE = "Q205466"
SUNDRE = "Q2339463"
PEACE_RIVER_TOWN = "Q1013064"
PEACE_RIVER_RIVER = "Q1265224"
VEGREVILLE = "Q1010806"
SEXSMITH = "Q1015487"
MOUNTAIN_VIEW = "Q1915071"
NORTHERN_SUNRISE = "Q1954098"
MUNDARE = "Q1016167"

ENTITY_CELL_GOLD = {
    # (row, col) -> entity id, for target columns 0, 2, 3, 5
    (0, 0): GRANDE_PRAIRIE, (0, 2): CANADA, (0, 3): SEXSMITH, (0, 5): ALBERTA,
    (1, 0): SUNDRE, (1, 2): CANADA, (1, 3): MOUNTAIN_VIEW, (1, 5): ALBERTA,
    (2, 0): PEACE_RIVER_TOWN, (2, 2): CANADA, (2, 3): NORTHERN_SUNRISE, (2, 5): ALBERTA,
    (3, 0): VEGREVILLE, (3, 2): CANADA, (3, 3): MUNDARE, (3, 5): ALBERTA,
}

COLUMN_GOLD = {0: TOWN_IN_ALBERTA}


def town_claims(neighbor_id, neighbor_label, elevation):
    return {
        "P31": (ClaimValue.entity_ref(TOWN_IN_ALBERTA, "town in Alberta"),),
        "P17": (ClaimValue.entity_ref(CANADA, "Canada"),),
        "P47": (ClaimValue.entity_ref(neighbor_id, neighbor_label),),
        "P131": (ClaimValue.entity_ref(ALBERTA, "Alberta"),),
        "P2044": (ClaimValue.quantity(elevation),),
    }


def records() -> list[EntityRecord]:
    out = [
        # Row heads. Grande Prairie carries one class claim per class
        # property, so its class list exercises the P31 -> P279 -> P361
        # union order.
        EntityRecord(
            id=GRANDE_PRAIRIE,
            label="Grande Prairie",
            claims={
                "P31": (ClaimValue.entity_ref(LIST_OF_TOWNS, "list of towns in Alberta"),),
                "P279": (ClaimValue.entity_ref(VILLAGE_IN_ALBERTA, "village in Alberta"),),
                "P361": (ClaimValue.entity_ref(CITY_IN_ALBERTA, "city in Alberta"),),
                "P17": (ClaimValue.entity_ref(CANADA, "Canada"),),
                "P47": (ClaimValue.entity_ref(SEXSMITH, "Sexsmith"),),
                "P131": (ClaimValue.entity_ref(ALBERTA, "Alberta"),),
                "P2044": (ClaimValue.quantity(650),),
            },
        ),
        EntityRecord(
            id=SUNDRE, label="Sundre",
            claims=town_claims(MOUNTAIN_VIEW, "Mountain View County", 1093),
        ),
        # "Peace River" is deliberately ambiguous: a town and a river share
        # the label, and only the town bears the column class.
        EntityRecord(
            id=PEACE_RIVER_TOWN, label="Peace River",
            claims=town_claims(NORTHERN_SUNRISE, "Northern Sunrise County", 330),
        ),
        EntityRecord(
            id=PEACE_RIVER_RIVER, label="Peace River",
            claims={
                "P31": (ClaimValue.entity_ref(RIVER, "river"),),
                "P17": (ClaimValue.entity_ref(CANADA, "Canada"),),
            },
        ),
        EntityRecord(
            id=VEGREVILLE, label="Vegreville",
            claims=town_claims(MUNDARE, "Mundare", 635),
        ),
        # Entities referenced from claims.
        EntityRecord(
            id=SEXSMITH, label="Sexsmith",
            claims={
                "P31": (ClaimValue.entity_ref(TOWN_IN_ALBERTA, "town in Alberta"),),
                "P17": (ClaimValue.entity_ref(CANADA, "Canada"),),
                "P131": (ClaimValue.entity_ref(ALBERTA, "Alberta"),),
            },
        ),
        EntityRecord(
            id=MOUNTAIN_VIEW, label="Mountain View County",
            claims={
                "P31": (ClaimValue.entity_ref(MUNICIPAL_DISTRICT, "municipal district of Alberta"),),
                "P17": (ClaimValue.entity_ref(CANADA, "Canada"),),
                "P131": (ClaimValue.entity_ref(ALBERTA, "Alberta"),),
            },
        ),
        EntityRecord(
            id=NORTHERN_SUNRISE, label="Northern Sunrise County",
            claims={
                "P31": (ClaimValue.entity_ref(MUNICIPAL_DISTRICT, "municipal district of Alberta"),),
                "P17": (ClaimValue.entity_ref(CANADA, "Canada"),),
                "P131": (ClaimValue.entity_ref(ALBERTA, "Alberta"),),
            },
        ),
        EntityRecord(
            id=MUNDARE, label="Mundare",
            claims={
                "P31": (ClaimValue.entity_ref(TOWN_IN_ALBERTA, "town in Alberta"),),
                "P17": (ClaimValue.entity_ref(CANADA, "Canada"),),
                "P131": (ClaimValue.entity_ref(ALBERTA, "Alberta"),),
            },
        ),
        EntityRecord(
            id=CANADA, label="Canada", aliases=("CAN",),
            claims={"P31": (ClaimValue.entity_ref("Q3624078", "sovereign state"),)},
        ),
        EntityRecord(
            id=ALBERTA, label="Alberta", aliases=("AB",),
            claims={"P31": (ClaimValue.entity_ref("Q11828004", "province of Canada"),)},
        ),
        # The classic one-word homonym: three entities answer to "Paris".
        EntityRecord(
            id="Q90", label="Paris",
            claims={"P31": (ClaimValue.entity_ref("Q5119", "capital city"),)},
        ),
        EntityRecord(
            id="Q167646", label="Paris",
            claims={"P31": (ClaimValue.entity_ref("Q22988604", "Greek mythological figure"),)},
        ),
        EntityRecord(
            id="Q830149", label="Paris",
            claims={"P31": (ClaimValue.entity_ref("Q1093829", "city of the United States"),)},
        ),
        # Spell-check demonstration target.
        EntityRecord(
            id="Q7593701", label="St Peter's seminary",
            claims={"P31": (ClaimValue.entity_ref("Q233324", "seminary"),)},
        ),
    ]
    # Leaf records for every class id referenced above, so the snapshot is
    # closed under entity references.
    leaves = {
        TOWN_IN_ALBERTA: "town in Alberta",
        LIST_OF_TOWNS: "list of towns in Alberta",
        VILLAGE_IN_ALBERTA: "village in Alberta",
        CITY_IN_ALBERTA: "city in Alberta",
        RIVER: "river",
        MUNICIPAL_DISTRICT: "municipal district of Alberta",
        "Q3624078": "sovereign state",
        "Q11828004": "province of Canada",
        "Q5119": "capital city",
        "Q22988604": "Greek mythological figure",
        "Q1093829": "city of the United States",
        "Q233324": "seminary",
    }
    out.extend(EntityRecord(id=i, label=label) for i, label in leaves.items())
    return out


def write_quoted(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, quoting=csv.QUOTE_ALL)
        writer.writerows(rows)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default="fixtures/alberta", help="output directory")
    args = parser.parse_args()
    root = Path(args.root)
    (root / "tables").mkdir(parents=True, exist_ok=True)

    with open(root / "tables" / f"{TABLE_ID}.csv", "w", encoding="utf-8", newline="") as handle:
        csv.writer(handle).writerows(TABLE_ROWS)

    snapshot_path = root / "snapshot.jsonl"
    with open(snapshot_path, "w", encoding="utf-8") as handle:
        for record in records():
            handle.write(json.dumps(record_to_json(record), ensure_ascii=False) + "\n")

    write_quoted(root / "targets_cta.csv", [[TABLE_ID, col] for col in sorted(COLUMN_GOLD)])
    write_quoted(
        root / "gold_cta.csv",
        [[TABLE_ID, col, ENTITY_IRI_PREFIX + class_id]
         for col, class_id in sorted(COLUMN_GOLD.items())],
    )
    write_quoted(
        root / "targets_cea.csv",
        [[TABLE_ID, row, col] for row, col in sorted(ENTITY_CELL_GOLD)],
    )
    write_quoted(
        root / "gold_cea.csv",
        [[TABLE_ID, row, col, ENTITY_IRI_PREFIX + entity_id]
         for (row, col), entity_id in sorted(ENTITY_CELL_GOLD.items())],
    )
    print(f"fixture corpus written under {root}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
