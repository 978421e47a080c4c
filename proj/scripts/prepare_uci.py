#!/usr/bin/env python3
"""Convert the two public credit-scoring files into the CSV + schema pair
the toolkit loads.

The raw files are not redistributed here; download them first (see
data/README.md), then run e.g.:

    python3 scripts/prepare_uci.py german ~/Downloads/german.data data/
    python3 scripts/prepare_uci.py australian ~/Downloads/australian.dat data/

Labels are written as they appear in the source; the loader maps the rarer
value to +1, which puts "bad credit" (german) and the smaller approval
class (australian) on the positive side.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

# 1-based attribute indices that hold category codes rather than amounts.
DATASETS = {
    "german": {
        "expected_rows": 1000,
        "columns": 21,
        "categorical": {1, 3, 4, 6, 7, 9, 10, 12, 14, 15, 17, 19, 20},
    },
    "australian": {
        "expected_rows": 690,
        "columns": 15,
        "categorical": {1, 4, 5, 6, 8, 9, 11, 12},
    },
}


def read_rows(path: Path, n_columns: int) -> list[list[str]]:
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        cells = line.split()
        if not cells:
            continue
        if len(cells) != n_columns:
            sys.exit(f"{path}:{lineno}: expected {n_columns} fields, got {len(cells)}")
        rows.append(cells)
    if not rows:
        sys.exit(f"{path}: no data rows")
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("dataset", choices=sorted(DATASETS))
    parser.add_argument("raw_file", type=Path, help="downloaded german.data / australian.dat")
    parser.add_argument("out_dir", type=Path, help="destination directory (usually data/)")
    args = parser.parse_args()

    info = DATASETS[args.dataset]
    rows = read_rows(args.raw_file, info["columns"])
    if len(rows) != info["expected_rows"]:
        print(f"warning: expected {info['expected_rows']} rows, found {len(rows)}",
              file=sys.stderr)

    n_features = info["columns"] - 1
    names = [f"a{i}" for i in range(1, n_features + 1)]

    features = []
    for i, name in enumerate(names, start=1):
        if i in info["categorical"]:
            vocabulary = sorted({row[i - 1] for row in rows})
            features.append({"name": name, "kind": "categorical",
                             "vocabulary": vocabulary, "closed": True})
        else:
            for row in rows:
                float(row[i - 1])  # fail loudly on a non-numeric cell
            features.append({"name": name, "kind": "continuous"})

    labels = [row[-1] for row in rows]
    counts = {v: labels.count(v) for v in sorted(set(labels))}
    if len(counts) != 2:
        sys.exit(f"expected exactly two label values, found {sorted(counts)}")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = args.out_dir / f"{args.dataset}.csv"
    schema_path = args.out_dir / f"{args.dataset}.schema.json"

    with csv_path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(names + ["label"])
        writer.writerows(rows)

    schema_path.write_text(
        json.dumps({"label_column": "label", "features": features}, indent=2) + "\n")

    minority = min(counts, key=counts.get)
    print(f"wrote {csv_path} ({len(rows)} rows) and {schema_path}")
    print(f"label counts: {counts}; '{minority}' is the minority and will load as +1")


if __name__ == "__main__":
    main()
