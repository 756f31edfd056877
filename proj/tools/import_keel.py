#!/usr/bin/env python3
"""Extract the UCI datasets bundled in the keel-ds wheel into data/uci/*.csv.

Usage: python3 tools/import_keel.py path/to/keel_ds-0.2.5-py3-none-any.whl [out_dir]

The wheel ships KEEL re-packagings of five of the UCI sets used by the
benchmark (Ionosphere, Pima, Mammographic Masses, Movement Libras, Image
Segmentation). Rows are written unchanged apart from whitespace stripping,
label in the last column, no header.
"""
import pathlib
import sys
import zipfile

FILES = {
    "ionosphere.dat": "ionosphere.csv",
    "pima.dat": "pima.csv",
    "mammographic.dat": "mammographic.csv",
    "movement_libras.dat": "movement_libras.csv",
    "segment.dat": "segmentation.csv",
}


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__, file=sys.stderr)
        return 1
    wheel = zipfile.ZipFile(sys.argv[1])
    out = pathlib.Path(sys.argv[2] if len(sys.argv) > 2 else "data/uci")
    out.mkdir(parents=True, exist_ok=True)
    for src, dst in FILES.items():
        raw = wheel.read(f"keel_ds/data/balanced/raw/{src}").decode()
        rows = []
        for line in raw.splitlines():
            line = line.strip()
            if not line or line.startswith("@"):
                continue
            rows.append(",".join(cell.strip() for cell in line.split(",")))
        (out / dst).write_text("\n".join(rows) + "\n")
        print(f"{dst}: {len(rows)} rows, {len(rows[0].split(','))} columns")
    return 0


if __name__ == "__main__":
    sys.exit(main())
