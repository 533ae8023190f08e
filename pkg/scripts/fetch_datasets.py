"""Download the real-data CSVs used by the optional real-data tests.

No location is built in.  Point ``--base-url`` at a mirror that serves
``chemo.csv``, ``depressive.csv`` and ``covid_mexico.csv`` (one column of
positive values, optional header).  Files land in ``--dest`` (default
``data/`` at the repository root), which is where the tests look unless
``ODDSGEN_DATA_DIR`` says otherwise.

Usage::

    python scripts/fetch_datasets.py --base-url https://example.org/mirror
"""

import argparse
import sys
import urllib.request
from pathlib import Path

DATASETS = ("chemo", "depressive", "covid_mexico")
DEFAULT_DEST = Path(__file__).resolve().parents[1] / "data"


def fetch(base_url: str, dest: Path, names=DATASETS, timeout: float = 30.0) -> list[Path]:
    dest.mkdir(parents=True, exist_ok=True)
    written = []
    for name in names:
        url = f"{base_url.rstrip('/')}/{name}.csv"
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            body = resp.read()
        path = dest / f"{name}.csv"
        path.write_bytes(body)
        written.append(path)
    return written


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description="Fetch the optional real-data CSVs.")
    ap.add_argument("--base-url", required=True, help="directory URL serving <name>.csv files")
    ap.add_argument("--dest", type=Path, default=DEFAULT_DEST, help="output directory (default data/)")
    ap.add_argument("--only", choices=DATASETS, action="append", help="fetch just this dataset (repeatable)")
    args = ap.parse_args(argv)
    try:
        paths = fetch(args.base_url, args.dest, args.only or DATASETS)
    except OSError as exc:
        print(f"fetch failed: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
