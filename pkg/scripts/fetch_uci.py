#!/usr/bin/env python3
"""Download the two UCI files the dataset-backed acceptance tests need.

Usage: python scripts/fetch_uci.py [dest_dir]

Writes breast-cancer-wisconsin.data and adult.data into dest_dir (default:
<repo>/data). The acceptance tests look there, or wherever
SHIFT_EXPLAIN_DATA_DIR points.
"""

import sys
import urllib.request
from pathlib import Path

FILES = {
    "breast-cancer-wisconsin.data": (
        "https://archive.ics.uci.edu/ml/machine-learning-databases/"
        "breast-cancer-wisconsin/breast-cancer-wisconsin.data"
    ),
    "adult.data": (
        "https://archive.ics.uci.edu/ml/machine-learning-databases/adult/adult.data"
    ),
}


def main() -> int:
    dest = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    dest.mkdir(parents=True, exist_ok=True)
    for name, url in FILES.items():
        path = dest / name
        if path.exists():
            print(f"{path} already present, skipping")
            continue
        print(f"fetching {url}")
        with urllib.request.urlopen(url, timeout=60) as resp:
            path.write_bytes(resp.read())
        print(f"wrote {path} ({path.stat().st_size} bytes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
