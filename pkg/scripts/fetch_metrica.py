#!/usr/bin/env python3
"""Download the two Metrica Sports sample matches used by the test suite.

Files land under data/metrica/Sample_Game_<n>/ with their upstream names,
which is exactly where tests/test_acceptance.py (and your own runs) look
for them.  Needs network access; the build/test sandbox typically has none,
so run this on a normal machine and copy the directory over if needed.
"""

import argparse
import sys
import urllib.request
from pathlib import Path

BASE_URL = "https://raw.githubusercontent.com/metrica-sports/sample-data/master/data"

FILES = [
    f"Sample_Game_{n}/Sample_Game_{n}_{part}.csv"
    for n in (1, 2)
    for part in ("RawTrackingData_Home_Team", "RawTrackingData_Away_Team", "RawEventsData")
]


def fetch(relative: str, dest_root: Path, force: bool) -> None:
    dest = dest_root / relative
    if dest.exists() and not force:
        print(f"kept     {dest} (already present, use --force to refetch)")
        return
    dest.parent.mkdir(parents=True, exist_ok=True)
    url = f"{BASE_URL}/{relative}"
    print(f"fetching {url}")
    partial = dest.with_suffix(dest.suffix + ".part")
    with urllib.request.urlopen(url) as response, open(partial, "wb") as fh:
        while chunk := response.read(1 << 16):
            fh.write(chunk)
    partial.replace(dest)
    print(f"wrote    {dest} ({dest.stat().st_size} bytes)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--dest",
        default=str(Path(__file__).resolve().parent.parent / "data" / "metrica"),
        help="destination directory (default: <repo>/data/metrica)",
    )
    parser.add_argument("--force", action="store_true", help="refetch existing files")
    args = parser.parse_args(argv)

    dest_root = Path(args.dest)
    try:
        for relative in FILES:
            fetch(relative, dest_root, args.force)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("no network access? run this somewhere connected and copy "
              f"{dest_root} into place.", file=sys.stderr)
        return 1
    print("done; tests/test_acceptance.py will pick the files up automatically.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
