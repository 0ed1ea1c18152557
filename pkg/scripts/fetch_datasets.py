#!/usr/bin/env python3
"""Download the benchmark files into a local data directory.

Needs outbound network access; on machines without it, place each file
listed by ``--list`` into the data directory by hand.
"""

import argparse
import sys

from natafbeta.datasets import MANIFESTS, fetch


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "names", nargs="*", default=[], help="benchmark names (default: all)"
    )
    parser.add_argument("--data-dir", default="data", help="target directory")
    parser.add_argument(
        "--list", action="store_true", help="print manifests and exit"
    )
    args = parser.parse_args(argv)

    if args.list:
        for m in MANIFESTS.values():
            print(f"{m.name}: {m.filename} ({m.n_rows} rows) from {m.urls[0]}")
        return 0

    names = args.names or sorted(MANIFESTS)
    failures = 0
    for name in names:
        try:
            path = fetch(name, data_dir=args.data_dir)
            print(f"{name}: {path}")
        except (KeyError, OSError) as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
