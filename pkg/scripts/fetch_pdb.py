"""Download the legacy-format PDB files used by the protein experiments.

    python scripts/fetch_pdb.py [--dest data/pdb] [CODE ...]

Defaults to 1EWT, 1EWK and 1UW6.  Needs network access to files.rcsb.org;
on an offline machine copy the files into ``data/pdb`` by hand instead.
"""
import argparse
import sys
import urllib.request
from pathlib import Path

URL = "https://files.rcsb.org/download/{code}.pdb"


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("codes", nargs="*", default=["1EWT", "1EWK", "1UW6"])
    parser.add_argument("--dest", default=Path(__file__).resolve().parents[1] / "data" / "pdb", type=Path)
    args = parser.parse_args(argv)
    args.dest.mkdir(parents=True, exist_ok=True)
    status = 0
    for code in (c.upper() for c in args.codes):
        target = args.dest / f"{code}.pdb"
        try:
            with urllib.request.urlopen(URL.format(code=code), timeout=60) as resp:
                target.write_bytes(resp.read())
            print(target)
        except OSError as exc:
            print(f"{code}: download failed ({exc})", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
