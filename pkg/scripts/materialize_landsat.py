"""Rebuild the UCI Statlog (Landsat Satellite) sat.trn / sat.tst files offline.

The UCI archive is not always reachable, but two PyPI wheels carry the data:
``imbalanced-databases`` ships sat.tst verbatim and ``keel-ds`` ships all
6435 rows (train + test).  The training file is the multiset difference.

Usage::

    pip download --no-deps -d wheels keel-ds==0.2.5 imbalanced-databases==0.1.1
    python scripts/materialize_landsat.py wheels data/landsat
"""

import argparse
import glob
import os
import zipfile
from collections import Counter


def _read_member(pattern, member):
    (wheel,) = glob.glob(pattern)
    with zipfile.ZipFile(wheel) as zf:
        return zf.read(member).decode()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("wheel_dir")
    parser.add_argument("out_dir")
    args = parser.parse_args()

    everything = _read_member(
        os.path.join(args.wheel_dir, "keel_ds-*.whl"),
        "keel_ds/data/balanced/raw/satimage.dat",
    )
    rows = [" ".join(tok.strip() for tok in line.split(",")) for line in everything.splitlines() if line.strip()]
    test_text = _read_member(
        os.path.join(args.wheel_dir, "imbalanced_databases-*.whl"),
        "imbalanced_databases/data/satimage/sat.bin",
    )
    test = [line.strip() for line in test_text.splitlines() if line.strip()]

    remaining = Counter(test)
    train = []
    for row in rows:
        if remaining[row]:
            remaining[row] -= 1
        else:
            train.append(row)
    if sum(remaining.values()) or len(train) != 4435 or len(test) != 2000:
        raise SystemExit(f"unexpected split: {len(train)} train / {len(test)} test")

    os.makedirs(args.out_dir, exist_ok=True)
    for name, lines in (("sat.trn", train), ("sat.tst", test)):
        with open(os.path.join(args.out_dir, name), "w") as fh:
            fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(train)} train and {len(test)} test rows to {args.out_dir}")


if __name__ == "__main__":
    main()
