#!/usr/bin/env python3
"""Export the public benchmark datasets used by the benchmarks and the
acceptance suite into data/public/ as plain CSV.

Datasets (KEEL imbalanced-classification archive, via the
imbalanced_databases package):

    pima    768 x 8    34.9% positive   IR  1.9
    yeast3  1484 x 8   11.0% positive   IR  8.1
    wine4   1599 x 11   3.3% positive   IR 29.2
    glass   214 x 9    32.7% positive   IR  2.1

Output format: header row f0..f{p-1},label; labels are 1 (minority,
positive) / -1 (majority). This is the shape `gknn bench --data` expects
with its defaults.

Requires: numpy, imbalanced-databases. If your pip index does not carry
imbalanced-databases, point pip at a full PyPI mirror, e.g.

    pip install --index-url https://pypi.org/simple imbalanced-databases
"""

import argparse
import os
import sys

import numpy as np


def export(name, loader, out_dir):
    # encode=False keeps the raw numeric KEEL columns; the loader's default
    # one-hot pass would inflate low-cardinality numeric features.
    bunch = loader(encode=False)
    X = np.asarray(bunch["data"], dtype=float)
    y = np.asarray(bunch["target"]).astype(int)
    if not np.isfinite(X).all():
        raise ValueError(f"{name}: non-finite feature values")
    labels = np.where(y == 1, 1, -1)
    pos = int((labels == 1).sum())
    neg = int((labels == -1).sum())
    if pos > neg:
        labels = -labels
        pos, neg = neg, pos

    path = os.path.join(out_dir, f"{name}.csv")
    header = ",".join([f"f{j}" for j in range(X.shape[1])] + ["label"])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row, lab in zip(X, labels):
            cells = [repr(float(v)) for v in row] + [str(int(lab))]
            fh.write(",".join(cells) + "\n")
    print(f"{name}: {X.shape[0]} x {X.shape[1]}  "
          f"pos={pos} ({100.0 * pos / len(labels):.1f}%)  IR={neg / pos:.1f}  -> {path}")


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "public"),
                        help="output directory (default: data/public)")
    args = parser.parse_args()

    try:
        import imbalanced_databases as imbd
    except ImportError:
        print("error: the imbalanced-databases package is required; see module docstring",
              file=sys.stderr)
        return 1

    out_dir = os.path.abspath(args.out)
    os.makedirs(out_dir, exist_ok=True)

    export("pima", imbd.load_pima, out_dir)
    export("yeast3", imbd.load_yeast3, out_dir)
    export("wine4", imbd.load_winequality_red_4, out_dir)
    export("glass", imbd.load_glass0, out_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
