#!/usr/bin/env python3
"""Plot f-vs-iteration curves from one or more ecco trace CSVs.

Usage:
    python3 tools/plot_traces.py out/run_0_rosenbrock_ecco_full.csv [more.csv ...] \
        [--log] [--out figure.png]
"""

import argparse
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    iters, fs = [], []
    with open(path) as fh:
        for row in csv.DictReader(fh):
            iters.append(int(row["iter"]))
            fs.append(float(row["f"]))
    return iters, fs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("traces", nargs="+")
    ap.add_argument("--log", action="store_true", help="log-scale the objective axis")
    ap.add_argument("--out", default="traces.png")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in args.traces:
        iters, fs = load(path)
        ax.plot(iters, fs, label=pathlib.Path(path).stem, linewidth=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    if args.log:
        ax.set_yscale("log")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
