#!/usr/bin/env python3
"""Plot reconstruction error curves from one or more mse.csv files.

Usage: plot_mse.py RUN_DIR_OR_CSV... [-o out.png] [--log]

Each argument is either an mse.csv or a run directory containing one.
With matplotlib installed the curves go to a PNG (default mse.png);
without it a plain-text table is printed instead.
"""

import argparse
import csv
import os
import sys


def load_curve(path):
    if os.path.isdir(path):
        path = os.path.join(path, "mse.csv")
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    iters = [int(r["iteration"]) for r in rows]
    mse = [float(r["mse"]) for r in rows]
    label = os.path.basename(os.path.dirname(os.path.abspath(path))) or path
    return label, iters, mse


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("runs", nargs="+", help="mse.csv files or run directories")
    ap.add_argument("-o", "--out", default="mse.png", help="output image")
    ap.add_argument("--log", action="store_true", help="log-scale error axis")
    args = ap.parse_args()

    curves = [load_curve(p) for p in args.runs]

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        for label, iters, mse in curves:
            print(label)
            for i, e in zip(iters, mse):
                print(f"  {i:3d}  {e:.6g}")
        print("matplotlib not available; printed tables instead", file=sys.stderr)
        return

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, iters, mse in curves:
        ax.plot(iters, mse, marker="o", markersize=3, label=label)
    ax.set_xlabel("outer iteration")
    ax.set_ylabel("squared error")
    if args.log:
        ax.set_yscale("log")
    if len(curves) > 1:
        ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(args.out)


if __name__ == "__main__":
    main()
