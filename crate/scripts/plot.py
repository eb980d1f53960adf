#!/usr/bin/env python3
"""Plot population tables produced by the eaet CLI."""

import argparse
import csv
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        delimiter = "\t" if "\t" in sample.splitlines()[0] else ","
        rows = list(csv.DictReader(fh, delimiter=delimiter))
    t = [float(r["t"]) for r in rows]
    p = [float(r["p_reactant_mean"]) for r in rows]
    err = [float(r["p_reactant_stderr"]) for r in rows]
    return t, p, err


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("tables", nargs="+", help="population table files")
    parser.add_argument("-o", "--output", default="population.png")
    args = parser.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in args.tables:
        t, p, err = load(path)
        label = pathlib.Path(path).stem
        (line,) = ax.plot(t, p, label=label, linewidth=1.2)
        lo = [a - b for a, b in zip(p, err)]
        hi = [a + b for a, b in zip(p, err)]
        ax.fill_between(t, lo, hi, color=line.get_color(), alpha=0.2, linewidth=0)
    ax.set_xlabel(r"$\Omega t$")
    ax.set_ylabel(r"$P_{\mathrm{reactant}}$")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
