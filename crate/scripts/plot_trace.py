#!/usr/bin/env python3
"""Plot a trace written by `mhfseg segment --trace`, optionally with labels.

    python3 scripts/plot_trace.py trace.tsv [labels.txt] [--level L0.5]
"""
import argparse
import csv

import matplotlib.pyplot as plt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("trace")
    ap.add_argument("labels", nargs="?")
    ap.add_argument("--level", default="L0.5")
    args = ap.parse_args()

    with open(args.trace) as f:
        rows = list(csv.DictReader(f, delimiter="\t"))
    t = [float(r["time_s"]) for r in rows]

    fig, (ax_v, ax_e) = plt.subplots(2, 1, sharex=True, figsize=(10, 5))
    ax_v.plot(t, [float(r["v_normalized"]) for r in rows], label="v (normalized)")
    ax_e.plot(t, [float(r["energy"]) for r in rows], color="tab:orange", label="energy")
    ax_e.axhline(2.0, color="grey", lw=0.5)

    if args.labels:
        with open(args.labels) as f:
            for line in f:
                start, end, tag = line.rstrip("\n").split("\t")
                if tag == args.level and float(start) > 0:
                    ax_v.axvline(float(start), color="red", lw=0.8)
                elif tag == "mark":
                    ax_e.axvline(float(start), color="green", lw=0.8)

    ax_v.legend(loc="upper right")
    ax_e.legend(loc="upper right")
    ax_e.set_xlabel("time (s)")
    plt.tight_layout()
    plt.show()


if __name__ == "__main__":
    main()
