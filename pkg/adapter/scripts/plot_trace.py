#!/usr/bin/env python3
"""Render a thermoquad trace CSV to PNG.

Usage: python plot_trace.py trace.csv out.png
"""

import argparse

from thermoquad_adapter.plotting import plot_trace


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("trace_csv")
    p.add_argument("out_png")
    p.add_argument("--t-max", type=float, default=60.0)
    args = p.parse_args()
    plot_trace(args.trace_csv, args.out_png, t_max_c=args.t_max)
    print(f"wrote {args.out_png}")


if __name__ == "__main__":
    main()
