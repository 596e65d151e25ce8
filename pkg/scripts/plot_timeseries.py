"""Plot columns of a timeseries.csv written by ``iondirac run``.

    python scripts/plot_timeseries.py out/zitterbewegung_1p1/timeseries.csv -c x -o zb.png
"""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from iondirac.io import read_csv  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("-c", "--columns", nargs="*", help="columns to plot (default: all but time/leakage)")
    ap.add_argument("-o", "--output", default="timeseries.png")
    args = ap.parse_args()

    data = read_csv(args.csv)
    cols = args.columns or [k for k in data if k not in ("time", "leakage")]
    fig, axes = plt.subplots(len(cols), 1, sharex=True, figsize=(7, 2.2 * len(cols)), squeeze=False)
    for ax, name in zip(axes[:, 0], cols):
        ax.plot(data["time"], data[name], lw=1)
        ax.set_ylabel(name)
    axes[-1, 0].set_xlabel("time")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
