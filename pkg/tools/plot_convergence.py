"""Convergence curves from one or more trace CSVs written by ``dypp run``.

    python tools/plot_convergence.py runs/compare/*/trace.csv -o curves.png

Left panel: mean saved noise per iteration.  Right panel: mean payment.
Needs matplotlib (``pip install dypp[plot]``).
"""
import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def load_means(path):
    """Per-iteration (t, mean_delta_sigma, mean_price) from a trace CSV."""
    data = np.genfromtxt(path, delimiter=",", names=True, usecols=("t", "mean_delta_sigma", "mean_price"))
    _, first = np.unique(data["t"], return_index=True)
    rows = data[first]
    return rows["t"], rows["mean_delta_sigma"], rows["mean_price"]


def smooth(y, width):
    if width <= 1 or len(y) < width:
        return y
    return np.convolve(y, np.ones(width) / width, mode="valid")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("traces", nargs="+", type=Path)
    ap.add_argument("-o", "--out", type=Path, default=Path("convergence.png"))
    ap.add_argument("--smooth", type=int, default=100, help="moving-average width in iterations")
    args = ap.parse_args(argv)

    fig, (ax_s, ax_p) = plt.subplots(1, 2, figsize=(11, 4))
    for path in args.traces:
        t, sigma, price = load_means(path)
        label = path.parent.name or path.stem
        ts = t[len(t) - len(smooth(sigma, args.smooth)):]
        ax_s.plot(ts, smooth(sigma, args.smooth), label=label)
        ax_p.plot(ts, smooth(price, args.smooth), label=label)
    ax_s.set(xlabel="iteration", ylabel="mean saved noise scale")
    ax_p.set(xlabel="iteration", ylabel="mean payment")
    ax_s.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
