#!/usr/bin/env python3
"""Plot a sweep summary CSV produced by `crpower sweep`.

    python3 python/plot_sweep.py fig3.csv [out.png]

Reads the manifest header and the summary rows, draws mean capacity with
a +/- one-standard-deviation band per method, and writes a PNG next to
the input (or prints a text table when matplotlib is unavailable).
"""
import csv
import pathlib
import sys
from collections import defaultdict


def load(path):
    manifest = {}
    rows = []
    with open(path, newline="") as f:
        header = None
        for line in f:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                manifest[key.strip()] = value.strip()
                continue
            if header is None:
                header = [c.strip() for c in line.strip().split(",")]
                continue
            rows.append(dict(zip(header, next(csv.reader([line])))))
    if header is None or not rows:
        sys.exit(f"{path}: no summary rows found")
    return manifest, header[0], rows


def main():
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    path = pathlib.Path(sys.argv[1])
    out = pathlib.Path(sys.argv[2]) if len(sys.argv) > 2 else path.with_suffix(".png")
    manifest, axis, rows = load(path)

    series = defaultdict(list)
    for r in rows:
        series[r["method"]].append(
            (float(r[axis]), float(r["mean_capacity"]), float(r["std_capacity"]))
        )

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print(f"# {path} (config {manifest.get('config_hash', '?')})")
        print(f"{axis:>12}  " + "  ".join(f"{m:>18}" for m in series))
        xs = sorted({x for pts in series.values() for x, _, _ in pts})
        for x in xs:
            cells = []
            for m in series:
                v = next((f"{mean:.3f} ± {std:.3f}" for xx, mean, std in series[m] if xx == x), "-")
                cells.append(f"{v:>18}")
            print(f"{x:>12}  " + "  ".join(cells))
        return

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for method, pts in series.items():
        pts.sort()
        xs = [x for x, _, _ in pts]
        means = [m for _, m, _ in pts]
        stds = [s for _, _, s in pts]
        ax.plot(xs, means, marker="o", label=method)
        ax.fill_between(
            xs,
            [m - s for m, s in zip(means, stds)],
            [m + s for m, s in zip(means, stds)],
            alpha=0.2,
        )
    ax.set_xlabel(axis)
    ax.set_ylabel("total capacity (bits/s/Hz)")
    ax.set_title(f"config {manifest.get('config_hash', '?')}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
