"""Plot p_M and overlap from one or more harness CSV/JSON files.

Not part of the package; needs matplotlib installed separately.

    python scripts/plot_series.py figures/out/fig2_solid.csv figures/out/fig2_dashed.csv -o fig2.png
"""

import argparse
from pathlib import Path

from qwsearch.harness import read_series


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("series", nargs="+", type=Path)
    p.add_argument("-o", "--output", type=Path, default=None, help="image path; shows a window if omitted")
    args = p.parse_args(argv)

    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    styles = ["-", "--", ":", "-."]
    for i, path in enumerate(args.series):
        s = read_series(path)
        ls = styles[i % len(styles)]
        if "p_m" in s.columns:
            ax.plot(s.t, s["p_m"], ls, color="C0", label=f"p_M {path.stem}")
        if "overlap" in s.columns:
            ax.plot(s.t, s["overlap"], ls, color="C1", label=f"overlap {path.stem}")
    ax.set_xlabel("t")
    ax.legend()
    if args.output:
        fig.savefig(args.output, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
