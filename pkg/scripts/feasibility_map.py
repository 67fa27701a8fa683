"""Third-party deterrence regimes over an (audit probability, penalty) grid.

Writes a CSV of verdicts and, with --plot, a heatmap PNG (needs matplotlib).

    python scripts/feasibility_map.py --r-steps 20 --p-max 20 --out map.csv --plot map.png
"""

import argparse
from fractions import Fraction

from regugame.models import baseline, third_party_min_penalty
from regugame.policy import feasibility_grid, fmt_decimal, to_csv

CODES = {"FraudRisk": 0, "Tie": 1, "HonestTrade": 2, "Infeasible": -1}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--r-steps", type=int, default=20)
    ap.add_argument("--p-max", type=int, default=20)
    ap.add_argument("--out", default="feasibility_map.csv")
    ap.add_argument("--plot", default=None)
    args = ap.parse_args()

    params = baseline()
    r_grid = [Fraction(k, args.r_steps) for k in range(1, args.r_steps + 1)]
    p_grid = list(range(args.p_max + 1))
    grid = feasibility_grid(params, r_grid, p_grid)

    rows = [[fmt_decimal(p), fmt_decimal(r), grid.cells[i][j]]
            for i, p in enumerate(grid.p_grid) for j, r in enumerate(grid.r_grid)]
    with open(args.out, "w", newline="\n") as fh:
        fh.write(to_csv(["p", "r", "verdict"], rows))
    print(f"wrote {len(rows)} cells to {args.out}")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        z = [[CODES[c] for c in row] for row in grid.cells]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.imshow(z, origin="lower", aspect="auto", cmap="RdYlGn",
                  extent=(float(r_grid[0]), float(r_grid[-1]), p_grid[0], p_grid[-1]))
        rs = [r / 200 for r in range(8, 201)]
        ax.plot(rs, [float(third_party_min_penalty(params.replace(audit_prob=r))) for r in rs], "k-")
        ax.set_ylim(p_grid[0], p_grid[-1])
        ax.set_xlabel("audit probability r")
        ax.set_ylabel("penalty p")
        ax.set_title("minimum deterring penalty (line) and regime")
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
