"""Print the numerical-case report and write its CSV tables to a directory.

    python scripts/reproduce_numerical_case.py --out-dir results/
"""

import argparse
import json
from pathlib import Path

from regugame.models import MarketParams, baseline
from regugame.policy import demo_report


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--params", help="market parameter JSON (default: baseline)")
    ap.add_argument("--out-dir", default=None)
    args = ap.parse_args()

    params = baseline()
    if args.params:
        params = MarketParams.from_dict(json.loads(Path(args.params).read_text()))
    report = demo_report(params)
    print(report.markdown, end="")

    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "numerical_case.md").write_text(report.markdown, newline="\n")
        for name, text in report.csv.items():
            (out / f"{name}.csv").write_text(text, newline="\n")
        print(f"\nwrote {len(report.csv) + 1} files to {out}")


if __name__ == "__main__":
    main()
