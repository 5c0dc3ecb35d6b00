"""Hazard-rate curves for k = 3, q = 0.2 at positive and negative gamma.

    python scripts/hazard_curves.py [--out results/hazard_curves.csv]

Writes the CSV consumed by any external plotting tool and prints whether each
column is monotone in the direction its shape class predicts.
"""

import argparse
import csv
import io
from pathlib import Path

import numpy as np

from ngnb import NgnbParams, classify_shape
from ngnb.cli import main

GAMMAS = (3.0, 2.0, 1.0, 0.0, -1.0, -2.0)


def run(out: Path, ylimit: int = 50) -> None:
    buf = io.StringIO()
    main(["hazard-curve", "--gammas=" + ",".join(f"{g:g}" for g in GAMMAS), "--ylimit", str(ylimit)], stdout=buf)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(buf.getvalue())
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    for g in GAMMAS:
        rates = np.array([float(r[f"gamma_{g:g}"]) for r in rows])
        steps = np.diff(rates)
        trend = "increasing" if np.all(steps > 0) else "decreasing" if np.all(steps < 0) else "flat/mixed"
        shape = classify_shape(NgnbParams(g, 3.0, 0.2)).tag
        print(f"gamma={g:+g}: {shape:<15} r(0)={rates[0]:.4f} r({ylimit})={rates[-1]:.4f} {trend}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results/hazard_curves.csv"))
    parser.add_argument("--ylimit", type=int, default=50)
    args = parser.parse_args()
    run(args.out, args.ylimit)
