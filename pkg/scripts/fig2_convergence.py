"""Estimate P_N over increasing N for the three convergence parameter sets."""
import argparse
from pathlib import Path

from pulsenet.montecarlo import SweepSpec, cells_to_csv, sweep

POINTS = ((0.55, 0.4), (0.7, 0.35), (0.8, 0.3))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", type=int, nargs="+", default=[2, 5, 10, 20, 50, 100])
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/fig2")
    args = ap.parse_args()
    cells = sweep(SweepSpec(POINTS, tuple(args.ns), args.samples, args.seed), workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "fig2.csv").write_text(cells_to_csv(cells))
    print("tau   eps   " + " ".join(f"N={n:<5d}" for n in args.ns))
    for tau, eps in POINTS:
        row = [c for c in cells if (c.tau, c.eps) == (tau, eps)]
        print(f"{tau:<5} {eps:<5} " + " ".join(f"{c.p_hat:<7.3f}" for c in row))


if __name__ == "__main__":
    main()
