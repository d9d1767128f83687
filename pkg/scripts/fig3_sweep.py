"""Sweep P_N over a (tau, eps) grid and draw the black-region heatmap with
the boundary curve f(tau) + eps = 1."""
import argparse
from pathlib import Path

from pulsenet.montecarlo import SweepSpec, cells_to_csv, midpoints, sweep
from pulsenet.output import heatmap_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--grid", type=int, default=20, help="cells per axis")
    ap.add_argument("--samples", type=int, default=30)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/fig3")
    args = ap.parse_args()
    axis = midpoints(args.grid)
    spec = SweepSpec.grid(axis, axis, args.n, args.samples, seed=args.seed)
    cells = sweep(spec, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"fig3_N{args.n}.csv").write_text(cells_to_csv(cells))
    (out / f"fig3_N{args.n}.svg").write_text(heatmap_svg(cells, spec.phase_map, f"N = {args.n}"))
    pm = spec.phase_map
    black = [c for c in cells if c.p_hat > 0]
    stray = [c for c in black if pm.f(c.tau) + c.eps < 1.0]
    undecided = sum(c.undecided_count for c in cells) / sum(c.samples for c in cells)
    print(f"black cells: {len(black)}/{len(cells)}; black cells in A1: {len(stray)}; "
          f"undecided fraction {undecided:.4f}")


if __name__ == "__main__":
    main()
