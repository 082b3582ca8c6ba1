"""Tabulate the bound curves next to SmarterStart's ratio on the tight families.

    python3 scripts/sweep_theta.py --lo 1.05 --hi 3.5 --step 0.05 --out sweep.csv

Besides the CSV, prints how far each simulated column sits from its curve.
"""

import argparse
import sys

from darpline.analysis import (
    SILVER,
    expected_ratio_gt2,
    expected_ratio_nowaiting,
    sweep_csv_text,
    sweep_theta,
    theta_grid,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lo", type=float, default=1.05)
    ap.add_argument("--hi", type=float, default=3.5)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--eps", type=float, default=1e-3)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args()

    rows = sweep_theta(theta_grid(args.lo, args.hi, args.step), args.eps, workers=args.workers)
    with open(args.out, "w") as fh:
        fh.write(sweep_csv_text(rows))

    print(f"{'theta':>8} {'column':>10} {'sim':>10} {'curve-eps':>10} {'gap':>10} {'exact gap':>10}")
    for row in rows:
        t = row.theta
        if row.sim_ratio_waiting is not None:
            want = row.f1 - args.eps
            print(f"{t:8.3f} {'waiting':>10} {row.sim_ratio_waiting:10.6f} {want:10.6f} {row.sim_ratio_waiting - want:+10.2e}")
        if row.sim_ratio_nowaiting is not None:
            want = row.f2 - args.eps
            exact = expected_ratio_nowaiting(t, args.eps)
            print(
                f"{t:8.3f} {'nowaiting':>10} {row.sim_ratio_nowaiting:10.6f} {want:10.6f} "
                f"{row.sim_ratio_nowaiting - want:+10.2e} {row.sim_ratio_nowaiting - exact:+10.2e}"
            )
        if row.sim_ratio_gt2 is not None:
            want = (row.g1 if t <= SILVER else row.g2) - args.eps
            exact = expected_ratio_gt2(t, args.eps, defer_final=True)
            print(
                f"{t:8.3f} {'gt2':>10} {row.sim_ratio_gt2:10.6f} {want:10.6f} "
                f"{row.sim_ratio_gt2 - want:+10.2e} {row.sim_ratio_gt2 - exact:+10.2e}"
            )
    print(f"wrote {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
