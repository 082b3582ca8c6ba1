"""Play the lower-bound adversary against a grid of algorithms and capacities.

    python3 scripts/adversary_matrix.py --capacities 1 2 3 --rho 2.0585

Every game's instance is re-solved offline; the table lists the branch the
game ended in, the ratio it forced, and whether the solver agreed.
"""

import argparse

from darpline.adversary import AdversaryConfig, run_general_lower_bound
from darpline.analysis import rho_lower_bound, theta_star
from darpline.offline import opt
from darpline.online import GreedyReplan, Ignore, SmarterStart, Smartstart, eagerize


def algorithms():
    yield "ignore", Ignore
    yield "replan", GreedyReplan
    for theta in (1.3, 1.5, 2.0):
        yield f"smartstart:{theta:g}", lambda theta=theta: Smartstart(theta)
    for theta in (1.3, 1.5, theta_star(), 1.9):
        yield f"smarterstart:{theta:.5g}", lambda theta=theta: SmarterStart(theta)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rho", type=float, default=None, help="defaults to the exact root")
    ap.add_argument("--capacities", type=int, nargs="+", default=[1, 2])
    args = ap.parse_args()
    rho = rho_lower_bound() if args.rho is None else args.rho

    print(f"rho = {rho:.10f}")
    print(f"{'algorithm':<22} {'c':>2} {'outcome':<13} {'#req':>4} {'ALG':>10} {'OPT':>10} {'ratio':>10}  solver")
    worst = float("inf")
    for name, make in algorithms():
        for c in args.capacities:
            tr = run_general_lower_bound(eagerize(make()), AdversaryConfig(rho=rho, capacity=c))
            agrees = abs(opt(tr.instance()) - tr.claimed_opt) <= 1e-6
            worst = min(worst, tr.ratio)
            print(
                f"{name:<22} {c:>2} {tr.outcome:<13} {len(tr.released):>4} "
                f"{tr.alg_completion:10.5f} {tr.opt_value:10.5f} {tr.ratio:10.6f}  {'ok' if agrees else 'MISMATCH'}"
            )
    print(f"smallest ratio forced: {worst:.9f} (target {rho:.9f})")


if __name__ == "__main__":
    main()
