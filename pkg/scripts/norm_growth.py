"""Growth of ||phi_n||^2 with n: ratios against 2/cos(theta) and the Legendre limit."""
import argparse
import math

from iqho.pbops import ThetaParams, growth_sequence, norm_closed_form
from iqho.specfun import legendre_growth_ratio


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, nargs="+", default=[0.5, 1.0, 1.4])
    ap.add_argument("--nmax", type=int, default=60)
    args = ap.parse_args()

    for th in args.theta:
        p = ThetaParams(th)
        seq = growth_sequence(p, args.nmax)
        x = 1 / math.cos(th)
        print(f"theta={th}: 2/cos={2 * x:.5f}  (1+|sin|)/cos={legendre_growth_ratio(x):.5f}")
        print(f"{'n':>4} {'||phi_n||^2':>14} {'closed form':>14} {'ratio':>9} "
              f"{'ratio*cos/2':>11}")
        for n in range(0, args.nmax, max(1, args.nmax // 12)):
            r = seq[n + 1] / seq[n]
            print(f"{n:>4} {seq[n]:>14.6e} {norm_closed_form(p, n):>14.6e} {r:>9.5f} "
                  f"{r / (2 * x):>11.5f}")
        print()


if __name__ == "__main__":
    main()
