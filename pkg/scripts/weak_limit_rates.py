"""Weak-limit distances d(theta) and fitted power laws in (pi/2 - theta)."""
import argparse
import math

from iqho.coherent import gaussian_probe
from iqho.distrib import SchwartzProbe, weak_limit_study


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmax", type=int, default=5)
    ap.add_argument("--jmax", type=int, default=16)
    ap.add_argument("--omega", type=float, default=1.0)
    args = ap.parse_args()

    sched = [math.pi / 2 - 2.0**-j for j in range(1, args.jmax + 1)]
    probes = {"e0": SchwartzProbe(gaussian_probe(args.omega)),
              "x*exp(-x^2)": SchwartzProbe.of([0.0, 1.0], 2.0),
              "x^2*exp(-x^2/2)": SchwartzProbe.of([0.0, 0.0, 1.0], 1.0)}
    print(f"{'probe':>16} {'n':>2} {'d(j=12)':>10} {'d(j=last)':>10} {'exponent':>8} "
          f"{'first j with d<1e-3':>20}")
    for name, probe in probes.items():
        for n in range(args.nmax + 1):
            rep = weak_limit_study(1, n, probe, args.omega, sched, majorant=False)
            d = rep.data["distance"]
            below = next((j + 1 for j, v in enumerate(d) if v < 1e-3), None)
            d12 = d[11] if len(d) >= 12 else float("nan")
            print(f"{name:>16} {n:>2} {d12:>10.3e} {d[-1]:>10.3e} "
                  f"{rep.data['power_law_exponent']:>8.3f} {str(below):>20}")


if __name__ == "__main__":
    main()
