"""L2 distance between partial sums of the bi-coherent series and the closed form."""
import argparse

from iqho.coherent import predicted_tail, series_distance
from iqho.pbops import ThetaParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta", type=float, nargs="+", default=[0.0, 0.6, 1.0])
    ap.add_argument("--z", type=complex, nargs="+", default=[1 + 0j, 1 + 2j])
    ap.add_argument("--K", type=int, nargs="+", default=[10, 20, 30, 40, 50, 60, 80, 100])
    args = ap.parse_args()

    print(f"{'theta':>6} {'z':>8} {'K':>4} {'d_K':>11} {'tail bound':>11} {'phase':>9}")
    for th in args.theta:
        for z in args.z:
            for K in args.K:
                d, phase, _ = series_distance(ThetaParams(th), z, K)
                print(f"{th:>6} {str(z):>8} {K:>4} {d:>11.3e} "
                      f"{predicted_tail(ThetaParams(th), z, K):>11.3e} {phase:>9.5f}")


if __name__ == "__main__":
    main()
