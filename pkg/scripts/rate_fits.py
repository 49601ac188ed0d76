"""Fit C = C0 + C1 log(N)/N + C2/N to collective and repeated error rates and
compare C0 with the quantum and classical Chernoff exponents."""
import argparse
import math

from locdisc.helstrom import collective_error
from locdisc.local import repeated_error_opt, repeated_exponent_opt
from locdisc.qubit import make_pair, quantum_chernoff_exponent
from locdisc.runner import fit_rate


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r", type=float, default=0.8)
    ap.add_argument("--theta", type=float, default=math.pi / 2)
    ap.add_argument("--windows", default="25-35,40-60,60-80")
    args = ap.parse_args(argv)

    pair = make_pair(args.r, args.r, args.theta)
    refs = {"collective": quantum_chernoff_exponent(pair),
            "repeated": repeated_exponent_opt(pair)[0]}
    print("strategy,n_min,n_max,C0,C1,C2,reference")
    for window in args.windows.split(","):
        lo, hi = map(int, window.split("-"))
        ns = range(lo, hi + 1)
        for name, pe in (("collective", lambda n: collective_error(pair, n)),
                         ("repeated", lambda n: repeated_error_opt(pair, n)[0])):
            fit = fit_rate([(n, pe(n)) for n in ns])
            print(f"{name},{lo},{hi},{fit.c0!r},{fit.c1!r},{fit.c2!r},{refs[name]!r}")


if __name__ == "__main__":
    main()
