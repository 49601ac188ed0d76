"""Error rate C = -log(P_e)/N versus purity r = r0 = r1 at N = 25, with the
copies ratio f = C_col / C_ppt."""
import argparse
import math
import sys
import time

import numpy as np

from locdisc import runner


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=25)
    ap.add_argument("--theta", type=float, default=math.pi / 2)
    ap.add_argument("--r-step", type=float, default=0.05)
    ap.add_argument("--out", default="fig2.csv")
    args = ap.parse_args(argv)

    r_list = [round(r, 6) for r in np.arange(0.0, 0.95 + 1e-9, args.r_step)]
    start = time.perf_counter()
    rows = runner.sweep_r(args.theta, args.n, r_list)
    for row in rows:
        row["f"] = row["collective"] / row["ppt"] if row["ppt"] > 0 else math.nan
    with open(args.out, "w", newline="") as fh:
        fh.write(runner.to_csv(rows))
    print(f"wrote {len(rows)} rows to {args.out} in {time.perf_counter() - start:.0f} s",
          file=sys.stderr)


if __name__ == "__main__":
    main()
