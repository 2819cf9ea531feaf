"""Scan the kernel inequalities over a dense grid of scaling values.

For each kernel power this checks, pointwise over the grid w > 0 with
w = 1 excluded:

  * the pointwise bound w^2 + w p(w) >= 1 - p(w)^2 / 4, and
  * the ratio bound 0 <= ((r-1)^2 w^(2r) + (2r-2) w^r - r^2 w^(2r-2) + 1)
    / (1 - w^r)^2 <= (r-1)^2.

Prints worst slacks per power and exits 1 on any violation.

    python3 scripts/check_inequalities.py
    python3 scripts/check_inequalities.py --w-max 20 --steps 5000 --r-max 12
"""

import argparse
import sys

import numpy as np

from lcco_ipm import MONITOR_SLACK, check_eq117_inequality, p_vector


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--w-min", type=float, default=0.1, help="grid start (default 0.1)"
    )
    parser.add_argument(
        "--w-max", type=float, default=5.0, help="grid end (default 5.0)"
    )
    parser.add_argument(
        "--steps", type=int, default=491, help="grid point count (default 491)"
    )
    parser.add_argument(
        "--r-max", type=int, default=5, help="largest kernel power (default 5)"
    )
    return parser.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    if not 0.0 < args.w_min < args.w_max:
        print("error: need 0 < --w-min < --w-max", file=sys.stderr)
        return 1
    if args.steps < 2 or args.r_max < 1:
        print("error: need --steps >= 2 and --r-max >= 1", file=sys.stderr)
        return 1
    w = np.linspace(args.w_min, args.w_max, args.steps)
    w = w[np.abs(w - 1.0) >= 1e-9]
    print(f"grid: {w.size} points in [{args.w_min:g}, {args.w_max:g}], w=1 excluded")
    clean = True
    for r in range(1, args.r_max + 1):
        p = p_vector(w, r)
        pointwise = w**2 + w * p - 1.0 + p**2 / 4.0
        pointwise_ok = float(pointwise.min()) >= -MONITOR_SLACK
        ratio_ok = check_eq117_inequality(w, r)
        clean = clean and pointwise_ok and ratio_ok
        numerator = (
            (r - 1) ** 2 * w ** (2 * r)
            + (2 * r - 2) * w**r
            - r**2 * w ** (2 * r - 2)
            + 1.0
        )
        ratio = numerator / (1.0 - w**r) ** 2
        print(
            f"r={r:>2}: pointwise slack min {pointwise.min():.3e} "
            f"[{'ok' if pointwise_ok else 'VIOLATED'}], "
            f"ratio range [{ratio.min():.6f}, {ratio.max():.6f}] "
            f"within [0, {(r - 1) ** 2}] [{'ok' if ratio_ok else 'VIOLATED'}]"
        )
    print("all inequalities hold" if clean else "VIOLATIONS FOUND")
    return 0 if clean else 1


if __name__ == "__main__":
    sys.exit(main())
