"""Scan the tangency residual along a path crossing 2 Xi on a random Jacobian of genus 2."""

import argparse

import numpy as np

from thetasing.gauss import dist_to_2xi, sample_theta_divisor, scan_path
from thetasing.theta import make_context, random_period_matrix


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--samples", type=int, default=11)
    ap.add_argument("--cross", type=float, default=0.4, help="path parameter where 2 Xi is crossed")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    ctx = make_context(random_period_matrix(2, rng))
    x = sample_theta_divisor(ctx, rng, 1)[0]
    v = np.array([0.13 + 0.05j, -0.07 + 0.11j])
    path = {"base": 2 * x - args.cross * v, "direction": v}
    scan = scan_path(ctx, path, samples=args.samples)
    print("t,residual,dist_to_2xi")
    for t, r in zip(scan.t, scan.residual):
        print(f"{t:.6f},{r:.3e},{dist_to_2xi(ctx, 2 * x + (t - args.cross) * v)[0]:.3e}")
    for lo, hi, tmin, rmin in scan.dips:
        print(f"# dip on [{lo:.4f}, {hi:.4f}], minimum {rmin:.1e} at t={tmin:.8f}")


if __name__ == "__main__":
    main()
