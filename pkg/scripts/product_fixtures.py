"""Singular points of the theta divisor over products of elliptic curves."""

import argparse

import numpy as np

from thetasing.cones import polar_quadrics, tangent_cone
from thetasing.sing import find_singular_points
from thetasing.theta import make_context


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", type=int, default=2, choices=[2, 3])
    args = ap.parse_args()
    ctx = make_context(np.diag([1j] * args.g))
    pts = find_singular_points(ctx)
    print(f"g={args.g}: {len(pts)} singular points")
    for p in sorted(pts, key=lambda p: -p.order)[:10]:
        z = ", ".join(f"{c.real:+.4f}{c.imag:+.4f}i" for c in p.z)
        line = f"  order {p.order} corank {p.corank} residual {p.residual:.1e} z=({z})"
        if p.order == 3:
            cone = tangent_cone(ctx, p.z, 3)
            line += f" polar span dim {polar_quadrics(cone).dim_projective}"
        print(line)


if __name__ == "__main__":
    main()
