"""Analyse the standard pencils: discriminants, singular members and vertex checks."""

import json

from thetasing import pencils as pc
from thetasing.fixtures import base_point_pencil, diag_pencil, vertex_curve, x0_pencil, x0_pencil_p3


def main() -> None:
    cases = {
        "diag": diag_pencil(),
        "base point": base_point_pencil(),
        "x0": x0_pencil(),
        "x0 in P3": x0_pencil_p3(),
        "conic vertex in P4": pc.prescribed_vertex_generator(vertex_curve([1], [0, 1], [0, 0, 1], [0], [0]), seed=7),
        "line vertex in P4": pc.prescribed_vertex_generator(vertex_curve([1], [0, 1], [0], [0], [0]), seed=7),
    }
    for name, pen in cases.items():
        rep = pc.analyze(pen, 7)
        checks = {k: v["pass"] for k, v in rep.segre_checks.items()}
        print(f"{name}: {json.dumps(checks)}")


if __name__ == "__main__":
    main()
