"""Planar sanity cases: pure tip moments against the analytic arc, and an
in-plane tip force against shooting.

    python scripts/planar_examples.py --n 10 --order 6
"""

import argparse

import numpy as np

from magnus_rod import MagnusOrder, RodProperties, TipWrench, make_grid, solve_collocation, solve_shooting
from magnus_rod.liegroup import rotation_angle


def arc_tip(kappa, L):
    a = kappa * L
    return np.array([(1 - np.cos(a)) / kappa, 0.0, np.sin(a) / kappa])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--order", type=int, choices=(4, 6), default=6)
    args = ap.parse_args()
    props = RodProperties.from_material()
    order = MagnusOrder.parse(args.order)
    grid = make_grid(args.n, props.L, order.default_nu)

    print("pure moment about y")
    print(f"{'tip deg':>8} {'m (N m)':>9} {'|dp| arc (mm)':>14} {'|dp| shoot (mm)':>16} {'rot (rad)':>10}")
    for deg in (20, 50, 80):
        kappa = np.radians(deg) / props.L
        w = TipWrench(np.zeros(3), [0.0, props.EI * kappa, 0.0])
        sol = solve_collocation(props, w, grid, order)
        ref = solve_shooting(props, w, samples=2)
        d_arc = np.linalg.norm(sol.tip_pose[:3, 3] - arc_tip(kappa, props.L)) * 1e3
        d_ref = np.linalg.norm(sol.tip_pose[:3, 3] - ref.tip_pose[:3, 3]) * 1e3
        rot = rotation_angle(sol.tip_pose[:3, :3] @ ref.tip_pose[:3, :3].T)
        print(f"{deg:8d} {w.moment[1]:9.4f} {d_arc:14.3e} {d_ref:16.3e} {rot:10.2e}")

    print("\nin-plane tip force (world y, small axial part)")
    print(f"{'f_y (N)':>8} {'tip x,y,z (mm)':>30} {'|dp| shoot (mm)':>16}")
    for fy in (0.25, 0.5, 1.0):
        w = TipWrench([0.0, fy, fy / 10], np.zeros(3))
        sol = solve_collocation(props, w, grid, order)
        ref = solve_shooting(props, w, samples=2)
        p = sol.tip_pose[:3, 3] * 1e3
        d_ref = np.linalg.norm(sol.tip_pose[:3, 3] - ref.tip_pose[:3, 3]) * 1e3
        print(f"{fy:8.2f} {p[0]:9.3f} {p[1]:9.3f} {p[2]:9.3f}  {d_ref:16.3e}")


if __name__ == "__main__":
    main()
