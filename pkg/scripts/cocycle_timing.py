"""Exhaustive cocycle checks across simply-laced types with timings."""
import argparse
import time

from kmvertex.roots import check_cocycle, cocycle_table, gauge_fix, parse_algebra

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--algebras", default="A1:3,A2:3,A3:3,D4:3,D5:2,E6:1,E7:1",
                help="comma-separated name:window pairs")
args = ap.parse_args()

print(f"{'algebra':>7}  {'window':>6}  {'points':>7}  {'triples':>12}  {'violations':>10}  {'seconds':>7}")
for item in args.algebras.split(","):
    name, bound = item.split(":")
    t0 = time.perf_counter()
    table = gauge_fix(cocycle_table(parse_algebra(name), int(bound)))
    n, bad, _ = check_cocycle(table)
    print(f"{name:>7}  {bound:>6}  {table.size:>7}  {n:>12}  {bad:>10}  {time.perf_counter() - t0:>7.2f}")
