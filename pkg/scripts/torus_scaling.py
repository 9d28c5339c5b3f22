"""Coincident-delta factor and worst residual of the torus algebra as the site count grows."""
import argparse
import time

from kmvertex.assembly import torus_grid, verify_surface_algebra
from kmvertex.roots import parse_algebra
from kmvertex.vertex import Site, site_config

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--algebra", default="A1")
ap.add_argument("--level", type=int, default=3)
ap.add_argument("--modes", type=int, default=2)
ap.add_argument("--max-sites", type=int, default=6)
args = ap.parse_args()

site = Site(site_config(parse_algebra(args.algebra), level=args.level, window=2, modes=args.modes))
print(f"{'N':>3}  {'central factor':>14}  {'worst residual':>14}  {'seconds':>7}")
for N in range(1, args.max_sites + 1):
    t0 = time.perf_counter()
    rep = verify_surface_algebra(site, torus_grid(N))
    factor = max(r.central_measured for r in rep.records if r.central_measured is not None)
    worst = max(r.residual for r in rep.records)
    print(f"{N:>3}  {factor:>14.12g}  {worst:>14.3e}  {time.perf_counter() - t0:>7.2f}")
