"""Jacobi residual of the sphere table with and without the (-1)^m sign in the central pairing."""
import argparse

from kmvertex.algebra import SphereTable, scan, sphere_symbols, sphere_table
from kmvertex.roots import parse_algebra


class UnsignedSphereTable(SphereTable):
    def pairing(self, i1, i2):
        (l1, m1), (l2, m2) = i1, i2
        return 1 if (l1 == l2 and m1 + m2 == 0) else 0


ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--algebra", default="A1")
ap.add_argument("--lmax", type=int, default=3)
args = ap.parse_args()

alg = parse_algebra(args.algebra)
signed = sphere_table(alg)
for name, table in (("signed", signed), ("unsigned", UnsignedSphereTable(alg, signed.cocycle))):
    r = scan(table, sphere_symbols(table, args.lmax), threshold=1e-8)
    print(f"{name:>8}: max Jacobi residual {r.jacobi:.3e} over {r.triples} triples, {len(r.violations)} violations")
    if r.violations:
        print(f"          worst triple {r.worst_triple}")
