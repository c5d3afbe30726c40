"""Compare finite spectral densities F_m with the torus oracle and print the sup-distance per m.

The sup is taken over a lambda grid; it shrinks roughly like 1/m since the
finite pieces carry an O(boundary/volume) excess of cells.
"""
import argparse

import numpy as np

from l2approx import FIXTURES, load_fixture
from l2approx.analysis import Study

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--fixture", choices=FIXTURES, default="circle")
parser.add_argument("--bc", choices=("absolute", "relative"), default="absolute")
parser.add_argument("--m", type=int, nargs="+", default=[4, 8, 16, 32, 64])
parser.add_argument("--points", type=int, default=129)
args = parser.parse_args()

study = Study(load_fixture(args.fixture))
for j in range(study.cx.top_dim + 1):
    lams = np.linspace(0, study.K2(j), args.points)
    oracle = study.density(j).F(lams)
    print(f"j={j}  (oracle b2={study.density(j).betti:.6g})")
    for m in args.m:
        s = study.summary(j, m, args.bc)
        finite = np.array([s.F(x) for x in lams])
        print(f"  m={m:<4} sup|F_m - F| = {np.abs(finite - oracle).max():.4f}   "
              f"F_m(0) = {s.F(0.0):.6g}")
