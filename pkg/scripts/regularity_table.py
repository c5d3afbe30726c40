"""Print the boundary-collar ratios Ndot_{m,delta} / N_m for the bundled fixtures."""
import argparse

from l2approx import FIXTURES, load_fixture
from l2approx.folner import regularity_report

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--m", type=int, nargs="+", default=[4, 8, 16, 32, 64])
parser.add_argument("--delta", type=int, nargs="+", default=[0, 1, 2, 3])
args = parser.parse_args()

for name in FIXTURES:
    rows = regularity_report(load_fixture(name), args.m, args.delta)
    print(f"\n{name}")
    print("  m     " + "".join(f"delta={d:<6}" for d in args.delta))
    for m in args.m:
        ratios = [r["ratio"] for r in rows if r["m"] == m]
        print(f"  {m:<5} " + "".join(f"{x:<12.4f}" for x in ratios))
