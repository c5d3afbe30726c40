"""Run every CLI pipeline on the bundled fixtures and collect CSV/JSON under one directory.

    python scripts/run_fixtures.py --out results
"""
import argparse
from pathlib import Path

from l2approx import FIXTURES
from l2approx.cli import main

# box sizes per fixture: large enough to see convergence, small enough for dense spectra
M_LISTS = {
    "circle": {"betti": "2:1024:x2", "density": "16,32,64,128", "determinant": "8:512:x2"},
    "wedge": {"betti": "2:1024:x2", "density": "16,32,64,128", "determinant": "8:512:x2"},
    "torus": {"betti": "2:64:x2", "density": "8,16,32", "determinant": "4,8,16,32"},
}
LAMBDAS = "linspace:0:16:65"


def run(out: Path) -> dict[tuple[str, str], int]:
    codes = {}
    for name in FIXTURES:
        for command in ("betti", "density", "determinant"):
            argv = [command, "--input", name, "--bc", "both", "--m", M_LISTS[name][command],
                    "--lambdas", LAMBDAS, "--out", str(out / name)]
            print(f"== {name} {command}")
            codes[name, command] = main(argv)
    return codes


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args()
    codes = run(args.out)
    print("\nexit codes:")
    for (name, command), code in codes.items():
        print(f"  {name:<7} {command:<12} {code}")
