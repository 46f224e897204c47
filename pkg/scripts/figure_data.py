"""Write plot data for the flat-bottom eigenvalues and the finite-deformation region."""
import argparse
import pathlib

from bistable_lattice.cli import main as cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figure_data")
    ap.add_argument("--s", type=float, default=0.1)
    ap.add_argument("--a", type=float, default=1.2)
    ap.add_argument("--resolution", type=int, default=20)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res = str(args.resolution)
    cli(["flatbottom", "--s", str(args.s), "--resolution", res, "--format", "csv",
         "--output", str(out / "flatbottom.csv")])
    cli(["region", "--a", str(args.a), "--resolution", res, "--format", "csv",
         "--output", str(out / "region.csv")])
    cli(["still", "stripes", "--n", "5", "--format", "csv", "--output", str(out / "stripes_n5.csv")])
    print(f"wrote {sorted(p.name for p in out.iterdir())} to {out}/")


if __name__ == "__main__":
    main()
