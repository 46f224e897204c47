"""Print ranks of R and Z against the closed-form counts for a range of sizes."""
import argparse
import time

from bistable_lattice.compatibility import rank_report
from bistable_lattice.lattice import build_lattice, counts


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    print(f"{'n':>3} {'N':>5} {'E':>5} {'M':>5} {'rank R':>7} {'2N-3':>6} {'rank Z':>7} {'nullity R':>9} {'sec':>6}")
    for n in range(2, args.max_n + 1):
        t0 = time.perf_counter()
        rep = rank_report(build_lattice(n))
        N, E, M, _, _ = counts(n)
        dt = time.perf_counter() - t0
        print(f"{n:>3} {N:>5} {E:>5} {M:>5} {rep.rank_R:>7} {2 * N - 3:>6} {rep.rank_Z:>7} {rep.nullity_R:>9} {dt:>6.2f}")


if __name__ == "__main__":
    main()
