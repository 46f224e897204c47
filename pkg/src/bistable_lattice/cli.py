"""Command-line entry point: ``bistable <group> <command> [options]``.

JSON goes to standard output unless ``--output`` is given; plot data is
available as CSV through ``--format csv``.  Failures print a single JSON line
``{"error": ..., "message": ...}`` on standard error and exit with status 2.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io as bio
from .compatibility import (
    export_triplets,
    hexagon_matrix,
    rank_report,
    rigidity_matrix,
    solve_displacements,
)
from .eigenstrain_large import eigenpair, hex_assembly, isotropic_factor, sample_region
from .energy import (
    RodEnergyParams,
    effective_density_corners,
    effective_density_full,
    relax,
)
from .lattice import build_lattice, counts
from .stillstates import approx_concentrations, num_stripes, stripe_edges
from .strain import (
    boundary_term_bound,
    eigenvalue_samples,
    flat_bottom_point,
    flat_bottom_vertices,
    strain_from_displacements,
    strain_from_elongations,
    strain_approximation_check,
)

THREADS_ENV = "BISTABLE_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _triple(text):
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return np.array(parts)


def _emit(args, text):
    if not text.endswith("\n"):
        text += "\n"
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _lattice(n):
    if n < 2:
        raise UsageError(f"--n must be >= 2, got {n}")
    return build_lattice(n)


def cmd_lattice_info(args):
    N, E, M, T, EB = counts(_lattice(args.n).n)
    return bio.dumps(
        {"n": args.n, "N": N, "E": E, "M": M, "T": T, "EB": EB,
         "identity_2N_minus_3_equals_E_minus_M": 2 * N - 3 == E - M}
    )


def cmd_lattice_dump(args):
    return bio.dumps(_lattice(args.n).to_dict())


def _finite_or_none(values):
    return [v if np.isfinite(v) else None for v in values]


def cmd_compat_rank(args):
    rep = rank_report(_lattice(args.n), args.tol)
    N, E, M, _, _ = counts(args.n)
    return bio.dumps(
        {"n": args.n, "rank_R": rep.rank_R, "nullity_R": rep.nullity_R,
         "rank_Z": rep.rank_Z, "expected_rank_R": 2 * N - 3, "expected_rank_Z": M,
         "gap_R": _finite_or_none(rep.gap_R), "gap_Z": _finite_or_none(rep.gap_Z), "warnings": list(rep.warnings)}
    )


def cmd_compat_solve(args):
    lat = _lattice(args.n)
    kappa = bio.load_vector(args.input, lat.num_edges)
    return bio.dumps(solve_displacements(lat, kappa))


def cmd_compat_export(args):
    lat = _lattice(args.n)
    M = rigidity_matrix(lat, sparse=True) if args.matrix == "R" else hexagon_matrix(lat, sparse=True)
    return export_triplets(M)


def cmd_still_stripes(args):
    lat = _lattice(args.n)
    if args.format == "csv":
        label = np.zeros((lat.num_edges, 2), dtype=int)
        kappa = np.zeros(lat.num_edges)
        for g in (1, 2, 3):
            for j in range(1, num_stripes(lat) + 1):
                e = stripe_edges(lat, g, j)
                label[e] = (g, j)
                kappa[e] = args.s
        rows = bio.edge_rows(lat, kappa, extra=label)
        return bio.csv_text(bio.EDGE_HEADER + ["group", "index"], rows)
    out = []
    for g in (1, 2, 3):
        for j in range(1, num_stripes(lat) + 1):
            e = stripe_edges(lat, g, j)
            alpha = [0.0, 0.0, 0.0]
            alpha[g - 1] = e.size / (lat.num_edges // 3)
            out.append({"group": g, "index": j, "s": args.s, "long_edges": e, "alpha": alpha})
    return bio.dumps(out)


def _approx_report(lat, alpha, s, method):
    target = flat_bottom_point(alpha, s)
    rep = strain_approximation_check(lat, target, s, method=method)
    state = approx_concentrations(lat, alpha, s, method=method)
    return state, {
        "state": state.to_dict(),
        "strain": bio.strain_to_dict(rep.Estar),
        "approximation": {
            "target": bio.strain_to_dict(target),
            "error": rep.error,
            "bound": rep.bound,
            "within_bound": rep.error <= rep.bound,
            "displacement_residual": rep.displacement_residual,
            "boundary_term_bound": boundary_term_bound(lat, state.kappa),
        },
    }


def cmd_still_approx(args):
    lat = _lattice(args.n)
    if lat.n < 3:
        raise UsageError("still approx needs --n >= 3")
    if args.random:
        rng = np.random.default_rng(args.seed)
        targets = rng.uniform(size=(args.random, 3))
        threads = int(os.environ.get(THREADS_ENV, "1"))
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            reports = list(pool.map(lambda a: _approx_report(lat, a, args.s, args.method)[1], targets))
        if args.format == "csv":
            rows = [
                (*t, *r["state"]["alpha"], r["approximation"]["error"], r["approximation"]["bound"])
                for t, r in zip(targets, reports)
            ]
            return bio.csv_text(
                ["target1", "target2", "target3", "alpha1", "alpha2", "alpha3", "error", "bound"], rows
            )
        return bio.dumps({"n": lat.n, "s": args.s, "seed": args.seed,
                          "targets": targets, "reports": reports})
    if args.alpha is None:
        raise UsageError("still approx needs --alpha or --random")
    if np.any(args.alpha < 0) or np.any(args.alpha > 1):
        raise UsageError("--alpha components must lie in [0, 1]")
    state, report = _approx_report(lat, args.alpha, args.s, args.method)
    if args.format == "csv":
        return bio.csv_text(bio.EDGE_HEADER, bio.edge_rows(lat, state.kappa))
    return bio.dumps(report)


def cmd_strain_average(args):
    lat = _lattice(args.n)
    if args.displacements:
        U = bio.load_vector(args.displacements, 2 * lat.num_nodes)
        E = strain_from_displacements(lat, U)
    elif args.kappa:
        E = strain_from_elongations(lat, bio.load_vector(args.kappa, lat.num_edges))
    else:
        raise UsageError("strain average needs --displacements or --kappa")
    return bio.dumps(bio.strain_to_dict(E))


def cmd_flatbottom(args):
    if args.s <= 0:
        raise UsageError("--s must be positive")
    fb = flat_bottom_vertices(args.s)
    vert_rows = []
    for x, E in zip(fb.corners, fb.vertices):
        l1, l2 = eigenpair(E)
        vert_rows.append((*x, E[0, 0], E[0, 1], E[1, 1], l1, l2))
    samples = eigenvalue_samples(args.s, args.resolution) if args.resolution else np.empty((0, 8))
    if args.format == "csv":
        return bio.csv_text(bio.FLATBOTTOM_HEADER, vert_rows + [tuple(r) for r in samples])
    keys = bio.FLATBOTTOM_HEADER
    return bio.dumps({
        "s": args.s,
        "vertices": [dict(zip(keys, r)) for r in vert_rows],
        "samples": [dict(zip(keys, r)) for r in samples],
    })


def cmd_region(args):
    pts = sample_region(args.a, args.resolution)
    rows = [(p.lambda1, p.lambda2, p.family, p.mu, p.k, p.n1, p.n2, p.n3) for p in pts]
    if args.format == "csv":
        return bio.csv_text(bio.REGION_HEADER, rows)
    return bio.dumps([dict(zip(bio.REGION_HEADER, r)) for r in rows])


def cmd_hexassembly(args):
    E, N = hex_assembly(args.k, args.n1, args.n2, args.n3, args.a)
    out = {"E_hex": bio.strain_to_dict(E), "N": N, "eigenvalues": eigenpair(E)}
    if args.n1 == args.n2 == args.n3:
        out["isotropic_factor"] = isotropic_factor(args.k, args.n1, args.a)
    return bio.dumps(out)


def cmd_energy_effective(args):
    p = RodEnergyParams(l=1.0, s=args.s, C=args.C)
    e = np.array([[args.e[0], args.e[1]], [args.e[1], args.e[2]]])
    if args.corners:
        return bio.dumps({"J": effective_density_corners(e, p), "variant": "corners"})
    res = effective_density_full(e, p)
    return bio.dumps({**res.to_dict(), "variant": "full"})


def cmd_energy_relax(args):
    with open(args.input) as fh:
        obj = json.load(fh)
    n = obj.get("n", args.n) if isinstance(obj, dict) else args.n
    if n is None:
        raise UsageError("lattice size missing: pass --n or store 'n' in the input")
    lat = _lattice(int(n))
    U0 = bio.load_vector(obj, 2 * lat.num_nodes)
    p = RodEnergyParams(l=args.l, s=args.s, C=args.C)
    r = relax(lat, U0, p, max_iters=args.max_iters, grad_tol=args.grad_tol)
    return bio.dumps({"U": r.U, "energy": r.energy, "grad_norm": r.grad_norm,
                      "iters": r.iters, "converged": r.converged})


def build_parser():
    parser = _Parser(prog="bistable", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(group_parsers, name, func, help_):
        p = group_parsers.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--output", help="write to this file instead of stdout")
        return p

    lat = groups.add_parser("lattice").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub(lat, "info", cmd_lattice_info, "node/edge/equation counts")
    p.add_argument("--n", type=int, required=True)
    p = sub(lat, "dump", cmd_lattice_dump, "lattice as JSON")
    p.add_argument("--n", type=int, required=True)

    comp = groups.add_parser("compat").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub(comp, "rank", cmd_compat_rank, "SVD ranks of R and Z")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p = sub(comp, "solve", cmd_compat_solve, "displacements realising elongations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--input", required=True, help="JSON array of edge elongations")
    p = sub(comp, "export", cmd_compat_export, "matrix as row/col/value triplets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--matrix", choices=("R", "Z"), required=True)

    still = groups.add_parser("still").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub(still, "stripes", cmd_still_stripes, "all stripe still states")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=float, default=0.1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p = sub(still, "approx", cmd_still_approx, "still state with target concentrations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=_triple)
    p.add_argument("--s", type=float, default=0.1)
    p.add_argument("--method", choices=("argmax", "greedy"), default="argmax")
    p.add_argument("--random", type=int, default=0, help="sweep this many random targets")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    strain = groups.add_parser("strain").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub(strain, "average", cmd_strain_average, "average strain tensor")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--displacements", help="JSON array of node displacements")
    p.add_argument("--kappa", help="JSON array of edge elongations")

    p = sub(groups, "flatbottom", cmd_flatbottom, "flat-bottom vertices and eigenvalue samples")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--resolution", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub(groups, "region", cmd_region, "eigenvalue region of finite-deformation still states")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--resolution", type=int, default=20)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub(groups, "hexassembly", cmd_hexassembly, "hexagon-triangle-strip eigenstrain")
    for name in ("k", "n1", "n2", "n3"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--a", type=float, required=True)

    en = groups.add_parser("energy").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub(en, "effective", cmd_energy_effective, "effective energy density")
    p.add_argument("--e", type=_triple, required=True, help="strain components a,b,c")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--corners", action="store_true")
    p = sub(en, "relax", cmd_energy_relax, "steepest-descent relaxation")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=float, default=0.1)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--grad-tol", type=float, default=1e-12)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _emit(args, args.func(args))
    except (UsageError, ValueError, OSError) as exc:
        kind = "usage" if isinstance(exc, UsageError) else type(exc).__name__
        sys.stderr.write(json.dumps({"error": kind, "message": str(exc).replace("\n", " ")}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
