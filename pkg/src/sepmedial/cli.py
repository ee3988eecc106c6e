"""Command line front end.

Exit status: 0 on success, 1 on domain / contract errors (including an
oracle disagreement under ``--oracle``), 2 on I/O and parse errors.
"""
import argparse
import sys

import numpy as np

from . import fileio, oracle
from .errors import ContractError, DomainError, FormatError
from .filtering import DIAMETER_MODES, FilterParams, filter_balls, measure, renormalize, shape_diameter
from .medial import REDUCTIONS, TIE_MODES, rdma_reduce, sk_extract
from .redt import reconstruct, redt_map
from .sdt import sdt, voronoi_labeling


class OracleMismatch(DomainError):
    pass


def _extents(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad extents {text!r}, expected n0,n1,...") from None


def _check(ok, what):
    if not ok:
        raise OracleMismatch(f"oracle disagrees: {what}")


def set_threads(n):
    import numba

    avail = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(avail if n <= 0 else min(n, avail))


def cmd_sdt(args):
    img = fileio.read_image(args.input)
    res = sdt(img)
    if args.oracle:
        _check(np.array_equal(res.dist, oracle.brute_sdt(img)), "sdt")
    fileio.write_output_grid(args.output, res.dist, "S64")


def cmd_voronoi(args):
    img = fileio.read_image(args.input)
    labels = voronoi_labeling(img)
    if args.oracle:
        ext = img.shape
        coords = np.stack(np.unravel_index(labels, ext, order="F"), axis=-1)
        own = np.stack(np.indices(ext), axis=-1)
        _check(np.array_equal(((coords - own) ** 2).sum(-1), oracle.brute_sdt(img)), "voronoi distances")
    fileio.write_grid(args.output, labels, "SITE")


def cmd_redt(args):
    balls = fileio.read_balls(args.balls)
    field = redt_map(balls, args.extents)
    if args.oracle:
        _check(np.array_equal(field.value, oracle.brute_redt(balls, args.extents)), "redt")
    fileio.write_output_grid(args.output, field.value, "S64")


def cmd_reconstruct(args):
    balls = fileio.read_balls(args.balls)
    img = reconstruct(balls, args.extents)
    if args.oracle:
        _check(np.array_equal(img, oracle.brute_union(balls, args.extents)), "reconstruction")
    fileio.write_output_grid(args.output, img, "BIN")


def cmd_sk(args):
    img = fileio.read_image(args.input)
    sk = sk_extract(img, args.ties)
    if args.oracle:
        _check(np.array_equal(oracle.brute_union(sk, img.shape), img), "Sk reversibility")
    fileio.write_balls(args.output, sk)


def cmd_rdma(args):
    img = fileio.read_image(args.input)
    balls = rdma_reduce(sk_extract(img), img.shape, args.reduction)
    if args.oracle:
        _check(np.array_equal(oracle.brute_union(balls, img.shape), img), "RDMA reversibility")
        dma = set(oracle.brute_dma(img).pairs())
        _check(set(balls.pairs()) <= dma, "RDMA is not a subset of the discrete medial axis")
    fileio.write_balls(args.output, balls)


def cmd_measure(args):
    balls = fileio.read_balls(args.balls)
    img = fileio.read_image(args.image)
    measured = measure(balls, img, args.diameter)
    if args.oracle:
        field = redt_map(balls, img.shape)
        labels, ties = oracle.brute_power_label(balls, img.shape)
        sure = img & ~ties
        _check(np.array_equal(field.owner[sure], labels[sure]), "power labels")
    meta = {
        "foreground": int(img.sum()),
        "diameter_bbox": shape_diameter(img, "bbox"),
        "diameter_exact": shape_diameter(img, "exact"),
        "diameter_maxball": float(np.sqrt(balls.radii.max())),
        "diameter_used": args.diameter,
    }
    fileio.write_measurements(args.output, measured, meta)


def cmd_filter(args):
    measured, meta = fileio.read_measurements(args.csv)
    if args.diameter is not None:
        key = f"diameter_{args.diameter}"
        if key not in meta or "foreground" not in meta:
            raise FormatError(f"CSV lacks the {key!r} metadata needed for --diameter", 0)
        measured = renormalize(measured, meta[key], meta["foreground"])
    kept = filter_balls(measured, FilterParams(args.rho0, args.kappa0))
    fileio.write_balls(args.output, kept)


def cmd_stats(args):
    if fileio.is_ball_file(args.path):
        balls = fileio.read_balls(args.path)
        print(f"balls: {len(balls)}")
        if args.extents:
            print(f"reconstructed_cells: {int(reconstruct(balls, args.extents).sum())}")
    else:
        img = fileio.read_image(args.path)
        print(f"extents: {','.join(str(n) for n in img.shape)}")
        print(f"foreground_cells: {int(img.sum())}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads, 0 = all available")
    common.add_argument("--oracle", action="store_true", default=argparse.SUPPRESS,
                        help="cross-check against brute force (small inputs only)")

    p = argparse.ArgumentParser(prog="sepmedial", parents=[common], description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sdt", parents=[common], help="squared distance transform")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_sdt)

    s = sub.add_parser("voronoi", parents=[common], help="nearest background cell labels")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_voronoi)

    for name, func, helptext in (("redt", cmd_redt, "reverse distance transform value grid"),
                                 ("reconstruct", cmd_reconstruct, "union of balls as a binary image")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("balls")
        s.add_argument("--extents", type=_extents, required=True)
        s.add_argument("-o", "--output", required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("sk", parents=[common], help="Saito-Toriwaki skeleton balls")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--ties", choices=TIE_MODES, default="all",
                   help="keep every co-maximal ball (all) or one winner per cell (first)")
    s.set_defaults(func=cmd_sk)

    s = sub.add_parser("rdma", parents=[common], help="reduced discrete medial axis balls")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--reduction", choices=REDUCTIONS, default="intersect")
    s.set_defaults(func=cmd_rdma)

    s = sub.add_parser("measure", parents=[common], help="thickness and covering of each ball")
    s.add_argument("balls")
    s.add_argument("image")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--diameter", choices=DIAMETER_MODES, default="bbox")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("filter", parents=[common], help="keep balls above both thresholds")
    s.add_argument("csv")
    s.add_argument("--rho0", type=float, required=True)
    s.add_argument("--kappa0", type=float, required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--diameter", choices=DIAMETER_MODES, default=None,
                   help="renormalize rho with this diameter (default: as measured)")
    s.set_defaults(func=cmd_filter)

    s = sub.add_parser("stats", parents=[common], help="cell and ball counts")
    s.add_argument("path")
    s.add_argument("--extents", type=_extents, default=None,
                   help="for ball files: also count reconstructed cells")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.oracle = getattr(args, "oracle", False)
    try:
        set_threads(getattr(args, "threads", 0))
        args.func(args)
    except (FormatError, OSError) as exc:
        print(f"sepmedial: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ContractError, ValueError) as exc:
        print(f"sepmedial: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
